"""Entity linking through the DBLP search API, plus literal matching.

Each entity kind has its own search endpoint (publications, authors,
venues); mentions of unknown kind query all three and merge.  Literal
mentions (years, plain strings) never touch the network.  The client can
record live responses to a fixture directory and replay them later, so
the whole pipeline runs deterministically in tests.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

import requests

from .errors import (
    FixtureMissError,
    MalformedYearError,
    NotALiteralKindError,
    SearchApiMalformedResponseError,
    SearchApiUnavailableError,
)
from .fixtures import FixtureStore, search_key
from .logicform import Term
from .mentions import EntityMention

_API_PATHS = {
    "publication": "/search/publ/api",
    "person": "/search/author/api",
    "venue": "/search/venue/api",
}
_KIND_ORDER = ("publication", "person", "venue")
_LABEL_FIELDS = {"publication": "title", "person": "author", "venue": "venue"}
_YEAR_RE = re.compile(r"^[0-9]{4}$")


@dataclass(frozen=True)
class EntityCandidate:
    uri: str
    label: str
    kind: str     # publication | person | venue
    score: float
    rank: int     # 1-based


@dataclass
class LinkerConfig:
    base_url: str = "https://dblp.org"
    hits_per_query: int = 10
    display_count: int = 5      # how many candidates the session keeps per mention
    timeout: float = 10.0
    fixture_mode: str = "off"   # off | record | replay
    fixture_dir: str | None = None

    def __post_init__(self):
        if self.hits_per_query < 1:
            raise ValueError("hits_per_query must be positive")
        if self.fixture_mode not in ("off", "record", "replay"):
            raise ValueError(f"bad fixture_mode {self.fixture_mode!r}")
        if self.fixture_mode != "off" and not self.fixture_dir:
            raise ValueError("fixture_dir required when fixture_mode is not off")


def _default_transport(session: requests.Session):
    def send(url: str, params: dict, timeout: float) -> tuple[int, str]:
        resp = session.get(url, params=params, timeout=timeout)
        return resp.status_code, resp.text
    return send


class DblpSearchClient:
    """``transport`` is a (url, params, timeout) -> (status, body) callable;
    the default uses a shared requests session."""

    def __init__(self, config: LinkerConfig, transport=None):
        self.config = config
        self.store = FixtureStore(config.fixture_dir) if config.fixture_dir else None
        if transport is None:
            transport = _default_transport(requests.Session())
        self._send = transport

    def _fetch(self, path: str, query: str) -> str:
        key = search_key(path, query, self.config.hits_per_query)
        mode = self.config.fixture_mode
        if mode == "replay":
            doc = self.store.load(key)
            if doc is None:
                raise FixtureMissError(
                    f"no recorded response for {path} q={query!r}")
            return self._checked_body(doc["status"], doc["body"], path)
        url = self.config.base_url.rstrip("/") + path
        params = {"q": query, "format": "json", "h": str(self.config.hits_per_query)}
        try:
            status, body = self._send(url, params, self.config.timeout)
        except requests.Timeout as exc:
            raise SearchApiUnavailableError(f"search API timed out: {exc}") from exc
        except requests.RequestException as exc:
            raise SearchApiUnavailableError(f"search API unreachable: {exc}") from exc
        if mode == "record":
            self.store.save(key, {"path": path, "q": query,
                                  "h": self.config.hits_per_query}, status, body)
        return self._checked_body(status, body, path)

    @staticmethod
    def _checked_body(status: int, body: str, path: str) -> str:
        if status != 200:
            raise SearchApiUnavailableError(f"{path} returned HTTP {status}")
        return body

    def _parse_hits(self, body: str, kind: str) -> list[tuple[float, dict]]:
        try:
            doc = json.loads(body)
        except json.JSONDecodeError as exc:
            raise SearchApiMalformedResponseError(f"response is not JSON: {exc}") from exc
        try:
            hits = doc["result"]["hits"]
        except (KeyError, TypeError) as exc:
            raise SearchApiMalformedResponseError("no result.hits in response") from exc
        rows = hits.get("hit") or []   # DBLP omits the key entirely on zero hits
        if not isinstance(rows, list):
            raise SearchApiMalformedResponseError("result.hits.hit is not a list")
        out = []
        for row in rows:
            info = row.get("info") if isinstance(row, dict) else None
            if not isinstance(info, dict) or not info.get("url"):
                raise SearchApiMalformedResponseError("hit without info.url")
            try:
                score = float(row.get("@score", 0))
            except (TypeError, ValueError):
                score = 0.0
            out.append((score, info))
        return out

    @staticmethod
    def _label(info: dict, kind: str) -> str:
        value = info.get(_LABEL_FIELDS[kind])
        if isinstance(value, dict):
            value = value.get("text")
        if isinstance(value, list):
            value = ", ".join(v.get("text", str(v)) if isinstance(v, dict) else str(v)
                              for v in value)
        return str(value) if value else info["url"]

    def _query_kind(self, kind: str, query: str) -> list[tuple[float, str, dict]]:
        body = self._fetch(_API_PATHS[kind], query)
        return [(score, kind, info) for score, info in self._parse_hits(body, kind)]

    def link(self, mention: EntityMention) -> list[EntityCandidate]:
        """Ranked candidates for an entity mention; [] when nothing matches.
        A mention that is already a URI resolves to itself without a call."""
        if mention.source == "uri":
            kind = mention.kind if mention.kind in _KIND_ORDER else "publication"
            return [EntityCandidate(uri=mention.text, label=mention.text,
                                    kind=kind, score=1.0, rank=1)]
        if mention.kind in _KIND_ORDER:
            kinds = [mention.kind]
        elif mention.kind == "unknown":
            kinds = list(_KIND_ORDER)
        else:
            raise NotALiteralKindError(
                f"mention kind {mention.kind!r} is not linkable")
        scored = []
        for kind in kinds:
            scored.extend(self._query_kind(kind, mention.display))
        scored.sort(key=lambda s: (-s[0], _KIND_ORDER.index(s[1])))
        return [
            EntityCandidate(uri=info["url"], label=self._label(info, kind),
                            kind=kind, score=score, rank=i + 1)
            for i, (score, kind, info) in enumerate(scored)
        ]


def match_literal(mention: EntityMention) -> Term:
    """Literal mentions resolve locally: years stay integers, everything
    else becomes a quoted string."""
    if mention.kind == "literal-year":
        if not _YEAR_RE.match(mention.display):
            raise MalformedYearError(f"not a 4-digit year: {mention.display!r}")
        return Term("literal", mention.display)
    if mention.kind == "literal-string":
        escaped = mention.display.replace("\\", "\\\\").replace('"', '\\"')
        return Term("literal", f'"{escaped}"')
    raise NotALiteralKindError(f"mention kind {mention.kind!r} is not a literal")


def binding_term(candidate: EntityCandidate) -> Term:
    """What a chosen candidate contributes to the query.  Publications and
    people bind by URI; venues bind by their label, because the DBLP graph
    stores venues as literals (the candidate URL stays preview-only)."""
    if candidate.kind == "venue":
        escaped = candidate.label.replace("\\", "\\\\").replace('"', '\\"')
        return Term("literal", f'"{escaped}"')
    return Term("uri", candidate.uri)
