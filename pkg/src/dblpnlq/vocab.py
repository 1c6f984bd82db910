"""Token vocabulary of the logical-form language.

Keywords, structural tokens and comparison operators are fixed; the
relation tokens (``<authoredBy>`` etc.) are loaded from a schema manifest
file so the mapping onto predicate URIs can track DBLP schema changes
without a code edit.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import ManifestError

KEYWORDS = frozenset({
    "SELECT", "DISTINCT", "WHERE", "FILTER", "ASK", "COUNT", "GROUP", "BY",
    "ORDER", "LIMIT", "UNION", "BIND", "AS", "DESC", "ASC", "NOT", "EXISTS",
})

STRUCTURAL = frozenset({"{", "}", "(", ")", "<dot>"})

OPERATOR_TO_SPARQL = {
    "<is>": "=",
    "<isnot>": "!=",
    "<lt>": "<",
    "<gt>": ">",
    "<leq>": "<=",
    "<geq>": ">=",
}
SPARQL_TO_OPERATOR = {v: k for k, v in OPERATOR_TO_SPARQL.items()}
OPERATORS = frozenset(OPERATOR_TO_SPARQL)

PLACEHOLDER_RE = re.compile(r"^<topic([1-9][0-9]*)>$")

_URI_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.-]*://\S+$")
_RELATION_NAME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_-]*$")

ENTITY_KINDS = ("publication", "person", "venue")
LITERAL_KINDS = ("literal-year", "literal-string")
MENTION_KINDS = ENTITY_KINDS + LITERAL_KINDS + ("unknown",)

# Tie-break preference when slot votes conflict; publication is the most
# frequent entity kind in the DBLP data, so ties fall toward it.
KIND_PREFERENCE = ("publication", "person", "venue", "literal-year",
                   "literal-string", "unknown")


def is_absolute_uri(text: str) -> bool:
    return bool(_URI_RE.match(text))


def placeholder_token(index: int) -> str:
    return f"<topic{index}>"


def placeholder_index(token: str) -> int | None:
    m = PLACEHOLDER_RE.match(token)
    return int(m.group(1)) if m else None


@dataclass(frozen=True)
class RelationInfo:
    name: str
    uri: str
    subject_kind: str = "unknown"
    object_kind: str = "unknown"

    @property
    def token(self) -> str:
        return f"<{self.name}>"


@dataclass(frozen=True)
class Vocabulary:
    relations: dict          # angle token -> RelationInfo
    uri_to_relation: dict    # predicate URI -> angle token

    def is_relation(self, token: str) -> bool:
        return token in self.relations

    def relation_uri(self, token: str) -> str:
        return self.relations[token].uri

    def slot_kinds(self, token: str) -> tuple[str, str]:
        info = self.relations.get(token)
        if info is None:
            return ("unknown", "unknown")
        return (info.subject_kind, info.object_kind)


def _check_relation(name: str, uri: str, seen_uris: dict) -> None:
    if not _RELATION_NAME_RE.match(name):
        raise ManifestError(f"bad relation token {name!r}")
    token = f"<{name}>"
    if token in OPERATORS or token in STRUCTURAL or PLACEHOLDER_RE.match(token):
        raise ManifestError(f"relation token {token!r} collides with a reserved token")
    if name.upper() in KEYWORDS:
        raise ManifestError(f"relation token {name!r} collides with a keyword")
    if not is_absolute_uri(uri):
        raise ManifestError(f"relation {name!r} maps to non-absolute URI {uri!r}")
    if uri in seen_uris:
        raise ManifestError(f"URI {uri!r} mapped by both {seen_uris[uri]!r} and {name!r}")
    seen_uris[uri] = name


def _from_entries(entries: list) -> Vocabulary:
    relations, uri_to_relation, seen_uris = {}, {}, {}
    for info in entries:
        _check_relation(info.name, info.uri, seen_uris)
        if info.token in relations:
            raise ManifestError(f"duplicate relation token {info.name!r}")
        for kind in (info.subject_kind, info.object_kind):
            if kind not in MENTION_KINDS:
                raise ManifestError(f"relation {info.name!r}: unknown slot kind {kind!r}")
        relations[info.token] = info
        uri_to_relation[info.uri] = info.token
    return Vocabulary(relations=relations, uri_to_relation=uri_to_relation)


def load_manifest(path: str | Path) -> Vocabulary:
    """Load the relation manifest.

    Two formats are accepted: a JSON file with a ``relations`` object
    (token -> {uri, subject, object}), or a line-oriented file of
    ``token = URI`` pairs (slot kinds default to "unknown").
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc

    entries: list[RelationInfo] = []
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ManifestError(f"manifest {path} is not valid JSON: {exc}") from exc
        rels = doc.get("relations")
        if not isinstance(rels, dict):
            raise ManifestError(f"manifest {path} has no 'relations' object")
        for name, spec in rels.items():
            if isinstance(spec, str):
                entries.append(RelationInfo(name=name, uri=spec))
            elif isinstance(spec, dict) and "uri" in spec:
                entries.append(RelationInfo(
                    name=name,
                    uri=spec["uri"],
                    subject_kind=spec.get("subject", "unknown"),
                    object_kind=spec.get("object", "unknown"),
                ))
            else:
                raise ManifestError(f"relation {name!r}: expected URI string or object with 'uri'")
    else:
        seen_names = set()
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ManifestError(f"{path}:{lineno}: expected 'token = URI'")
            name, _, uri = line.partition("=")
            name, uri = name.strip(), uri.strip()
            if name in seen_names:
                raise ManifestError(f"{path}:{lineno}: duplicate relation token {name!r}")
            seen_names.add(name)
            entries.append(RelationInfo(name=name, uri=uri))
    return _from_entries(entries)


def load_default() -> Vocabulary:
    """The DBLP schema manifest shipped with the package."""
    with resources.as_file(resources.files("dblpnlq") / "data" / "relations.json") as p:
        return load_manifest(p)
