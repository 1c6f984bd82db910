"""SPARQL endpoint client and the answer-table result model.

Results follow the SPARQL 1.1 JSON layout (head.vars + results.bindings,
or boolean for ASK).  ``parse_results`` and ``serialize_results`` are
inverse on that layout, which the fixture corpus pins down.  Fixture keys
hash the canonicalized query, so reformatting an edited query replays the
same recording.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import requests

from .errors import (
    DblpNlqError,
    EndpointTimeoutError,
    EndpointUnavailableError,
    FixtureMissError,
    MalformedResultsError,
    QueryRejectedError,
)
from .fixtures import FixtureStore, query_key
from .sparqlgen import normalize
from .vocab import Vocabulary

# GET keeps caches/proxies happy for typical queries; very long ones POST.
_GET_LIMIT = 2000


@dataclass(frozen=True)
class AnswerValue:
    value: str
    type: str = "literal"          # uri | literal | bnode
    lang: str | None = None
    datatype: str | None = None

    @property
    def is_uri(self) -> bool:
        return self.type == "uri"


@dataclass
class AnswerTable:
    columns: tuple
    rows: tuple                    # row = tuple of AnswerValue | None per column
    boolean: bool | None = None
    truncated: bool = False

    def column(self, name: str) -> list[str]:
        i = self.columns.index(name)
        return [row[i].value for row in self.rows if row[i] is not None]

    def values(self) -> set[str]:
        """Every cell value in the table, the answer set for scoring."""
        if self.boolean is not None:
            return {"true" if self.boolean else "false"}
        return {cell.value for row in self.rows for cell in row if cell is not None}


def parse_results(doc: dict) -> AnswerTable:
    if not isinstance(doc, dict):
        raise MalformedResultsError("results document is not an object")
    if "boolean" in doc:
        if not isinstance(doc["boolean"], bool):
            raise MalformedResultsError("boolean result is not a boolean")
        value = AnswerValue(value="true" if doc["boolean"] else "false")
        return AnswerTable(columns=("boolean",), rows=((value,),),
                           boolean=doc["boolean"])
    try:
        variables = doc["head"]["vars"]
        bindings = doc["results"]["bindings"]
    except (KeyError, TypeError) as exc:
        raise MalformedResultsError(f"missing {exc} in results document") from exc
    if not isinstance(variables, list) or not isinstance(bindings, list):
        raise MalformedResultsError("head.vars/results.bindings have wrong types")
    rows = []
    for binding in bindings:
        if not isinstance(binding, dict):
            raise MalformedResultsError("binding row is not an object")
        unknown = set(binding) - set(variables)
        if unknown:
            raise MalformedResultsError(
                f"binding for undeclared variable {sorted(unknown)[0]!r}")
        row = []
        for var in variables:
            cell = binding.get(var)
            if cell is None:
                row.append(None)
                continue
            try:
                row.append(AnswerValue(value=cell["value"], type=cell["type"],
                                       lang=cell.get("xml:lang"),
                                       datatype=cell.get("datatype")))
            except (KeyError, TypeError) as exc:
                raise MalformedResultsError(f"bad binding cell: {exc}") from exc
        rows.append(tuple(row))
    return AnswerTable(columns=tuple(variables), rows=tuple(rows))


def serialize_results(table: AnswerTable) -> dict:
    if table.boolean is not None:
        return {"head": {}, "boolean": table.boolean}
    bindings = []
    for row in table.rows:
        binding = {}
        for var, cell in zip(table.columns, row):
            if cell is None:
                continue
            out = {"type": cell.type, "value": cell.value}
            if cell.lang is not None:
                out["xml:lang"] = cell.lang
            if cell.datatype is not None:
                out["datatype"] = cell.datatype
            binding[var] = out
        bindings.append(binding)
    return {"head": {"vars": list(table.columns)},
            "results": {"bindings": bindings}}


@dataclass
class EndpointConfig:
    url: str = "https://dblp-kg.ltdemos.informatik.uni-hamburg.de/sparql"
    timeout: float = 30.0
    max_rows: int = 1000
    fixture_mode: str = "off"   # off | record | replay
    fixture_dir: str | None = None

    def __post_init__(self):
        if self.max_rows < 1:
            raise ValueError("max_rows must be positive")
        if self.fixture_mode not in ("off", "record", "replay"):
            raise ValueError(f"bad fixture_mode {self.fixture_mode!r}")
        if self.fixture_mode != "off" and not self.fixture_dir:
            raise ValueError("fixture_dir required when fixture_mode is not off")


def _default_transport(session: requests.Session):
    def send(method: str, url: str, query: str, timeout: float) -> tuple[int, str]:
        headers = {"Accept": "application/sparql-results+json"}
        if method == "GET":
            resp = session.get(url, params={"query": query}, headers=headers,
                               timeout=timeout)
        else:
            resp = session.post(url, data={"query": query}, headers=headers,
                                timeout=timeout)
        return resp.status_code, resp.text
    return send


class SparqlClient:
    def __init__(self, config: EndpointConfig, vocab: Vocabulary | None = None,
                 transport=None):
        self.config = config
        self.vocab = vocab
        self.store = FixtureStore(config.fixture_dir) if config.fixture_dir else None
        if transport is None:
            transport = _default_transport(requests.Session())
        self._send = transport

    def cache_text(self, sparql: str) -> str:
        """Canonical form for fixture keys; falls back to collapsed
        whitespace when the query is outside the subset grammar."""
        if self.vocab is not None:
            try:
                return normalize(sparql, self.vocab)
            except DblpNlqError:
                pass
        return " ".join(sparql.split())

    def execute(self, sparql: str) -> AnswerTable:
        key = query_key(self.cache_text(sparql))
        mode = self.config.fixture_mode
        if mode == "replay":
            doc = self.store.load(key)
            if doc is None:
                raise FixtureMissError(f"no recorded result for query key {key}")
            status, body = doc["status"], doc["body"]
        else:
            method = "GET" if len(sparql) < _GET_LIMIT else "POST"
            try:
                status, body = self._send(method, self.config.url, sparql,
                                          self.config.timeout)
            except requests.Timeout as exc:
                raise EndpointTimeoutError(f"endpoint timed out: {exc}") from exc
            except requests.RequestException as exc:
                raise EndpointUnavailableError(f"endpoint unreachable: {exc}") from exc
            if mode == "record":
                self.store.save(key, {"query": sparql}, status, body)
        if status == 400:
            raise QueryRejectedError(body.strip() or "endpoint rejected the query")
        if status != 200:
            raise EndpointUnavailableError(f"endpoint returned HTTP {status}")
        try:
            doc = json.loads(body)
        except json.JSONDecodeError as exc:
            raise MalformedResultsError(f"response is not JSON: {exc}") from exc
        table = parse_results(doc)
        if table.boolean is None and len(table.rows) > self.config.max_rows:
            table = AnswerTable(columns=table.columns,
                                rows=table.rows[: self.config.max_rows],
                                truncated=True)
        return table
