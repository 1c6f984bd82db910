"""Human-on-the-loop orchestration of the four-step pipeline.

A session runs translate -> link -> retrieve -> instantiate -> execute
once, then lets the user re-tick entity candidates and templates or edit
the query text; only the stages downstream of the change recompute.
Stage failures are recorded in the state (never raised out of the
pipeline) so the UI can always render every section.
"""

from __future__ import annotations

import importlib.resources
import json
import threading
import time
import uuid
from collections import OrderedDict
from dataclasses import dataclass, field

from .config import Components
from .endpoint import AnswerTable
from .errors import (
    DblpNlqError,
    EmptyQuestionError,
    IndexOutOfRangeError,
    MalformedModelOutputError,
    UnknownSessionError,
)
from .linking import EntityCandidate, binding_term, match_literal
from .logicform import (
    LogicalForm,
    parse,
    placeholders_in_order,
    serialize,
    tokenize,
)
from .mentions import mask_entities, scan_raw_tokens
from .sparqlgen import instantiate, reverse_tokenize, to_sparql, validate
from .vocab import LITERAL_KINDS, placeholder_index

STAGES = ("translator", "linker", "templates", "query", "execution")


@dataclass
class MentionRow:
    mention: object                 # EntityMention
    candidates: list = field(default_factory=list)
    selected_index: int = 0
    error: str | None = None        # error code when lookup failed

    def to_dict(self) -> dict:
        m = self.mention
        return {
            "text": m.text, "kind": m.kind, "display": m.display,
            "source": m.source,
            "candidates": [
                {"uri": c.uri, "label": c.label, "kind": c.kind,
                 "score": c.score, "rank": c.rank}
                for c in self.candidates
            ],
            "selected_index": self.selected_index,
            "error": self.error,
        }


@dataclass
class ExampleQuestion:
    text: str
    note: str = ""

    def to_dict(self) -> dict:
        return {"text": self.text, "note": self.note}


def _answers_to_dict(table: AnswerTable) -> dict:
    rows = []
    for row in table.rows:
        cells = []
        for cell in row:
            if cell is None:
                cells.append(None)
                continue
            out = {"value": cell.value, "type": cell.type}
            if cell.lang is not None:
                out["lang"] = cell.lang
            if cell.datatype is not None:
                out["datatype"] = cell.datatype
            cells.append(out)
        rows.append(cells)
    return {"columns": list(table.columns), "rows": rows,
            "boolean": table.boolean, "truncated": table.truncated}


@dataclass
class SessionState:
    id: str
    question: str
    revision: int = 0
    logical_form: LogicalForm | None = None
    raw_tokens: str | None = None       # model text kept when parsing failed
    parse_error: str | None = None
    masked_form: LogicalForm | None = None
    masked_tokens: tuple | None = None  # fallback probe from raw tokens
    mentions: list = field(default_factory=list)
    template_matches: list = field(default_factory=list)
    selected_template: int = 0
    query_text: str | None = None
    query_origin: str | None = None     # generated | user-edited
    query_warnings: list = field(default_factory=list)
    answers: AnswerTable | None = None
    stage_errors: dict = field(default_factory=dict)
    skipped: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "question": self.question,
            "revision": self.revision,
            "logical_form": {
                "text": serialize(self.logical_form)
                        if self.logical_form is not None else None,
                "raw_tokens": self.raw_tokens,
                "parse_error": self.parse_error,
            },
            "mentions": [row.to_dict() for row in self.mentions],
            "templates": [
                {"rank": tm.rank, "distance": tm.distance,
                 "text": tm.template.text,
                 "placeholder_count": tm.template.placeholder_count,
                 "frequency": tm.template.frequency}
                for tm in self.template_matches
            ],
            "selected_template": self.selected_template,
            "query": {"sparql": self.query_text, "origin": self.query_origin,
                      "warnings": list(self.query_warnings)},
            "answers": _answers_to_dict(self.answers)
                       if self.answers is not None else None,
            "stage_errors": {k: dict(v) for k, v in self.stage_errors.items()},
            "skipped": list(self.skipped),
        }


def _record(state: SessionState, stage: str, err: DblpNlqError) -> None:
    state.stage_errors[stage] = err.to_dict()


def _skip_from(state: SessionState, stage: str) -> None:
    for name in STAGES[STAGES.index(stage):]:
        if name not in state.skipped:
            state.skipped.append(name)


def _run_translator(components: Components, state: SessionState) -> bool:
    try:
        state.logical_form = components.translator.translate(state.question)
        return True
    except MalformedModelOutputError as exc:
        # near-miss model output: keep the raw tokens so template
        # correction downstream can still snap them to a known shape
        _record(state, "translator", exc)
        state.raw_tokens = exc.raw_text
        state.parse_error = exc.message
        return True
    except DblpNlqError as exc:
        _record(state, "translator", exc)
        return False


def _run_linker(components: Components, state: SessionState) -> None:
    if state.logical_form is not None:
        state.masked_form, found = mask_entities(state.logical_form,
                                                 components.vocab)
    else:
        toks, found = scan_raw_tokens(tokenize(state.raw_tokens or ""),
                                      components.vocab)
        state.masked_tokens = tuple(toks)
    rows = []
    for mention in found:
        row = MentionRow(mention=mention)
        try:
            if mention.kind in LITERAL_KINDS:
                match_literal(mention)  # validates; binding recomputed later
                row.candidates = [EntityCandidate(
                    uri="", label=mention.display, kind=mention.kind,
                    score=1.0, rank=1)]
            else:
                row.candidates = list(
                    components.search.link(mention)[:components.display_count])
        except DblpNlqError as exc:
            # flag the row, keep going: one dead lookup must not take
            # down the session
            row.error = exc.code
            if "linker" not in state.stage_errors:
                _record(state, "linker", exc)
        rows.append(row)
    state.mentions = rows


def _run_templates(components: Components, state: SessionState) -> bool:
    probe = (state.masked_form if state.masked_form is not None
             else list(state.masked_tokens or ()))
    try:
        state.template_matches = components.template_base.retrieve(
            probe, k=components.retrieve_k)
        return True
    except DblpNlqError as exc:
        _record(state, "templates", exc)
        return False


def _active_base_form(state: SessionState) -> LogicalForm:
    chosen = state.template_matches[state.selected_template]
    # perfect retrieval keeps the generated form (original variable
    # names) as long as the default rank-1 tick stands
    if (state.selected_template == 0 and state.masked_form is not None
            and chosen.distance == 0.0):
        return state.masked_form
    return chosen.template.form


def _mention_binding(row: MentionRow):
    mention = row.mention
    if mention.kind in LITERAL_KINDS:
        try:
            return match_literal(mention)
        except DblpNlqError:
            return None
    if not row.candidates:
        return None
    index = min(row.selected_index, len(row.candidates) - 1)
    return binding_term(row.candidates[index])


def _collect_bindings(state: SessionState, form: LogicalForm) -> dict:
    bindings = {}
    for token in placeholders_in_order(form):
        position = (placeholder_index(token) or 0) - 1
        if 0 <= position < len(state.mentions):
            term = _mention_binding(state.mentions[position])
            if term is not None:
                bindings[token] = term
    return bindings


def _run_query(components: Components, state: SessionState) -> bool:
    form = _active_base_form(state)
    try:
        instantiated = instantiate(form, _collect_bindings(state, form),
                                   components.vocab)
    except DblpNlqError as exc:
        _record(state, "query", exc)
        state.query_text = None
        state.query_origin = None
        state.query_warnings = []
        return False
    state.query_text = to_sparql(instantiated, components.vocab)
    state.query_origin = "generated"
    state.query_warnings = validate(instantiated, components.vocab)
    return True


def _run_execution(components: Components, state: SessionState) -> bool:
    try:
        state.answers = components.sparql.execute(state.query_text)
        return True
    except DblpNlqError as exc:
        _record(state, "execution", exc)
        state.answers = None
        return False


def populate(components: Components, state: SessionState) -> None:
    """Full pipeline for a fresh question; failures land in stage_errors."""
    if not _run_translator(components, state):
        _skip_from(state, "linker")
        return
    _run_linker(components, state)
    if not _run_templates(components, state):
        _skip_from(state, "query")
        return
    if not _run_query(components, state):
        _skip_from(state, "execution")
        return
    _run_execution(components, state)


def _clear_downstream(state: SessionState) -> None:
    state.stage_errors.pop("query", None)
    state.stage_errors.pop("execution", None)
    state.skipped = [s for s in state.skipped
                     if s not in ("query", "execution")]


def recompute_query(components: Components, state: SessionState) -> None:
    """Re-instantiate + re-execute after a selection change."""
    _clear_downstream(state)
    if not state.template_matches:
        return
    if not _run_query(components, state):
        state.answers = None
        _skip_from(state, "execution")
        return
    _run_execution(components, state)


class _Entry:
    __slots__ = ("state", "lock", "touched")

    def __init__(self, state: SessionState, touched: float):
        self.state = state
        self.lock = threading.Lock()
        self.touched = touched


class SessionStore:
    """In-memory sessions: TTL + cap eviction, per-session mutation locks."""

    def __init__(self, components: Components, ttl_s: float = 3600.0,
                 cap: int = 200, clock=time.monotonic):
        if ttl_s <= 0 or cap < 1:
            raise ValueError("ttl_s must be positive and cap at least 1")
        self.components = components
        self.ttl_s = ttl_s
        self.cap = cap
        self._clock = clock
        self._lock = threading.Lock()
        self._entries: OrderedDict[str, _Entry] = OrderedDict()

    def _entry(self, session_id: str) -> _Entry:
        now = self._clock()
        with self._lock:
            entry = self._entries.get(session_id)
            if entry is None or now - entry.touched > self.ttl_s:
                self._entries.pop(session_id, None)
                raise UnknownSessionError(f"no session {session_id!r}")
            entry.touched = now
            self._entries.move_to_end(session_id)
            return entry

    def create(self, question: str) -> SessionState:
        if not question or not question.strip():
            raise EmptyQuestionError("question is empty")
        state = SessionState(id=uuid.uuid4().hex, question=question)
        populate(self.components, state)
        state.revision = 1
        now = self._clock()
        with self._lock:
            for sid in [s for s, e in self._entries.items()
                        if now - e.touched > self.ttl_s]:
                del self._entries[sid]
            self._entries[state.id] = _Entry(state, now)
            while len(self._entries) > self.cap:
                self._entries.popitem(last=False)
        return state

    def get(self, session_id: str) -> SessionState:
        entry = self._entry(session_id)
        with entry.lock:
            return entry.state

    def select_entity(self, session_id: str, mention_index: int,
                      candidate_index: int) -> SessionState:
        entry = self._entry(session_id)
        with entry.lock:
            state = entry.state
            if not 0 <= mention_index < len(state.mentions):
                raise IndexOutOfRangeError(
                    f"mention_index {mention_index} out of range")
            row = state.mentions[mention_index]
            if not 0 <= candidate_index < len(row.candidates):
                raise IndexOutOfRangeError(
                    f"candidate_index {candidate_index} out of range")
            row.selected_index = candidate_index
            if state.query_origin != "user-edited":
                recompute_query(self.components, state)
            state.revision += 1
            return state

    def select_template(self, session_id: str,
                        template_index: int) -> SessionState:
        entry = self._entry(session_id)
        with entry.lock:
            state = entry.state
            if not 0 <= template_index < len(state.template_matches):
                raise IndexOutOfRangeError(
                    f"template_index {template_index} out of range")
            state.selected_template = template_index
            if state.query_origin != "user-edited":
                recompute_query(self.components, state)
            state.revision += 1
            return state

    def run_query(self, session_id: str, sparql_text: str) -> SessionState:
        if not sparql_text or not sparql_text.strip():
            raise EmptyQuestionError("query text is empty")
        entry = self._entry(session_id)
        with entry.lock:
            state = entry.state
            _clear_downstream(state)
            state.query_text = sparql_text
            state.query_origin = "user-edited"
            state.query_warnings = self._edit_warnings(sparql_text)
            if not _run_execution(self.components, state):
                state.answers = None
            state.revision += 1
            return state

    def _edit_warnings(self, sparql_text: str) -> list:
        try:
            form = parse(reverse_tokenize(sparql_text, self.components.vocab),
                         self.components.vocab)
        except DblpNlqError as exc:
            return [f"query does not fit the supported shape: {exc.message}"]
        return validate(form, self.components.vocab)

    def regenerate(self, session_id: str) -> SessionState:
        entry = self._entry(session_id)
        with entry.lock:
            state = entry.state
            recompute_query(self.components, state)
            state.revision += 1
            return state


def load_default_examples() -> list[ExampleQuestion]:
    source = importlib.resources.files("dblpnlq").joinpath("data/examples.json")
    with importlib.resources.as_file(source) as path:
        rows = json.loads(path.read_text())
    return [ExampleQuestion(text=r["text"], note=r.get("note", ""))
            for r in rows["examples"]]
