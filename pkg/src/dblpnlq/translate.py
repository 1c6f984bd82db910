"""Question to logical form, step one of the pipeline.

Two interchangeable translators: a deterministic rule-based one driven by
a pattern file (trigger cues + template + slot extractors), and an
adapter that posts the question to an external sequence-to-sequence model
service and re-parses the decoded tokens.  Model output that does not
parse is reported with the raw token text attached, so template
correction downstream can still work with it.
"""

from __future__ import annotations

import importlib.resources
import json
import re
import threading
from dataclasses import dataclass
from pathlib import Path

import requests

from .errors import (
    EmptyQuestionError,
    EndpointTimeoutError,
    EndpointUnavailableError,
    LogicalFormSyntaxError,
    MalformedModelOutputError,
    NoPatternMatchedError,
    PatternLoadError,
)
from .logicform import LogicalForm, Term, parse, placeholders_in_order, tokenize
from .sparqlgen import instantiate
from .vocab import Vocabulary


@dataclass
class TranslatorConfig:
    mode: str = "rule-based"            # rule-based | model-endpoint
    endpoint_url: str | None = None
    timeout_ms: int = 10000
    max_output_tokens: int = 512

    def __post_init__(self):
        if self.mode not in ("rule-based", "model-endpoint"):
            raise ValueError(f"bad translator mode {self.mode!r}")
        if (self.endpoint_url is not None) != (self.mode == "model-endpoint"):
            raise ValueError("endpoint_url goes with model-endpoint mode, only")
        if self.timeout_ms <= 0:
            raise ValueError("timeout_ms must be positive")
        if self.max_output_tokens < 1:
            raise ValueError("max_output_tokens must be positive")


# --- span extractors over the question text ---

_QUOTED_RE = re.compile(
    "\"([^\"]+)\"|“([^”]+)”|'([^']+)'|‘([^’]+)’")
_YEAR_RE = re.compile(r"\b((?:19|20)[0-9]{2})\b")
_RELATIVE_RE = re.compile(r"\blast\s+([0-9]+)\s+years?\b", re.IGNORECASE)
_NAME_TOKEN_RE = re.compile(r"^[A-Z][A-Za-z'’.\-]*$")
_ACRONYM_RE = re.compile(r"^[A-Z]{2,}[0-9]*$")
_FOUR_DIGITS = re.compile(r"^[0-9]{4}$")

# words that look capitalized at sentence starts but never name anyone
_STOPWORDS = frozenset("""
    what who whom which when where why how did does do is are was were has
    have had show list give me please enumerate find tell the a an of in on
    by and or with for to from at papers paper authors author venues venue
    published publish publications wrote write many much last years year all
    first other along their they them i
""".split())


def _strip(raw: str) -> str:
    return raw.strip(".,!?;:()[]{}\"'“”‘’")


def _quoted_spans(question: str) -> list[str]:
    out = []
    for m in _QUOTED_RE.finditer(question):
        span = next(g for g in m.groups() if g is not None)
        out.append(" ".join(span.split()))
    return out


def _proper_runs(question: str) -> list[str]:
    runs, current = [], []
    for raw in question.split():
        tok = _strip(raw)
        if tok and _NAME_TOKEN_RE.match(tok) and tok.lower() not in _STOPWORDS:
            current.append(tok)
        elif current:
            runs.append(" ".join(current))
            current = []
    if current:
        runs.append(" ".join(current))
    return runs


def _acronyms(question: str) -> list[str]:
    return [t for t in (_strip(r) for r in question.split()) if _ACRONYM_RE.match(t)]


def _years(question: str) -> list[str]:
    return _YEAR_RE.findall(question)


class _ExtractionFailed(Exception):
    pass


@dataclass(frozen=True)
class SlotRule:
    find: str           # quoted-span | proper-name | acronym | year | relative-year
    as_: str            # mention | string | year
    index: int = 1      # 1-based among matches of `find`

    def extract(self, question: str, reference_year: int) -> Term:
        if self.find == "quoted-span":
            spans = _quoted_spans(question)
        elif self.find == "proper-name":
            spans = _proper_runs(question)
        elif self.find == "acronym":
            spans = _acronyms(question)
        elif self.find == "year":
            spans = _years(question)
        elif self.find == "relative-year":
            m = _RELATIVE_RE.search(question)
            spans = [str(reference_year - int(m.group(1)))] if m else []
        else:
            raise PatternLoadError(f"unknown extractor {self.find!r}")
        if len(spans) < self.index:
            raise _ExtractionFailed()
        value = spans[self.index - 1]
        if self.as_ == "mention":
            return Term("mention", "_".join(value.split()))
        if self.as_ == "string":
            escaped = value.replace("\\", "\\\\").replace('"', '\\"')
            return Term("literal", f'"{escaped}"')
        if self.as_ == "year":
            if not _FOUR_DIGITS.match(value):
                raise _ExtractionFailed()
            return Term("literal", value)
        raise PatternLoadError(f"unknown slot kind {self.as_!r}")


@dataclass(frozen=True)
class QuestionPattern:
    name: str
    all_cues: tuple       # every cue must occur (lowercased substring match)
    any_cues: tuple       # at least one must occur, when non-empty
    none_cues: tuple      # none may occur
    template: LogicalForm
    slots: dict           # placeholder token -> SlotRule

    def triggers(self, question_lower: str) -> bool:
        if any(cue not in question_lower for cue in self.all_cues):
            return False
        if self.any_cues and not any(cue in question_lower for cue in self.any_cues):
            return False
        return not any(cue in question_lower for cue in self.none_cues)

    def signature(self) -> tuple:
        return (self.all_cues, self.any_cues, self.none_cues)


def load_patterns(path: str | Path, vocab: Vocabulary) -> list[QuestionPattern]:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise PatternLoadError(f"cannot read pattern file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise PatternLoadError(f"pattern file {path} is not JSON: {exc}") from exc
    rows = doc.get("patterns")
    if not isinstance(rows, list):
        raise PatternLoadError(f"pattern file {path} has no pattern list")
    patterns: list[QuestionPattern] = []
    seen_signatures = {}
    for i, row in enumerate(rows):
        where = f"pattern file {path} entry {i}"
        try:
            name = row["name"]
            trigger = row.get("trigger", {})
            template_text = row["template"]
            slot_rows = row.get("slots", {})
        except (TypeError, KeyError) as exc:
            raise PatternLoadError(f"{where}: missing {exc}") from exc
        try:
            template = parse(template_text, vocab)
        except LogicalFormSyntaxError as exc:
            raise PatternLoadError(f"{where}: template does not parse: {exc}") from exc
        slots = {}
        for token, rule in slot_rows.items():
            try:
                slots[token] = SlotRule(find=rule["find"], as_=rule["as"],
                                        index=int(rule.get("index", 1)))
            except (TypeError, KeyError, ValueError) as exc:
                raise PatternLoadError(f"{where}: bad slot {token}: {exc}") from exc
            if slots[token].find not in ("quoted-span", "proper-name", "acronym",
                                         "year", "relative-year"):
                raise PatternLoadError(f"{where}: unknown extractor {slots[token].find!r}")
            if slots[token].as_ not in ("mention", "string", "year"):
                raise PatternLoadError(f"{where}: unknown slot kind {slots[token].as_!r}")
        needed = set(placeholders_in_order(template))
        if needed != set(slots):
            raise PatternLoadError(
                f"{where}: placeholders {sorted(needed)} vs slot rules {sorted(slots)}")
        pattern = QuestionPattern(
            name=str(name),
            all_cues=tuple(str(c).lower() for c in trigger.get("all", ())),
            any_cues=tuple(str(c).lower() for c in trigger.get("any", ())),
            none_cues=tuple(str(c).lower() for c in trigger.get("none", ())),
            template=template,
            slots=slots,
        )
        if pattern.signature() in seen_signatures:
            raise PatternLoadError(
                f"{where}: trigger duplicates pattern "
                f"{seen_signatures[pattern.signature()]!r}")
        seen_signatures[pattern.signature()] = pattern.name
        patterns.append(pattern)
    return patterns


def load_default_patterns(vocab: Vocabulary) -> list[QuestionPattern]:
    source = importlib.resources.files("dblpnlq").joinpath("data/patterns.json")
    with importlib.resources.as_file(source) as path:
        return load_patterns(path, vocab)


class RuleBasedTranslator:
    """First triggered pattern whose slots all extract wins; extraction
    failures fall through to later patterns instead of guessing.

    ``reference_year`` anchors relative time phrases ("last 5 years") so
    translation stays a pure function of its inputs.
    """

    def __init__(self, patterns: list[QuestionPattern], vocab: Vocabulary,
                 reference_year: int = 2024):
        self.patterns = list(patterns)
        self.vocab = vocab
        self.reference_year = reference_year

    def list_patterns(self) -> list[QuestionPattern]:
        return list(self.patterns)

    def translate(self, question: str) -> LogicalForm:
        if not question or not question.strip():
            raise EmptyQuestionError("question is empty")
        lowered = question.lower()
        for pattern in self.patterns:
            if not pattern.triggers(lowered):
                continue
            try:
                bindings = {token: rule.extract(question, self.reference_year)
                            for token, rule in pattern.slots.items()}
            except _ExtractionFailed:
                continue
            return instantiate(pattern.template, bindings, self.vocab)
        raise NoPatternMatchedError(f"no pattern matches {question!r}")


def _default_transport(session: requests.Session):
    def send(url: str, payload: dict, timeout: float) -> tuple[int, str]:
        resp = session.post(url, json=payload, timeout=timeout)
        return resp.status_code, resp.text
    return send


class ModelEndpointTranslator:
    """Adapter for a hosted question-to-tokens model service.

    POST {"question": ...} -> {"tokens": ...}; the decoded token text is
    parsed into a LogicalForm.  In-flight requests are bounded by a
    semaphore so a burst of sessions cannot pile onto the model server.
    """

    def __init__(self, config: TranslatorConfig, vocab: Vocabulary,
                 transport=None, max_concurrency: int = 4):
        if config.mode != "model-endpoint":
            raise ValueError("config.mode must be model-endpoint")
        self.config = config
        self.vocab = vocab
        if transport is None:
            transport = _default_transport(requests.Session())
        self._send = transport
        self._slots = threading.BoundedSemaphore(max_concurrency)

    def list_patterns(self) -> list[QuestionPattern]:
        return []

    def translate(self, question: str) -> LogicalForm:
        if not question or not question.strip():
            raise EmptyQuestionError("question is empty")
        timeout = self.config.timeout_ms / 1000.0
        with self._slots:
            try:
                status, body = self._send(self.config.endpoint_url,
                                          {"question": question}, timeout)
            except requests.Timeout as exc:
                raise EndpointTimeoutError(f"model endpoint timed out: {exc}") from exc
            except requests.RequestException as exc:
                raise EndpointUnavailableError(
                    f"model endpoint unreachable: {exc}") from exc
        if status != 200:
            raise EndpointUnavailableError(f"model endpoint returned HTTP {status}")
        try:
            doc = json.loads(body)
            tokens = doc["tokens"]
        except (json.JSONDecodeError, TypeError, KeyError) as exc:
            raise EndpointUnavailableError(
                f"model endpoint response malformed: {exc}") from exc
        if not isinstance(tokens, str):
            raise EndpointUnavailableError("model endpoint tokens field is not text")
        if len(tokenize(tokens)) > self.config.max_output_tokens:
            raise MalformedModelOutputError(
                f"model output exceeds {self.config.max_output_tokens} tokens",
                raw_text=tokens)
        try:
            return parse(tokens, self.vocab)
        except LogicalFormSyntaxError as exc:
            raise MalformedModelOutputError(str(exc), raw_text=tokens) from exc
