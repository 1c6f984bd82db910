"""Answer-set precision/recall/F1 over a question/SPARQL dataset.

Two modes: `full` drives the whole pipeline from the question text;
`gold-lf` bypasses translation by templatizing the gold query and
re-instantiating it with the gold query's own entity bindings, which
isolates the linking/template/execution steps.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .config import Components
from .errors import DblpNlqError, FileUnreadableError, SchemaMismatchError
from .session import STAGES, SessionState, populate
from .sparqlgen import instantiate, to_sparql
from .templates import templatize
from .vocab import placeholder_token


@dataclass(frozen=True)
class DatasetItem:
    id: str
    question: str
    gold_query: str
    gold_answers: frozenset


def _canonical_answer(value, where: str) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    if isinstance(value, (int, float)):
        return str(value)
    raise SchemaMismatchError(f"{where}: unsupported answer value {value!r}")


def load_dataset(path: str | Path) -> list[DatasetItem]:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise FileUnreadableError(f"cannot read dataset {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FileUnreadableError(f"dataset {path} is not JSON: {exc}") from exc
    rows = doc.get("questions") if isinstance(doc, dict) else None
    if not isinstance(rows, list):
        raise SchemaMismatchError(f"dataset {path}: no questions list")
    items, seen = [], set()
    for i, row in enumerate(rows):
        where = f"questions[{i}]"
        if not isinstance(row, dict):
            raise SchemaMismatchError(f"{where}: not an object")
        item_id = row.get("id")
        if not isinstance(item_id, str) or not item_id:
            raise SchemaMismatchError(f"{where}.id: missing or not a string")
        if item_id in seen:
            raise SchemaMismatchError(f"{where}.id: duplicate id {item_id!r}")
        seen.add(item_id)
        question = row.get("question", {})
        text = question.get("string") if isinstance(question, dict) else None
        if not isinstance(text, str) or not text:
            raise SchemaMismatchError(
                f"{where}.question.string: missing for id {item_id!r}")
        query = row.get("query", {})
        sparql = query.get("sparql") if isinstance(query, dict) else None
        if not isinstance(sparql, str) or not sparql:
            raise SchemaMismatchError(
                f"{where}.query.sparql: missing for id {item_id!r}")
        answers = row.get("answers")
        if not isinstance(answers, list):
            raise SchemaMismatchError(
                f"{where}.answers: missing for id {item_id!r}")
        gold = frozenset(
            _canonical_answer(v, f"{where}.answers[{j}]")
            for j, v in enumerate(answers))
        items.append(DatasetItem(id=item_id, question=text,
                                 gold_query=sparql, gold_answers=gold))
    return items


def score(predicted: set, gold: set) -> tuple[float, float, float]:
    """P = |inter|/|pred|, R = |inter|/|gold|, F1 harmonic; both empty
    counts as a perfect (1, 1, 1), a stated convention, kept in one place."""
    if not predicted and not gold:
        return (1.0, 1.0, 1.0)
    overlap = len(set(predicted) & set(gold))
    precision = overlap / len(predicted) if predicted else 0.0
    recall = overlap / len(gold) if gold else 0.0
    if precision + recall == 0:
        return (precision, recall, 0.0)
    return (precision, recall,
            2 * precision * recall / (precision + recall))


@dataclass(frozen=True)
class ItemScore:
    id: str
    precision: float
    recall: float
    f1: float
    error: str | None = None

    def to_dict(self) -> dict:
        return {"id": self.id, "precision": self.precision,
                "recall": self.recall, "f1": self.f1, "error": self.error}


@dataclass
class ScoreReport:
    per_item: list = field(default_factory=list)
    macro_precision: float = 0.0
    macro_recall: float = 0.0
    macro_f1: float = 0.0
    mode: str = "full"

    def to_dict(self) -> dict:
        return {"mode": self.mode,
                "macro_precision": self.macro_precision,
                "macro_recall": self.macro_recall,
                "macro_f1": self.macro_f1,
                "items": [s.to_dict() for s in self.per_item]}

    def summary(self) -> str:
        lines = [f"{'id':<12} {'P':>7} {'R':>7} {'F1':>7}  error",
                 "-" * 48]
        for s in self.per_item:
            lines.append(f"{s.id:<12} {s.precision:>7.3f} {s.recall:>7.3f} "
                         f"{s.f1:>7.3f}  {s.error or ''}")
        lines.append("-" * 48)
        lines.append(f"{'macro':<12} {self.macro_precision:>7.3f} "
                     f"{self.macro_recall:>7.3f} {self.macro_f1:>7.3f}  "
                     f"({len(self.per_item)} items, mode={self.mode})")
        return "\n".join(lines)


def run_full(components: Components, question: str) -> tuple[set, str | None]:
    """Headless question -> answer set; (empty set, error tag) on failure."""
    state = SessionState(id="eval", question=question)
    populate(components, state)
    if state.answers is not None:
        return state.answers.values(), None
    for stage in STAGES:
        if stage in state.stage_errors:
            return set(), state.stage_errors[stage]["error"]
    return set(), "NoAnswers"


def run_gold_lf(components: Components,
                item: DatasetItem) -> tuple[set, str | None]:
    """Gold query -> template -> re-instantiated with the gold bindings
    -> executed; exercises everything but the translator."""
    try:
        masked, mentions = templatize(item.gold_query, components.vocab)
        bindings = {placeholder_token(i + 1): m.term()
                    for i, m in enumerate(mentions)}
        sparql = to_sparql(instantiate(masked, bindings, components.vocab),
                           components.vocab)
        table = components.sparql.execute(sparql)
    except DblpNlqError as exc:
        return set(), exc.code
    return table.values(), None


def evaluate(components: Components, items: list[DatasetItem],
             mode: str = "full") -> ScoreReport:
    if mode not in ("full", "gold-lf"):
        raise ValueError(f"unknown eval mode {mode!r}")
    scored = []
    for item in items:
        if mode == "full":
            predicted, tag = run_full(components, item.question)
        else:
            predicted, tag = run_gold_lf(components, item)
        p, r, f1 = score(predicted, item.gold_answers)
        scored.append(ItemScore(id=item.id, precision=p, recall=r,
                                f1=f1, error=tag))
    scored.sort(key=lambda s: s.id)
    report = ScoreReport(per_item=scored, mode=mode)
    if scored:
        n = len(scored)
        report.macro_precision = sum(s.precision for s in scored) / n
        report.macro_recall = sum(s.recall for s in scored) / n
        report.macro_f1 = sum(s.f1 for s in scored) / n
    return report
