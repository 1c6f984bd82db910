"""Template base: abstracted gold queries and nearest-template retrieval.

Templates are gold training queries with their entities masked to
``<topicN>`` and variables canonically renamed.  A generated logical form
is corrected by snapping to the nearest template under normalized
token-level edit distance; forms that do not even parse are matched on
their raw token sequence, which is what repairs missing parentheses and
similar decoder slips.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

from .errors import (
    DblpNlqError,
    EmptyTemplateBaseError,
    FileUnreadableError,
    SchemaMismatchError,
)
from .logicform import (
    LogicalForm,
    parse,
    placeholders_in_order,
    serialize,
    tokenize,
)
from .mentions import EntityMention, mask_entities
from .sparqlgen import normalize_form, reverse_tokenize
from .vocab import Vocabulary


def token_edit_distance(a: Sequence[str], b: Sequence[str]) -> float:
    """Levenshtein over tokens, divided by max(len(a), len(b)).

    0.0 iff the sequences are equal (both empty included); symmetric.
    """
    if len(a) < len(b):
        a, b = b, a
    if not a:
        return 0.0
    if not b:
        return 1.0
    prev = list(range(len(b) + 1))
    for i, ta in enumerate(a, start=1):
        cur = [i] + [0] * len(b)
        for j, tb in enumerate(b, start=1):
            cur[j] = min(prev[j] + 1,
                         cur[j - 1] + 1,
                         prev[j - 1] + (ta != tb))
        prev = cur
    return prev[len(b)] / len(a)


def templatize(gold_sparql: str, vocab: Vocabulary) -> tuple[LogicalForm, list[EntityMention]]:
    """Gold SPARQL to (masked template form, lifted entities in topic order)."""
    form = parse(reverse_tokenize(gold_sparql, vocab), vocab)
    return mask_entities(normalize_form(form), vocab)


@dataclass(frozen=True)
class Template:
    form: LogicalForm
    placeholder_count: int
    frequency: int
    source_ids: tuple = ()

    def __post_init__(self):
        expected = [f"<topic{i + 1}>" for i in range(self.placeholder_count)]
        if placeholders_in_order(self.form) != expected:
            raise SchemaMismatchError(
                f"template placeholders are not <topic1>..<topic{self.placeholder_count}>")
        if self.frequency < 1:
            raise SchemaMismatchError("template frequency below 1")

    @cached_property
    def text(self) -> str:
        return serialize(self.form)

    @cached_property
    def tokens(self) -> tuple:
        return tuple(tokenize(self.text))


@dataclass(frozen=True)
class TemplateMatch:
    template: Template
    distance: float
    rank: int


@dataclass
class BuildReport:
    total: int
    built: int
    skipped: list = field(default_factory=list)   # (item id, reason) pairs


@dataclass
class TemplateBase:
    templates: list
    built_from: str = ""
    item_count: int = 0

    def retrieve(self, masked, k: int = 5) -> list:
        """Top-k nearest templates, ascending distance; ties go to the
        more frequent template, then lexicographic serialization order.

        ``masked`` is a placeholder-bearing LogicalForm, or a raw token
        sequence when the generated output did not parse.
        """
        if not self.templates:
            raise EmptyTemplateBaseError("template base has no templates")
        if k < 1:
            raise ValueError(f"k must be positive, got {k}")
        if isinstance(masked, LogicalForm):
            tokens = tokenize(serialize(normalize_form(masked)))
        else:
            tokens = list(masked)
        scored = sorted(
            ((token_edit_distance(tokens, t.tokens), -t.frequency, t.text, t)
             for t in self.templates),
            key=lambda s: s[:3])
        return [TemplateMatch(template=t, distance=d, rank=i + 1)
                for i, (d, _f, _x, t) in enumerate(scored[:k])]

    def save(self, path: str | Path) -> None:
        doc = {
            "built_from": self.built_from,
            "item_count": self.item_count,
            "templates": [
                {"text": t.text, "placeholder_count": t.placeholder_count,
                 "frequency": t.frequency, "source_ids": list(t.source_ids)}
                for t in self.templates
            ],
        }
        Path(path).write_text(json.dumps(doc, indent=1))

    @classmethod
    def load(cls, path: str | Path, vocab: Vocabulary) -> "TemplateBase":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise FileUnreadableError(f"cannot read template base {path}: {exc}") from exc
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaMismatchError(f"template base {path} is not JSON: {exc}") from exc
        if not isinstance(doc, dict) or not isinstance(doc.get("templates"), list):
            raise SchemaMismatchError(f"template base {path} has no template list")
        templates = []
        seen = set()
        for i, row in enumerate(doc["templates"]):
            try:
                form = parse(row["text"], vocab)
                template = Template(
                    form=form,
                    placeholder_count=int(row["placeholder_count"]),
                    frequency=int(row["frequency"]),
                    source_ids=tuple(row.get("source_ids", ())),
                )
            except (KeyError, TypeError, ValueError, DblpNlqError) as exc:
                raise SchemaMismatchError(
                    f"template base {path} entry {i}: {exc}") from exc
            if template.text in seen:
                raise SchemaMismatchError(
                    f"template base {path} entry {i}: duplicate template")
            seen.add(template.text)
            templates.append(template)
        return cls(templates=templates,
                   built_from=str(doc.get("built_from", "")),
                   item_count=int(doc.get("item_count", 0)))


def build_template_base(gold_items: Iterable[tuple[str, str]], vocab: Vocabulary,
                        dataset_name: str = "") -> tuple[TemplateBase, BuildReport]:
    """Deduplicate the templatized gold queries; unparseable items are
    skipped and itemized in the report, never fatal."""
    merged: dict[str, dict] = {}
    skipped: list[tuple[str, str]] = []
    total = 0
    for item_id, sparql in gold_items:
        total += 1
        try:
            masked, _mentions = templatize(sparql, vocab)
        except DblpNlqError as exc:
            skipped.append((str(item_id), f"{exc.code}: {exc.message}"))
            continue
        text = serialize(masked)
        entry = merged.setdefault(text, {"form": masked, "count": 0, "ids": []})
        entry["count"] += 1
        entry["ids"].append(str(item_id))
    templates = [
        Template(form=e["form"],
                 placeholder_count=len(placeholders_in_order(e["form"])),
                 frequency=e["count"],
                 source_ids=tuple(e["ids"]))
        for e in merged.values()
    ]
    templates.sort(key=lambda t: (-t.frequency, t.text))
    base = TemplateBase(templates=templates, built_from=dataset_name, item_count=total)
    return base, BuildReport(total=total, built=total - len(skipped), skipped=skipped)
