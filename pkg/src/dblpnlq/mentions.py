"""Finding and masking the entity mentions inside a logical form.

A term is liftable when it stands for something the linker can resolve: a
surface mention, a bare URI, a quoted string, or a four-digit year.  Other
integers (counts, limits) are structural and stay in place.

The mention kind is voted by the slots the term occupies: each relation
declares what lives in its subject and object positions.  Ties fall back
to a fixed preference order, and terms that only occur inside filters
keep the kind their shape implies (years, quoted strings) or "unknown".
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass

from .logicform import LogicalForm, Term, iter_terms, map_terms
from .vocab import (
    KEYWORDS,
    KIND_PREFERENCE,
    OPERATORS,
    PLACEHOLDER_RE,
    STRUCTURAL,
    Vocabulary,
    is_absolute_uri,
    placeholder_token,
)

_YEAR_RE = re.compile(r"^[0-9]{4}$")
_INTEGER_RE = re.compile(r"^[0-9]+$")
_ANGLE_RE = re.compile(r"^<[^<>\s]+>$")


@dataclass(frozen=True)
class EntityMention:
    text: str     # surface token exactly as it appears in the form
    kind: str     # publication | person | venue | literal-year | literal-string | unknown
    source: str   # "mention" | "uri" | "literal"

    @property
    def display(self) -> str:
        """Human-readable text: underscores back to spaces, quotes stripped."""
        if self.source == "mention":
            return self.text.replace("_", " ")
        if self.source == "literal" and self.text.startswith('"'):
            return self.text[1:-1].replace('\\"', '"').replace("\\\\", "\\")
        return self.text

    def term(self) -> Term:
        """The mention as a logical-form term, for re-instantiation."""
        return Term(self.source, self.text)


def classify_token(token: str) -> tuple[str, str | None] | None:
    """(source, shape_kind) when the token is liftable, else None.

    Works on raw tokens so the same rules apply to parsed forms and to
    unparseable model output.
    """
    if not token or token.startswith("?"):
        return None
    if token.startswith('"'):
        if len(token) >= 2 and token.endswith('"'):
            return ("literal", "literal-string")
        return None
    if _YEAR_RE.match(token):
        return ("literal", "literal-year")
    if _INTEGER_RE.match(token):
        return None
    if is_absolute_uri(token):
        return ("uri", None)
    if token in STRUCTURAL or token in OPERATORS or _ANGLE_RE.match(token):
        return None
    if token.upper() in KEYWORDS:
        return None
    if any(c in token for c in '{}()<>"'):
        return None
    return ("mention", None)


def _decide_kind(slot_votes: list[str], shape_kind: str | None) -> str:
    votes = [v for v in slot_votes if v != "unknown"]
    if not votes:
        return shape_kind or "unknown"
    counts = Counter(votes)
    top = max(counts.values())
    tied = [k for k, c in counts.items() if c == top]
    return min(tied, key=KIND_PREFERENCE.index)


class _Scan:
    def __init__(self):
        self.order: list[str] = []
        self.source: dict[str, str] = {}
        self.shape: dict[str, str | None] = {}
        self.votes: dict[str, list[str]] = {}

    def see(self, text: str, source: str, shape_kind: str | None):
        if text not in self.source:
            self.order.append(text)
            self.source[text] = source
            self.shape[text] = shape_kind
            self.votes[text] = []

    def vote(self, text: str, kind: str):
        self.votes[text].append(kind)

    def mentions(self) -> list[EntityMention]:
        return [
            EntityMention(text=t, kind=_decide_kind(self.votes[t], self.shape[t]),
                          source=self.source[t])
            for t in self.order
        ]

    def placeholder_map(self, start: int = 1) -> dict[str, str]:
        return {t: placeholder_token(start + i) for i, t in enumerate(self.order)}


def _scan_form(form: LogicalForm, vocab: Vocabulary) -> _Scan:
    scan = _Scan()
    for term, relation, slot in iter_terms(form):
        lift = classify_token(term.text)
        if lift is None or term.kind == "variable":
            continue
        source, shape_kind = lift
        scan.see(term.text, source, shape_kind)
        if relation is not None:
            subject_kind, object_kind = vocab.slot_kinds(relation)
            scan.vote(term.text, subject_kind if slot == "subject" else object_kind)
    return scan


def extract_mentions(form: LogicalForm, vocab: Vocabulary) -> list[EntityMention]:
    """Liftable terms in first-appearance order, with voted kinds."""
    return _scan_form(form, vocab).mentions()


def _next_free_index(existing: list[str]) -> int:
    from .vocab import placeholder_index
    taken = [placeholder_index(p) or 0 for p in existing]
    return max(taken, default=0) + 1


def mask_entities(form: LogicalForm, vocab: Vocabulary) -> tuple[LogicalForm, list[EntityMention]]:
    """Replace every liftable term with ``<topicN>``, numbering distinct
    terms by first appearance.  Mention i corresponds to ``<topic{i+1}>``.
    Placeholders already present keep their numbers; fresh ones start
    after the highest taken index."""
    from .logicform import placeholders_in_order
    scan = _scan_form(form, vocab)
    mapping = scan.placeholder_map(start=_next_free_index(placeholders_in_order(form)))

    def swap(term: Term) -> Term:
        if term.kind == "variable" or term.text not in mapping:
            return term
        if classify_token(term.text) is None:
            return term
        return Term("placeholder", mapping[term.text])

    return map_terms(form, swap), scan.mentions()


def scan_raw_tokens(tokens: list[str], vocab: Vocabulary) -> tuple[list[str], list[EntityMention]]:
    """The masking pass for model output that failed to parse.

    Slot kinds are guessed from adjacent relation tokens: a liftable token
    right before a relation occupies its subject slot, right after it the
    object slot.
    """
    scan = _Scan()
    lifts: list[tuple[int, str] | None] = []
    for i, tok in enumerate(tokens):
        lift = classify_token(tok)
        lifts.append((i, tok) if lift else None)
        if lift is None:
            continue
        source, shape_kind = lift
        scan.see(tok, source, shape_kind)
        if i + 1 < len(tokens) and vocab.is_relation(tokens[i + 1]):
            scan.vote(tok, vocab.slot_kinds(tokens[i + 1])[0])
        if i > 0 and vocab.is_relation(tokens[i - 1]):
            scan.vote(tok, vocab.slot_kinds(tokens[i - 1])[1])
    existing = [t for t in tokens if PLACEHOLDER_RE.match(t)]
    mapping = scan.placeholder_map(start=_next_free_index(existing))
    masked = [mapping.get(tok, tok) if lifts[i] else tok for i, tok in enumerate(tokens)]
    return masked, scan.mentions()
