"""The intermediate logical-form language.

Forms look like whitespace-tokenized SPARQL with three twists: predicates
are angle-bracket relation tokens (``<authoredBy>``), comparison operators
are spelled as tokens (``<is>``, ``<isnot>``, ...), and the triple
separator is the token ``<dot>``.  Entities appear either as
underscore-joined surface mentions (``the_BERT_paper``), as bare URIs, or
as ``<topicN>`` placeholders in masked templates.

``parse`` and ``serialize`` are exact inverses on canonical forms:
``parse(serialize(f)) == f`` for every well-formed ``f``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from .errors import (
    EmptyInputError,
    UnbalancedDelimiterError,
    UnexpectedTokenError,
    UnknownRelationTokenError,
)
from .vocab import (
    KEYWORDS,
    OPERATORS,
    PLACEHOLDER_RE,
    STRUCTURAL,
    Vocabulary,
    is_absolute_uri,
)

_TOKEN_RE = re.compile(r'"(?:[^"\\]|\\.)*"|\S+')
_VARIABLE_RE = re.compile(r"^\?[A-Za-z_][A-Za-z0-9_]*$")
_INTEGER_RE = re.compile(r"^[0-9]+$")
_ANGLE_RE = re.compile(r"^<[^<>\s]+>$")

TERM_KINDS = ("variable", "mention", "literal", "uri", "placeholder")


def tokenize(text: str) -> list[str]:
    """Split logical-form text into tokens; quoted strings keep spaces."""
    return _TOKEN_RE.findall(text)


@dataclass(frozen=True)
class Term:
    kind: str   # one of TERM_KINDS
    text: str   # variables keep '?', literals keep quotes, URIs are bare

    def token(self) -> str:
        return self.text


@dataclass(frozen=True)
class TriplePattern:
    subject: Term
    relation: str   # angle token, e.g. "<authoredBy>"
    object: Term


@dataclass(frozen=True)
class FilterComparison:
    lhs: Term
    op: str         # operator token, e.g. "<isnot>"
    rhs: Term


@dataclass(frozen=True)
class FilterNotExists:
    items: tuple


@dataclass(frozen=True)
class UnionBlock:
    branches: tuple   # tuple of item tuples, at least two


@dataclass(frozen=True)
class BindAssign:
    value: Term
    variable: str


@dataclass(frozen=True)
class CountAggregate:
    variable: str
    distinct: bool = False
    alias: str | None = None   # required in projections, absent in ORDER BY


@dataclass(frozen=True)
class OrderBy:
    key: object       # variable string or CountAggregate
    direction: str    # "asc" or "desc"


@dataclass(frozen=True)
class LogicalForm:
    kind: str                       # "select" or "ask"
    body: tuple
    projection: tuple = ()          # variable strings and CountAggregates
    distinct: bool = False
    group_by: str | None = None
    order_by: OrderBy | None = None
    limit: int | None = None

    @property
    def patterns(self) -> tuple:
        return tuple(i for i in self.body if isinstance(i, TriplePattern))

    @property
    def filters(self) -> tuple:
        return tuple(i for i in self.body
                     if isinstance(i, (FilterComparison, FilterNotExists)))

    def serialize(self) -> str:
        return serialize(self)


# --- serialization ---

def _serialize_items(items: tuple) -> list[str]:
    out: list[str] = []
    prev_triple = False
    for item in items:
        is_triple = isinstance(item, TriplePattern)
        if prev_triple and is_triple:
            out.append("<dot>")
        if is_triple:
            out += [item.subject.token(), item.relation, item.object.token()]
        elif isinstance(item, FilterComparison):
            out += ["FILTER", "(", item.lhs.token(), item.op, item.rhs.token(), ")"]
        elif isinstance(item, FilterNotExists):
            out += ["FILTER", "NOT", "EXISTS", "{"]
            out += _serialize_items(item.items)
            out.append("}")
        elif isinstance(item, UnionBlock):
            for n, branch in enumerate(item.branches):
                if n:
                    out.append("UNION")
                out.append("{")
                out += _serialize_items(branch)
                out.append("}")
        elif isinstance(item, BindAssign):
            out += ["BIND", "(", item.value.token(), "AS", item.variable, ")"]
        else:
            raise TypeError(f"not a body item: {item!r}")
        prev_triple = is_triple
    return out


def _serialize_count(agg: CountAggregate) -> list[str]:
    out = ["COUNT", "("]
    if agg.distinct:
        out.append("DISTINCT")
    out += [agg.variable, ")"]
    return out


def serialize(form: LogicalForm) -> str:
    """Render the canonical token text: single spaces, upper-case keywords,
    ``<dot>`` only between consecutive triple patterns."""
    out: list[str] = []
    if form.kind == "ask":
        out.append("ASK")
    else:
        out.append("SELECT")
        if form.distinct:
            out.append("DISTINCT")
        for item in form.projection:
            if isinstance(item, CountAggregate):
                out.append("(")
                out += _serialize_count(item)
                out += ["AS", item.alias, ")"]
            else:
                out.append(item)
    out += ["WHERE", "{"]
    out += _serialize_items(form.body)
    out.append("}")
    if form.group_by is not None:
        out += ["GROUP", "BY", form.group_by]
    if form.order_by is not None:
        key = form.order_by.key
        key_toks = _serialize_count(key) if isinstance(key, CountAggregate) else [key]
        if form.order_by.direction == "desc":
            out += ["ORDER", "BY", "DESC", "(", *key_toks, ")"]
        elif isinstance(key, CountAggregate):
            out += ["ORDER", "BY", "ASC", "(", *key_toks, ")"]
        else:
            out += ["ORDER", "BY", key]
    if form.limit is not None:
        out += ["LIMIT", str(form.limit)]
    return " ".join(out)


# --- parsing ---

def classify_term(token: str, position: int) -> Term:
    """Decide what a token in an entity position is.

    Angle tokens are never entities (relations live in predicate position)
    and keywords are reserved, case-insensitively.
    """
    if _VARIABLE_RE.match(token):
        return Term("variable", token)
    if PLACEHOLDER_RE.match(token):
        return Term("placeholder", token)
    if token.startswith('"'):
        if len(token) >= 2 and token.endswith('"'):
            return Term("literal", token)
        raise UnexpectedTokenError(f"unterminated string {token!r}", position)
    if _INTEGER_RE.match(token):
        return Term("literal", token)
    if is_absolute_uri(token):
        return Term("uri", token)
    if token in STRUCTURAL or token in OPERATORS or _ANGLE_RE.match(token):
        raise UnexpectedTokenError(f"{token!r} cannot appear in an entity position", position)
    if token.upper() in KEYWORDS:
        raise UnexpectedTokenError(f"keyword {token!r} in entity position", position)
    if token.startswith("?"):
        raise UnexpectedTokenError(f"bad variable name {token!r}", position)
    if any(c in token for c in '{}()<>"'):
        raise UnexpectedTokenError(f"malformed token {token!r}", position)
    return Term("mention", token)


def _check_balance(tokens: list[str]) -> None:
    stack: list[tuple[str, int]] = []
    pairs = {"}": "{", ")": "("}
    for pos, tok in enumerate(tokens):
        if tok in ("{", "("):
            stack.append((tok, pos))
        elif tok in pairs:
            if not stack or stack[-1][0] != pairs[tok]:
                raise UnbalancedDelimiterError(f"unmatched {tok!r}", pos)
            stack.pop()
    if stack:
        tok, pos = stack[-1]
        raise UnbalancedDelimiterError(f"{tok!r} is never closed", pos)


class _Parser:
    def __init__(self, tokens: list[str], vocab: Vocabulary):
        self.toks = tokens
        self.vocab = vocab
        self.i = 0

    def peek(self) -> str | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def at_keyword(self, kw: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.upper() == kw

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise UnexpectedTokenError("unexpected end of input", len(self.toks))
        self.i += 1
        return tok

    def expect(self, literal: str) -> None:
        tok = self.take()
        if tok != literal:
            raise UnexpectedTokenError(f"expected {literal!r}, got {tok!r}", self.i - 1)

    def expect_keyword(self, kw: str) -> None:
        tok = self.take()
        if tok.upper() != kw:
            raise UnexpectedTokenError(f"expected {kw}, got {tok!r}", self.i - 1)

    def term(self) -> Term:
        pos = self.i
        return classify_term(self.take(), pos)

    def variable(self) -> str:
        pos = self.i
        tok = self.take()
        if not _VARIABLE_RE.match(tok):
            raise UnexpectedTokenError(f"expected a variable, got {tok!r}", pos)
        return tok

    def relation(self) -> str:
        pos = self.i
        tok = self.take()
        if self.vocab.is_relation(tok):
            return tok
        if _ANGLE_RE.match(tok) and tok not in STRUCTURAL and tok not in OPERATORS \
                and not PLACEHOLDER_RE.match(tok):
            raise UnknownRelationTokenError(tok, pos)
        raise UnexpectedTokenError(f"expected a relation token, got {tok!r}", pos)

    def count_aggregate(self, with_alias: bool) -> CountAggregate:
        self.expect_keyword("COUNT")
        self.expect("(")
        distinct = False
        if self.at_keyword("DISTINCT"):
            self.take()
            distinct = True
        variable = self.variable()
        self.expect(")")
        alias = None
        if with_alias:
            self.expect_keyword("AS")
            alias = self.variable()
        return CountAggregate(variable=variable, distinct=distinct, alias=alias)

    def group(self) -> tuple:
        self.expect("{")
        items = self.items()
        self.expect("}")
        return items

    def items(self) -> tuple:
        out: list = []
        separated = False
        while True:
            tok = self.peek()
            if tok is None or tok == "}":
                if separated:
                    raise UnexpectedTokenError("dangling <dot>", self.i - 1)
                return tuple(out)
            if tok == "<dot>":
                if not out or separated:
                    raise UnexpectedTokenError("stray <dot>", self.i)
                self.take()
                separated = True
                continue
            separated = False
            if tok == "{":
                branches = [self.group()]
                while self.at_keyword("UNION"):
                    self.take()
                    branches.append(self.group())
                if len(branches) < 2:
                    raise UnexpectedTokenError("group without UNION", self.i)
                out.append(UnionBlock(tuple(branches)))
            elif tok.upper() == "FILTER":
                self.take()
                if self.at_keyword("NOT"):
                    self.take()
                    self.expect_keyword("EXISTS")
                    out.append(FilterNotExists(self.group()))
                else:
                    self.expect("(")
                    lhs = self.term()
                    pos = self.i
                    op = self.take()
                    if op not in OPERATORS:
                        raise UnexpectedTokenError(
                            f"expected a comparison operator, got {op!r}", pos)
                    rhs = self.term()
                    self.expect(")")
                    out.append(FilterComparison(lhs, op, rhs))
            elif tok.upper() == "BIND":
                self.take()
                self.expect("(")
                value = self.term()
                self.expect_keyword("AS")
                variable = self.variable()
                self.expect(")")
                out.append(BindAssign(value, variable))
            else:
                subject = self.term()
                relation = self.relation()
                obj = self.term()
                out.append(TriplePattern(subject, relation, obj))

    def order_by(self) -> OrderBy:
        if self.at_keyword("DESC") or self.at_keyword("ASC"):
            direction = "desc" if self.take().upper() == "DESC" else "asc"
            self.expect("(")
            key = self.count_aggregate(with_alias=False) if self.at_keyword("COUNT") \
                else self.variable()
            self.expect(")")
            return OrderBy(key=key, direction=direction)
        if self.at_keyword("COUNT"):
            return OrderBy(key=self.count_aggregate(with_alias=False), direction="asc")
        return OrderBy(key=self.variable(), direction="asc")

    def form(self) -> LogicalForm:
        head = self.take()
        if head.upper() == "ASK":
            if self.at_keyword("WHERE"):
                self.take()
            body = self.group()
            form = LogicalForm(kind="ask", body=body)
        elif head.upper() == "SELECT":
            distinct = False
            if self.at_keyword("DISTINCT"):
                self.take()
                distinct = True
            projection: list = []
            while not self.at_keyword("WHERE"):
                tok = self.peek()
                if tok is None:
                    raise UnexpectedTokenError("unexpected end of input", self.i)
                if tok == "(":
                    self.take()
                    agg = self.count_aggregate(with_alias=True)
                    self.expect(")")
                    projection.append(agg)
                else:
                    projection.append(self.variable())
            if not projection:
                raise UnexpectedTokenError("empty projection", self.i)
            self.expect_keyword("WHERE")
            body = self.group()
            form = LogicalForm(kind="select", body=body,
                               projection=tuple(projection), distinct=distinct)
        else:
            raise UnexpectedTokenError(f"expected SELECT or ASK, got {head!r}", self.i - 1)

        if self.at_keyword("GROUP"):
            self.take()
            self.expect_keyword("BY")
            form = replace(form, group_by=self.variable())
        if self.at_keyword("ORDER"):
            self.take()
            self.expect_keyword("BY")
            form = replace(form, order_by=self.order_by())
        if self.at_keyword("LIMIT"):
            self.take()
            pos = self.i
            tok = self.take()
            if not _INTEGER_RE.match(tok):
                raise UnexpectedTokenError(f"LIMIT needs an integer, got {tok!r}", pos)
            form = replace(form, limit=int(tok))
        if self.peek() is not None:
            raise UnexpectedTokenError(f"trailing token {self.peek()!r}", self.i)
        return form


def parse(text: str, vocab: Vocabulary) -> LogicalForm:
    tokens = tokenize(text)
    if not tokens:
        raise EmptyInputError("empty logical form")
    _check_balance(tokens)
    return _Parser(tokens, vocab).form()


# --- structural walks ---

def map_terms(form: LogicalForm, fn) -> LogicalForm:
    """Apply ``fn: Term -> Term`` to every entity position, recursively."""
    def walk(items: tuple) -> tuple:
        out = []
        for item in items:
            if isinstance(item, TriplePattern):
                out.append(TriplePattern(fn(item.subject), item.relation, fn(item.object)))
            elif isinstance(item, FilterComparison):
                out.append(FilterComparison(fn(item.lhs), item.op, fn(item.rhs)))
            elif isinstance(item, FilterNotExists):
                out.append(FilterNotExists(walk(item.items)))
            elif isinstance(item, UnionBlock):
                out.append(UnionBlock(tuple(walk(b) for b in item.branches)))
            elif isinstance(item, BindAssign):
                out.append(BindAssign(fn(item.value), item.variable))
            else:
                raise TypeError(f"not a body item: {item!r}")
        return tuple(out)
    return replace(form, body=walk(form.body))


def iter_terms(form: LogicalForm):
    """Yield (term, relation_token, slot) for every entity position in
    serialization order.  ``slot`` is "subject"/"object" inside triples and
    "lhs"/"rhs" inside filters; filter and BIND positions carry the
    relation token None."""
    def walk(items: tuple):
        for item in items:
            if isinstance(item, TriplePattern):
                yield (item.subject, item.relation, "subject")
                yield (item.object, item.relation, "object")
            elif isinstance(item, FilterComparison):
                yield (item.lhs, None, "lhs")
                yield (item.rhs, None, "rhs")
            elif isinstance(item, FilterNotExists):
                yield from walk(item.items)
            elif isinstance(item, UnionBlock):
                for branch in item.branches:
                    yield from walk(branch)
            elif isinstance(item, BindAssign):
                yield (item.value, None, "bind")
    yield from walk(form.body)


def map_variables(form: LogicalForm, rename: dict) -> LogicalForm:
    """Apply a variable rename map everywhere a variable can occur."""
    def rv(name: str) -> str:
        return rename.get(name, name)

    def rt(term: Term) -> Term:
        if term.kind == "variable":
            return Term("variable", rv(term.text))
        return term

    form = map_terms(form, rt)

    def walk_binds(items: tuple) -> tuple:
        out = []
        for item in items:
            if isinstance(item, BindAssign):
                out.append(BindAssign(item.value, rv(item.variable)))
            elif isinstance(item, FilterNotExists):
                out.append(FilterNotExists(walk_binds(item.items)))
            elif isinstance(item, UnionBlock):
                out.append(UnionBlock(tuple(walk_binds(b) for b in item.branches)))
            else:
                out.append(item)
        return tuple(out)

    projection = tuple(
        CountAggregate(rv(p.variable), p.distinct, rv(p.alias) if p.alias else None)
        if isinstance(p, CountAggregate) else rv(p)
        for p in form.projection)
    order_by = form.order_by
    if order_by is not None:
        key = order_by.key
        key = CountAggregate(rv(key.variable), key.distinct, None) \
            if isinstance(key, CountAggregate) else rv(key)
        order_by = OrderBy(key=key, direction=order_by.direction)
    return replace(form, body=walk_binds(form.body), projection=projection,
                   group_by=rv(form.group_by) if form.group_by else None,
                   order_by=order_by)


def projection_variables(form: LogicalForm) -> list[str]:
    """The variables a SELECT exposes, aliases included, in order."""
    out = []
    for p in form.projection:
        out.append(p.alias if isinstance(p, CountAggregate) else p)
    return out


def variables_in_order(form: LogicalForm) -> list[str]:
    """Every distinct variable in serialization order (projection first)."""
    seen: list[str] = []

    def add(name: str | None):
        if name and name not in seen:
            seen.append(name)

    for p in form.projection:
        if isinstance(p, CountAggregate):
            add(p.variable)
            add(p.alias)
        else:
            add(p)

    def walk(items: tuple):
        for item in items:
            if isinstance(item, TriplePattern):
                for t in (item.subject, item.object):
                    if t.kind == "variable":
                        add(t.text)
            elif isinstance(item, FilterComparison):
                for t in (item.lhs, item.rhs):
                    if t.kind == "variable":
                        add(t.text)
            elif isinstance(item, FilterNotExists):
                walk(item.items)
            elif isinstance(item, UnionBlock):
                for b in item.branches:
                    walk(b)
            elif isinstance(item, BindAssign):
                if item.value.kind == "variable":
                    add(item.value.text)
                add(item.variable)

    walk(form.body)
    add(form.group_by)
    if form.order_by is not None:
        key = form.order_by.key
        add(key.variable if isinstance(key, CountAggregate) else key)
    return seen


def placeholders_in_order(form: LogicalForm) -> list[str]:
    """Distinct ``<topicN>`` tokens in serialization order."""
    seen: list[str] = []
    for term, _rel, _slot in iter_terms(form):
        if term.kind == "placeholder" and term.text not in seen:
            seen.append(term.text)
    return seen
