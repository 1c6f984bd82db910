"""Converting between SPARQL text and the logical-form language.

``reverse_tokenize`` rewrites a SPARQL query as logical-form tokens
(predicate URIs become relation tokens, ``.`` becomes ``<dot>``, operators
become operator tokens).  ``to_sparql`` is the other direction.
``normalize`` canonicalizes a query for comparison and cache keys, and
``instantiate`` substitutes linked entities into a form or template.
"""

from __future__ import annotations

import re

from .errors import (
    ArityMismatchError,
    UnboundPlaceholderError,
    UnexpectedTokenError,
    UnknownRelationTokenError,
)
from .logicform import (
    BindAssign,
    CountAggregate,
    FilterNotExists,
    LogicalForm,
    Term,
    UnionBlock,
    iter_terms,
    map_terms,
    map_variables,
    parse,
    projection_variables,
    serialize,
    tokenize,
    variables_in_order,
)
from .vocab import (
    KEYWORDS,
    OPERATOR_TO_SPARQL,
    SPARQL_TO_OPERATOR,
    Vocabulary,
    is_absolute_uri,
)

_SPARQL_TOKEN_RE = re.compile(
    r"""(?P<WS>\s+)
      | (?P<URI><[^<>\s]+>)
      | (?P<STRING>"(?:[^"\\]|\\.)*")
      | (?P<VAR>\?[A-Za-z_][A-Za-z0-9_]*)
      | (?P<NUM>[0-9]+)
      | (?P<OP>!=|<=|>=|=|<|>)
      | (?P<PUNCT>[{}().])
      | (?P<WORD>[A-Za-z_][A-Za-z0-9_:-]*)
      | (?P<BAD>.)
    """,
    re.VERBOSE,
)

# A predicate position is recognizable by its namespace, so unmapped
# schema URIs can be reported distinctly from entity URIs.
_SCHEMA_MARKER = "/rdf/schema#"


def lex_sparql(text: str) -> list[tuple[str, str, int, int]]:
    """(kind, text, line, column) tuples; raises on unlexable characters."""
    out = []
    line, line_start = 1, 0
    for m in _SPARQL_TOKEN_RE.finditer(text):
        kind = m.lastgroup
        tok = m.group()
        col = m.start() - line_start + 1
        if kind == "WS":
            nl = tok.count("\n")
            if nl:
                line += nl
                line_start = m.start() + tok.rindex("\n") + 1
            continue
        if kind == "BAD":
            raise UnexpectedTokenError(
                f"cannot read {tok!r} at line {line} column {col}", len(out))
        out.append((kind, tok, line, col))
    return out


def reverse_tokenize(sparql: str, vocab: Vocabulary) -> str:
    """SPARQL text to logical-form token text.

    Predicate URIs outside the relation manifest raise; entity URIs are
    kept bare.  Queries using syntax outside the subset (OPTIONAL,
    semicolons, prefixed names...) come through literally and fail at
    parse time with a positioned error.
    """
    out: list[str] = []
    for kind, tok, _line, _col in lex_sparql(sparql):
        if kind == "URI":
            uri = tok[1:-1]
            relation = vocab.uri_to_relation.get(uri)
            if relation is not None:
                out.append(relation)
            elif _SCHEMA_MARKER in uri:
                raise UnknownRelationTokenError(tok, len(out))
            else:
                out.append(uri)
        elif kind == "OP":
            out.append(SPARQL_TO_OPERATOR[tok])
        elif kind == "PUNCT":
            out.append("<dot>" if tok == "." else tok)
        elif kind == "WORD":
            out.append(tok.upper() if tok.upper() in KEYWORDS else tok)
        else:
            out.append(tok)
    return " ".join(out)


def to_sparql(form: LogicalForm, vocab: Vocabulary) -> str:
    """Logical form to executable SPARQL (single line)."""
    out = []
    for tok in tokenize(serialize(form)):
        if vocab.is_relation(tok):
            out.append("<" + vocab.relation_uri(tok) + ">")
        elif tok == "<dot>":
            out.append(".")
        elif tok in OPERATOR_TO_SPARQL:
            out.append(OPERATOR_TO_SPARQL[tok])
        elif is_absolute_uri(tok):
            out.append("<" + tok + ">")
        else:
            out.append(tok)
    return " ".join(out)


_RESERVED_PROJECTION = ["?firstanswer", "?secondanswer", "?thirdanswer",
                        "?fourthanswer", "?fifthanswer"]


def _reserved_name(i: int) -> str:
    if i < len(_RESERVED_PROJECTION):
        return _RESERVED_PROJECTION[i]
    return f"?answer{i + 1}"


def normalize_form(form: LogicalForm) -> LogicalForm:
    """Rename variables canonically: projected variables become
    ?firstanswer, ?secondanswer, ... positionally; the rest become
    ?v1, ?v2, ... in order of first appearance."""
    rename: dict[str, str] = {}
    for v in projection_variables(form):
        if v not in rename:
            rename[v] = _reserved_name(len(rename))
    n = 0
    for v in variables_in_order(form):
        if v not in rename:
            n += 1
            rename[v] = f"?v{n}"
    return map_variables(form, rename)


def normalize(sparql: str, vocab: Vocabulary) -> str:
    """Canonical logical-form text for a SPARQL query: same tokens, same
    spacing, same variable names for every way of writing the query."""
    form = parse(reverse_tokenize(sparql, vocab), vocab)
    return serialize(normalize_form(form))


def instantiate(form: LogicalForm, bindings: dict[str, Term],
                vocab: Vocabulary) -> LogicalForm:
    """Substitute bindings into placeholders and mentions.

    Keys are placeholder tokens (``<topic1>``) or surface texts, so both
    a masked template and the raw generated form can be instantiated with
    the same linker output.  Every placeholder and every mention must end
    up bound; URIs and literals may stay as they are.  Bindings that
    match nothing raise, which catches template/mention misalignment.
    """
    used: set[str] = set()
    unbound: list[str] = []

    def sub(term: Term) -> Term:
        if term.kind == "placeholder":
            value = bindings.get(term.text)
            if value is None:
                unbound.append(term.text)
                return term
            used.add(term.text)
            return value
        if term.kind in ("mention", "uri", "literal"):
            value = bindings.get(term.text)
            if value is not None:
                used.add(term.text)
                return value
            if term.kind == "mention":
                unbound.append(term.text)
        return term

    out = map_terms(form, sub)
    if unbound:
        raise UnboundPlaceholderError(list(dict.fromkeys(unbound)))
    unused = set(bindings) - used
    if unused:
        raise ArityMismatchError("bindings never used: " + ", ".join(sorted(unused)))
    return out


def _body_variables(form: LogicalForm) -> set[str]:
    out = {t.text for t, _, _ in iter_terms(form) if t.kind == "variable"}

    def walk(items):
        for item in items:
            if isinstance(item, BindAssign):
                out.add(item.variable)
            elif isinstance(item, FilterNotExists):
                walk(item.items)
            elif isinstance(item, UnionBlock):
                for b in item.branches:
                    walk(b)

    walk(form.body)
    return out


def validate(form: LogicalForm, vocab: Vocabulary) -> list[str]:
    """Non-fatal consistency warnings for display next to a query."""
    warnings = []
    bound = _body_variables(form)
    for p in form.projection:
        if isinstance(p, CountAggregate):
            if p.variable not in bound:
                warnings.append(f"counting a variable that never occurs: {p.variable}")
        elif p not in bound:
            warnings.append(f"projected variable is never bound: {p}")
    if form.group_by is not None and form.group_by not in bound:
        warnings.append(f"grouping by an unbound variable: {form.group_by}")
    for term, _, _ in iter_terms(form):
        if term.kind == "mention":
            warnings.append(f"unresolved mention: {term.text}")
        elif term.kind == "placeholder":
            warnings.append(f"unresolved placeholder: {term.text}")
    if form.limit == 0:
        warnings.append("LIMIT 0 discards all results")
    return warnings
