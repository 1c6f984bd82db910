import pytest
from hypothesis import given, settings

from dblpnlq.errors import (
    EmptyInputError,
    LogicalFormSyntaxError,
    UnbalancedDelimiterError,
    UnexpectedTokenError,
    UnknownRelationTokenError,
)
from dblpnlq.logicform import (
    CountAggregate,
    FilterComparison,
    LogicalForm,
    OrderBy,
    Term,
    TriplePattern,
    UnionBlock,
    map_variables,
    parse,
    placeholders_in_order,
    projection_variables,
    serialize,
    tokenize,
    variables_in_order,
)

from .strategies import logical_forms

BERT = "BERT:_Pre-training_of_Deep_Bidirectional_Transformers_for_Language_Understanding"

# The two-hop authors-and-their-venues form: the worked example the whole
# pipeline is anchored on.
BERT_FORM_TEXT = (
    f"SELECT DISTINCT ?firstanswer ?secondanswer WHERE {{ "
    f"{BERT} <authoredBy> ?firstanswer <dot> "
    f"?x <authoredBy> ?firstanswer <dot> "
    f"?x <publishedIn> ?secondanswer "
    f"FILTER ( ?x <isnot> {BERT} ) }}"
)


def test_tokenize_keeps_quoted_strings_whole():
    toks = tokenize('FILTER ( ?x <is> "Daniel S. Weld" )')
    assert toks == ["FILTER", "(", "?x", "<is>", '"Daniel S. Weld"', ")"]


def test_parse_two_hop_authors_venues_form(vocab):
    form = parse(BERT_FORM_TEXT, vocab)
    assert form.kind == "select"
    assert form.distinct is True
    assert form.projection == ("?firstanswer", "?secondanswer")
    assert len(form.patterns) == 3
    assert len(form.filters) == 1
    assert form.patterns[0] == TriplePattern(
        Term("mention", BERT), "<authoredBy>", Term("variable", "?firstanswer"))
    assert form.patterns[2] == TriplePattern(
        Term("variable", "?x"), "<publishedIn>", Term("variable", "?secondanswer"))
    assert form.filters[0] == FilterComparison(
        Term("variable", "?x"), "<isnot>", Term("mention", BERT))
    assert serialize(form) == BERT_FORM_TEXT


def test_parse_ask(vocab):
    form = parse("ASK { Attention_is_All_You_Need <yearOfPublication> 2017 }", vocab)
    assert form.kind == "ask"
    assert form.projection == ()
    assert form.patterns[0].object == Term("literal", "2017")
    # canonical serialization always writes the WHERE keyword
    assert serialize(form) == \
        "ASK WHERE { Attention_is_All_You_Need <yearOfPublication> 2017 }"


def test_parse_count_group_order_limit(vocab):
    text = ("SELECT ?firstanswer WHERE { ?p <authoredBy> ?firstanswer } "
            "GROUP BY ?firstanswer ORDER BY DESC ( COUNT ( ?p ) ) LIMIT 1")
    form = parse(text, vocab)
    assert form.group_by == "?firstanswer"
    assert form.order_by == OrderBy(key=CountAggregate("?p"), direction="desc")
    assert form.limit == 1
    assert serialize(form) == text


def test_parse_count_projection(vocab):
    text = ("SELECT ( COUNT ( DISTINCT ?p ) AS ?count ) WHERE "
            "{ ?p <authoredBy> Ashish_Vaswani }")
    form = parse(text, vocab)
    assert form.projection == (CountAggregate("?p", distinct=True, alias="?count"),)
    assert projection_variables(form) == ["?count"]
    assert serialize(form) == text


def test_parse_union(vocab):
    text = ("SELECT ?x WHERE { { ?x <authoredBy> A } UNION { ?x <authoredBy> B } }")
    form = parse(text, vocab)
    assert isinstance(form.body[0], UnionBlock)
    assert len(form.body[0].branches) == 2
    assert serialize(form) == text


def test_parse_not_exists(vocab):
    text = ("ASK WHERE { ?x <authoredBy> A FILTER NOT EXISTS "
            "{ ?x <publishedIn> \"NeurIPS\" } }")
    form = parse(text, vocab)
    assert serialize(form) == text


def test_parse_uri_term(vocab):
    text = ("SELECT ?a WHERE { https://dblp.org/rec/conf/naacl/DevlinCLT19 "
            "<authoredBy> ?a }")
    form = parse(text, vocab)
    assert form.patterns[0].subject == Term("uri", "https://dblp.org/rec/conf/naacl/DevlinCLT19")


def test_dot_only_between_consecutive_triples(vocab):
    form = parse("SELECT ?x WHERE { ?x <authoredBy> A <dot> ?x <yearOfPublication> "
                 "?y FILTER ( ?y <geq> 2020 ) }", vocab)
    text = serialize(form)
    assert "<dot>" in text
    assert "?y FILTER" in text          # no <dot> before a filter
    assert text.count("<dot>") == 1


def test_parse_accepts_lowercase_keywords(vocab):
    form = parse("select distinct ?x where { ?x <authoredBy> A }", vocab)
    assert form.distinct
    assert serialize(form).startswith("SELECT DISTINCT")


def test_empty_input(vocab):
    with pytest.raises(EmptyInputError):
        parse("   ", vocab)


def test_missing_closing_brace(vocab):
    with pytest.raises(UnbalancedDelimiterError):
        parse("SELECT ?x WHERE { ?x <authoredBy> A", vocab)


def test_extra_closing_paren(vocab):
    with pytest.raises(UnbalancedDelimiterError):
        parse("SELECT ?x WHERE { ?x <authoredBy> A } )", vocab)


def test_unknown_relation_token(vocab):
    with pytest.raises(UnknownRelationTokenError) as exc:
        parse("SELECT ?x WHERE { ?x <wroteBy> A }", vocab)
    assert exc.value.token == "<wroteBy>"
    assert exc.value.position == 5


def test_operator_outside_filter(vocab):
    with pytest.raises(UnexpectedTokenError):
        parse("SELECT ?x WHERE { ?x <is> A }", vocab)


def test_bad_limit(vocab):
    with pytest.raises(UnexpectedTokenError):
        parse("SELECT ?x WHERE { ?x <authoredBy> A } LIMIT many", vocab)


def test_stray_dot(vocab):
    with pytest.raises(UnexpectedTokenError):
        parse("SELECT ?x WHERE { <dot> ?x <authoredBy> A }", vocab)


def test_dangling_dot(vocab):
    with pytest.raises(UnexpectedTokenError):
        parse("SELECT ?x WHERE { ?x <authoredBy> A <dot> }", vocab)


def test_errors_carry_token_positions(vocab):
    with pytest.raises(LogicalFormSyntaxError) as exc:
        parse("SELECT ?x WHERE { ?x <wroteBy> A }", vocab)
    assert isinstance(exc.value.position, int)


def test_map_variables_renames_everywhere(vocab):
    text = ("SELECT ( COUNT ( DISTINCT ?p ) AS ?c ) WHERE "
            "{ ?p <authoredBy> ?a <dot> ?p <yearOfPublication> ?y "
            "FILTER ( ?y <geq> 2020 ) } GROUP BY ?a ORDER BY DESC ( ?c )")
    form = parse(text, vocab)
    renamed = map_variables(form, {"?p": "?v1", "?a": "?v2", "?c": "?firstanswer"})
    out = serialize(renamed)
    assert "?p" not in out and "?a " not in out and "?c" not in out.replace("?firstanswer", "")
    assert "GROUP BY ?v2" in out
    assert "ORDER BY DESC ( ?firstanswer )" in out


def test_variables_in_order_projection_first(vocab):
    form = parse(BERT_FORM_TEXT, vocab)
    assert variables_in_order(form) == ["?firstanswer", "?secondanswer", "?x"]


def test_placeholders_in_order(vocab):
    form = parse("SELECT ?x WHERE { <topic2> <authoredBy> ?x <dot> "
                 "<topic1> <authoredBy> ?x }", vocab)
    assert placeholders_in_order(form) == ["<topic2>", "<topic1>"]


@given(form=logical_forms())
@settings(max_examples=200, deadline=None)
def test_serialize_parse_round_trip(vocab, form: LogicalForm):
    assert parse(serialize(form), vocab) == form
