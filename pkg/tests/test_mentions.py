from hypothesis import assume, given, settings

from dblpnlq.logicform import (
    iter_terms,
    parse,
    placeholders_in_order,
    serialize,
    tokenize,
)
from dblpnlq.mentions import (
    EntityMention,
    extract_mentions,
    mask_entities,
    scan_raw_tokens,
)

from .strategies import logical_forms
from .test_logicform import BERT, BERT_FORM_TEXT


def test_bert_form_yields_one_publication_mention(vocab):
    form = parse(BERT_FORM_TEXT, vocab)
    mentions = extract_mentions(form, vocab)
    assert mentions == [EntityMention(text=BERT, kind="publication", source="mention")]
    assert mentions[0].display.startswith("BERT: Pre-training of Deep")


def test_slot_kinds_drive_mention_kinds(vocab):
    form = parse("SELECT ?p WHERE { ?p <authoredBy> Niklas_Luhmann <dot> "
                 "?p <yearOfPublication> 2019 }", vocab)
    mentions = extract_mentions(form, vocab)
    assert [(m.text, m.kind) for m in mentions] == [
        ("Niklas_Luhmann", "person"), ("2019", "literal-year")]


def test_quoted_venue_slot_beats_literal_shape(vocab):
    form = parse('SELECT ?p WHERE { ?p <publishedIn> "ICLR" }', vocab)
    (m,) = extract_mentions(form, vocab)
    assert m.kind == "venue"
    assert m.source == "literal"
    assert m.display == "ICLR"


def test_filter_only_terms_keep_shape_kinds(vocab):
    form = parse('SELECT ?p WHERE { ?p <authoredBy> ?a '
                 'FILTER ( ?y <geq> 2020 ) FILTER ( ?n <is> "TU Berlin" ) }', vocab)
    mentions = extract_mentions(form, vocab)
    assert [(m.text, m.kind) for m in mentions] == [
        ("2020", "literal-year"), ('"TU Berlin"', "literal-string")]


def test_small_integers_are_not_mentions(vocab):
    form = parse("SELECT ?p WHERE { ?p <authoredBy> ?a FILTER ( ?c <gt> 5 ) }", vocab)
    assert extract_mentions(form, vocab) == []
    masked, _ = mask_entities(form, vocab)
    assert "5" in serialize(masked)


def test_uri_terms_are_lifted(vocab):
    form = parse("SELECT ?a WHERE { https://dblp.org/rec/conf/naacl/DevlinCLT19 "
                 "<authoredBy> ?a }", vocab)
    (m,) = extract_mentions(form, vocab)
    assert m.source == "uri"
    assert m.kind == "publication"


def test_majority_vote_and_tie_preference(vocab):
    # person twice beats nothing else
    form = parse("SELECT ?a WHERE { ?p <authoredBy> X <dot> X <primaryAffiliation> ?a }",
                 vocab)
    (m,) = extract_mentions(form, vocab)
    assert m.kind == "person"
    # one publication vote vs one person vote: tie falls to publication
    form = parse("SELECT ?a WHERE { X <authoredBy> ?a <dot> ?b <authoredBy> X }", vocab)
    (m,) = extract_mentions(form, vocab)
    assert m.kind == "publication"


def test_mask_numbers_by_first_appearance(vocab):
    form = parse(BERT_FORM_TEXT, vocab)
    masked, mentions = mask_entities(form, vocab)
    assert len(mentions) == 1
    text = serialize(masked)
    assert BERT not in text
    assert text.count("<topic1>") == 2


def test_mask_two_mentions(vocab):
    form = parse("SELECT ?p WHERE { ?p <authoredBy> Alice_Smith <dot> "
                 "?p <publishedIn> \"CHI\" }", vocab)
    masked, mentions = mask_entities(form, vocab)
    assert [m.text for m in mentions] == ["Alice_Smith", '"CHI"']
    assert placeholders_in_order(masked) == ["<topic1>", "<topic2>"]


def test_scan_raw_tokens_on_unparseable_output(vocab):
    tokens = tokenize("SELECT ?x WHERE { the_paper <authoredBy> ?x")
    masked, mentions = scan_raw_tokens(tokens, vocab)
    assert masked == ["SELECT", "?x", "WHERE", "{", "<topic1>", "<authoredBy>", "?x"]
    assert mentions == [EntityMention(text="the_paper", kind="publication",
                                      source="mention")]


def test_scan_raw_tokens_object_slot_vote(vocab):
    tokens = tokenize("?x <authoredBy> Jane_Doe ) )")
    _, mentions = scan_raw_tokens(tokens, vocab)
    assert mentions[0].kind == "person"


@given(form=logical_forms())
@settings(max_examples=150, deadline=None)
def test_masked_placeholders_match_mentions(vocab, form):
    assume(not any(t.kind == "placeholder" for t, _, _ in iter_terms(form)))
    masked, mentions = mask_entities(form, vocab)
    assert placeholders_in_order(masked) == \
        [f"<topic{i + 1}>" for i in range(len(mentions))]


@given(form=logical_forms())
@settings(max_examples=100, deadline=None)
def test_masking_is_idempotent_on_masked_forms(vocab, form):
    masked, _ = mask_entities(form, vocab)
    again, fresh = mask_entities(masked, vocab)
    assert again == masked
    assert fresh == []
