import json

import pytest

from dblpnlq.errors import SchemaMismatchError
from dblpnlq.evalharness import (DatasetItem, evaluate, load_dataset, run_full,
                                 run_gold_lf, score)

from tests.conftest import DATA


def _write(tmp_path, doc):
    p = tmp_path / "d.json"
    p.write_text(json.dumps(doc))
    return p


def _doc(questions):
    return {"dataset": "t", "questions": questions}


def _q(i="Q1", question="who?", sparql="SELECT ?a WHERE { ?a ?b ?c }",
       answers=("x",)):
    return {"id": i, "question": {"string": question},
            "query": {"sparql": sparql}, "answers": list(answers)}


def test_load_dataset_happy(tmp_path):
    p = _write(tmp_path, _doc([_q(), _q(i="Q2", answers=[True, 3])]))
    items = load_dataset(p)
    assert [it.id for it in items] == ["Q1", "Q2"]
    assert items[0].gold_answers == frozenset({"x"})
    # non-string answer values are canonicalized to their lexical form
    assert items[1].gold_answers == frozenset({"true", "3"})


def test_load_dataset_bundled_splits():
    train = load_dataset(DATA / "quad_train.json")
    ev = load_dataset(DATA / "quad_eval50.json")
    assert len(ev) == 50
    assert len(train) > 400
    assert {it.id for it in ev} <= {it.id for it in train}


@pytest.mark.parametrize("doc, fragment", [
    ([1], "not an object"),
    ([{"question": {"string": "q"}, "query": {"sparql": "s"}, "answers": []}],
     "id"),
    ([_q(i=7)], "id"),
    ([{"id": "Q1", "question": "bare", "query": {"sparql": "s"},
       "answers": []}], "question"),
    ([{"id": "Q1", "question": {"string": "q"}, "query": {},
       "answers": []}], "sparql"),
    ([_q() | {"answers": "x"}], "answers"),
    ([_q(), _q()], "duplicate"),
])
def test_load_dataset_schema_errors(tmp_path, doc, fragment):
    with pytest.raises(SchemaMismatchError, match=fragment):
        load_dataset(_write(tmp_path, _doc(doc)))


def test_load_dataset_top_level_shape(tmp_path):
    with pytest.raises(SchemaMismatchError):
        load_dataset(_write(tmp_path, [1, 2]))
    with pytest.raises(SchemaMismatchError):
        load_dataset(_write(tmp_path, {"items": []}))


def test_load_dataset_answer_object_rejected(tmp_path):
    with pytest.raises(SchemaMismatchError):
        load_dataset(_write(tmp_path, _doc([_q(answers=[{"v": 1}])])))


# score() oracle values are computed by hand from |pred∩gold|/|pred|/|gold|
SCORE_CASES = [
    (set(), set(), (1.0, 1.0, 1.0)),
    ({"a"}, set(), (0.0, 0.0, 0.0)),
    (set(), {"a"}, (0.0, 0.0, 0.0)),
    ({"a"}, {"a"}, (1.0, 1.0, 1.0)),
    ({"a"}, {"b"}, (0.0, 0.0, 0.0)),
    ({"a", "b"}, {"a"}, (0.5, 1.0, 2 / 3)),
    ({"a"}, {"a", "b"}, (1.0, 0.5, 2 / 3)),
    ({"a", "b"}, {"b", "c"}, (0.5, 0.5, 0.5)),
    ({"a", "b", "c"}, {"a"}, (1 / 3, 1.0, 0.5)),
    ({"a"}, {"a", "b", "c"}, (1.0, 1 / 3, 0.5)),
    ({"a", "b", "c", "d"}, {"c", "d", "e"}, (0.5, 2 / 3, 4 / 7)),
    ({"1", "2", "3"}, {"2", "3", "4"}, (2 / 3, 2 / 3, 2 / 3)),
    ({"a", "b", "c", "d", "e"}, {"a", "b"}, (0.4, 1.0, 4 / 7)),
    ({"a", "b"}, {"a", "b", "c", "d", "e"}, (1.0, 0.4, 4 / 7)),
    ({"x"}, {"x", "y"}, (1.0, 0.5, 2 / 3)),
    ({"p", "q", "r"}, {"p", "q", "r"}, (1.0, 1.0, 1.0)),
    ({"p", "q", "r", "s"}, {"p"}, (0.25, 1.0, 0.4)),
    ({"a", "b", "c", "d", "e", "f", "g", "h"}, {"a", "b", "c", "d"},
     (0.5, 1.0, 2 / 3)),
    ({"a", "b", "c"}, {"d", "e", "f"}, (0.0, 0.0, 0.0)),
    ({"u1", "u2", "u3", "u4", "u5", "u6"}, {"u4", "u5", "u6", "u7", "u8"},
     (0.5, 0.6, 6 / 11)),
]


@pytest.mark.parametrize("pred, gold, expected", SCORE_CASES)
def test_score_oracle(pred, gold, expected):
    p, r, f1 = score(frozenset(pred), frozenset(gold))
    ep, er, ef = expected
    assert abs(p - ep) <= 1e-12
    assert abs(r - er) <= 1e-12
    assert abs(f1 - ef) <= 1e-12


def test_gold_lf_mode_on_subset(replay_components):
    items = load_dataset(DATA / "quad_eval50.json")[:6]
    report = evaluate(replay_components, items, mode="gold-lf")
    assert report.mode == "gold-lf"
    assert report.macro_f1 == 1.0
    assert all(s.error is None for s in report.per_item)


def test_full_mode_on_subset(replay_components):
    items = [it for it in load_dataset(DATA / "quad_eval50.json")
             if it.id in ("Q0001", "Q0002")]
    report = evaluate(replay_components, items, mode="full")
    assert report.macro_f1 == 1.0


def test_full_mode_records_stage_error(replay_components):
    item = DatasetItem(id="X1", question="please compute the entropy of jazz",
                       gold_query="SELECT ?a WHERE { ?a ?b ?c }",
                       gold_answers=frozenset({"x"}))
    report = evaluate(replay_components, [item], mode="full")
    assert report.macro_f1 == 0.0
    assert report.per_item[0].error == "NoPatternMatched"


def test_run_full_answers(replay_components):
    items = load_dataset(DATA / "quad_examples2.json")
    predicted, error = run_full(replay_components, items[0].question)
    assert error is None
    assert predicted == items[0].gold_answers


def test_run_gold_lf_answers(replay_components):
    item = load_dataset(DATA / "quad_eval50.json")[0]
    predicted, error = run_gold_lf(replay_components, item)
    assert error is None
    assert predicted == item.gold_answers


def test_report_serialization(replay_components):
    items = load_dataset(DATA / "quad_eval50.json")[:3]
    report = evaluate(replay_components, items, mode="gold-lf")
    doc = report.to_dict()
    assert set(doc) == {"mode", "macro_precision", "macro_recall",
                        "macro_f1", "items"}
    assert len(doc["items"]) == 3
    text = report.summary()
    assert "macro" in text and "1.000" in text


def test_evaluate_sorts_by_id(replay_components):
    items = load_dataset(DATA / "quad_eval50.json")[:4]
    report = evaluate(replay_components, list(reversed(items)), mode="gold-lf")
    ids = [s.id for s in report.per_item]
    assert ids == sorted(ids)
