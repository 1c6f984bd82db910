import json

import pytest

from dblpnlq.cli import main
from dblpnlq.templates import TemplateBase
from dblpnlq.vocab import load_default

from tests.conftest import DATA, FIXTURES


@pytest.fixture(autouse=True)
def replay_env(monkeypatch):
    monkeypatch.setenv("DBLPNLQ_FIXTURE_MODE", "replay")
    monkeypatch.setenv("DBLPNLQ_FIXTURE_ROOT", str(FIXTURES))
    monkeypatch.setenv("DBLPNLQ_REFERENCE_YEAR", "2024")


def test_ask_prints_pipeline(capsys):
    rc = main(["ask", "what papers has Tim Berners-Lee published"
               " in the last 5 years?"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "logical form:" in out
    assert "Tim Berners-Lee" in out
    assert "query:" in out and "answers:" in out


def test_ask_zero_hit_shows_stage_error(capsys):
    rc = main(["ask", "who are the authors of 'Zzqx Qqzw'?"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "error at query: UnboundPlaceholder" in out
    assert "skipped stages: execution" in out


def test_eval_gold_lf_writes_report(tmp_path, capsys):
    report_path = tmp_path / "report.json"
    rc = main(["eval", "--dataset", str(DATA / "quad_eval50.json"),
               "--mode", "gold-lf", "--report", str(report_path)])
    assert rc == 0
    assert "macro" in capsys.readouterr().out
    doc = json.loads(report_path.read_text())
    assert doc["mode"] == "gold-lf"
    assert doc["macro_f1"] == 1.0
    assert len(doc["items"]) == 50


def test_build_templates(tmp_path, capsys):
    out_path = tmp_path / "base.json"
    rc = main(["build-templates", "--dataset", str(DATA / "quad_train.json"),
               "--out", str(out_path)])
    assert rc == 0
    text = capsys.readouterr().out
    assert "built" in text and "skipped U0001" in text
    base = TemplateBase.load(out_path, load_default())
    assert len(base.templates) == 21


def test_missing_dataset_is_reported(tmp_path, capsys):
    rc = main(["eval", "--dataset", str(tmp_path / "none.json")])
    assert rc == 1
    assert "FileUnreadable" in capsys.readouterr().err


def test_unknown_subcommand_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
