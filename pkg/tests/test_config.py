import json

import pytest

from dblpnlq.config import AppConfig, Components, build_components, load_config
from dblpnlq.errors import FileUnreadableError
from dblpnlq.translate import ModelEndpointTranslator, RuleBasedTranslator

from tests.conftest import FIXTURES


def test_defaults():
    cfg = AppConfig()
    assert cfg.translator_mode == "rule-based"
    assert cfg.search_hits == 10
    assert cfg.display_count == 5
    assert cfg.fixture_mode == "off"
    assert cfg.retrieve_k == 5
    assert cfg.search_base_url.startswith("https://dblp.org")


def test_load_config_without_path_is_defaults():
    assert load_config(None, env={}) == AppConfig()


def test_load_config_file_overrides(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({"search_hits": 3, "session_cap": 7,
                             "sparql_timeout_s": 5.5}))
    cfg = load_config(p, env={})
    assert (cfg.search_hits, cfg.session_cap, cfg.sparql_timeout_s) == (3, 7, 5.5)
    assert cfg.display_count == 5


def test_load_config_unknown_key_rejected(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({"search_hitz": 3}))
    with pytest.raises(ValueError, match="search_hitz"):
        load_config(p, env={})


def test_load_config_env_beats_file(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({"fixture_mode": "record", "retrieve_k": 2}))
    cfg = load_config(p, env={"DBLPNLQ_FIXTURE_MODE": "replay",
                              "DBLPNLQ_RETRIEVE_K": "9",
                              "DBLPNLQ_SESSION_TTL_S": "12.5"})
    assert cfg.fixture_mode == "replay"
    assert cfg.retrieve_k == 9
    assert cfg.session_ttl_s == 12.5


def test_load_config_missing_file(tmp_path):
    with pytest.raises(FileUnreadableError):
        load_config(tmp_path / "absent.json", env={})


def test_load_config_not_json(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text("search_hits: 3")
    with pytest.raises(FileUnreadableError):
        load_config(p, env={})


def test_load_config_non_object(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text("[1, 2]")
    with pytest.raises(FileUnreadableError):
        load_config(p, env={})


def test_build_components_replay(replay_components):
    comp = replay_components
    assert isinstance(comp, Components)
    assert isinstance(comp.translator, RuleBasedTranslator)
    assert len(comp.template_base.templates) > 0
    assert comp.retrieve_k == 5 and comp.display_count == 5


def test_build_components_model_endpoint_mode():
    cfg = AppConfig(translator_mode="model-endpoint",
                    model_endpoint_url="http://127.0.0.1:1/translate",
                    fixture_mode="replay", fixture_root=str(FIXTURES))
    comp = build_components(cfg, model_transport=lambda *a: (200, "{}"))
    assert isinstance(comp.translator, ModelEndpointTranslator)


def test_packaged_template_base_is_default():
    cfg = AppConfig(fixture_mode="replay", fixture_root=str(FIXTURES))
    comp = build_components(cfg)
    # built by scripts/make_dataset.py from the bundled training split
    assert len(comp.template_base.templates) >= 20
    assert all(t.frequency >= 1 for t in comp.template_base.templates)


def test_fixture_root_required_when_mode_set():
    with pytest.raises(ValueError, match="fixture_root"):
        build_components(AppConfig(fixture_mode="replay"))
