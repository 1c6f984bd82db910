"""Flat application config: JSON file, environment overrides, component factory."""

from __future__ import annotations

import dataclasses
import importlib.resources
import json
import os
from dataclasses import dataclass
from pathlib import Path

from .endpoint import EndpointConfig, SparqlClient
from .errors import FileUnreadableError
from .linking import DblpSearchClient, LinkerConfig
from .templates import TemplateBase
from .translate import (
    ModelEndpointTranslator,
    RuleBasedTranslator,
    TranslatorConfig,
    load_default_patterns,
    load_patterns,
)
from .vocab import Vocabulary, load_default, load_manifest


@dataclass
class AppConfig:
    translator_mode: str = "rule-based"
    model_endpoint_url: str | None = None
    model_timeout_ms: int = 10000
    max_output_tokens: int = 512
    search_base_url: str = "https://dblp.org"
    search_hits: int = 10
    display_count: int = 5
    search_timeout_s: float = 10.0
    sparql_url: str = "https://dblp-kg.ltdemos.informatik.uni-hamburg.de/sparql"
    sparql_timeout_s: float = 30.0
    max_rows: int = 1000
    fixture_mode: str = "off"          # off | record | replay, both clients
    fixture_root: str | None = None    # holds search/ and sparql/ subtrees
    manifest_path: str | None = None
    patterns_path: str | None = None
    template_base_path: str | None = None
    retrieve_k: int = 5
    reference_year: int = 2024
    session_ttl_s: float = 3600.0
    session_cap: int = 200


_ENV_KEYS = {
    "DBLPNLQ_TRANSLATOR_MODE": ("translator_mode", str),
    "DBLPNLQ_MODEL_URL": ("model_endpoint_url", str),
    "DBLPNLQ_SEARCH_BASE_URL": ("search_base_url", str),
    "DBLPNLQ_SPARQL_URL": ("sparql_url", str),
    "DBLPNLQ_TEMPLATE_BASE": ("template_base_path", str),
    "DBLPNLQ_MANIFEST": ("manifest_path", str),
    "DBLPNLQ_PATTERNS": ("patterns_path", str),
    "DBLPNLQ_FIXTURE_MODE": ("fixture_mode", str),
    "DBLPNLQ_FIXTURE_ROOT": ("fixture_root", str),
    "DBLPNLQ_RETRIEVE_K": ("retrieve_k", int),
    "DBLPNLQ_REFERENCE_YEAR": ("reference_year", int),
    "DBLPNLQ_SESSION_TTL_S": ("session_ttl_s", float),
    "DBLPNLQ_SESSION_CAP": ("session_cap", int),
}


def load_config(path: str | Path | None = None, env: dict | None = None) -> AppConfig:
    """Defaults, overridden by a flat JSON file, overridden by DBLPNLQ_* env."""
    values = {}
    known = {f.name for f in dataclasses.fields(AppConfig)}
    if path is not None:
        try:
            doc = json.loads(Path(path).read_text())
        except OSError as exc:
            raise FileUnreadableError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise FileUnreadableError(f"config {path} is not JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise FileUnreadableError(f"config {path} is not an object")
        for key, value in doc.items():
            if key not in known:
                raise ValueError(f"unknown config key {key!r} in {path}")
            values[key] = value
    if env is None:
        env = os.environ
    for env_key, (field, cast) in _ENV_KEYS.items():
        if env_key in env:
            values[field] = cast(env[env_key])
    return AppConfig(**values)


@dataclass
class Components:
    """Everything the pipeline needs, built once and shared across sessions."""
    vocab: Vocabulary
    translator: object
    search: DblpSearchClient
    sparql: SparqlClient
    template_base: TemplateBase
    retrieve_k: int
    display_count: int


def _fixture_dir(cfg: AppConfig, sub: str) -> str | None:
    if cfg.fixture_mode == "off":
        return None
    if cfg.fixture_root is None:
        raise ValueError("fixture_root required when fixture_mode is on")
    return str(Path(cfg.fixture_root) / sub)


def _load_template_base(cfg: AppConfig, vocab: Vocabulary) -> TemplateBase:
    if cfg.template_base_path is not None:
        return TemplateBase.load(cfg.template_base_path, vocab)
    source = importlib.resources.files("dblpnlq").joinpath("data/template_base.json")
    with importlib.resources.as_file(source) as path:
        if not path.exists():
            return TemplateBase(templates=[])
        return TemplateBase.load(path, vocab)


def build_components(cfg: AppConfig, *, search_transport=None,
                     sparql_transport=None, model_transport=None) -> Components:
    vocab = load_manifest(cfg.manifest_path) if cfg.manifest_path else load_default()
    if cfg.translator_mode == "model-endpoint":
        tcfg = TranslatorConfig(mode="model-endpoint",
                                endpoint_url=cfg.model_endpoint_url,
                                timeout_ms=cfg.model_timeout_ms,
                                max_output_tokens=cfg.max_output_tokens)
        translator = ModelEndpointTranslator(tcfg, vocab, transport=model_transport)
    else:
        patterns = (load_patterns(cfg.patterns_path, vocab) if cfg.patterns_path
                    else load_default_patterns(vocab))
        translator = RuleBasedTranslator(patterns, vocab,
                                         reference_year=cfg.reference_year)
    search = DblpSearchClient(
        LinkerConfig(base_url=cfg.search_base_url, hits_per_query=cfg.search_hits,
                     display_count=cfg.display_count, timeout=cfg.search_timeout_s,
                     fixture_mode=cfg.fixture_mode,
                     fixture_dir=_fixture_dir(cfg, "search")),
        transport=search_transport)
    sparql = SparqlClient(
        EndpointConfig(url=cfg.sparql_url, timeout=cfg.sparql_timeout_s,
                       max_rows=cfg.max_rows, fixture_mode=cfg.fixture_mode,
                       fixture_dir=_fixture_dir(cfg, "sparql")),
        vocab=vocab, transport=sparql_transport)
    return Components(vocab=vocab, translator=translator, search=search,
                      sparql=sparql, template_base=_load_template_base(cfg, vocab),
                      retrieve_k=cfg.retrieve_k, display_count=cfg.display_count)
