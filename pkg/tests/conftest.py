from pathlib import Path

import pytest

from dblpnlq.config import AppConfig, build_components
from dblpnlq.vocab import load_default

REPO = Path(__file__).resolve().parent.parent
FIXTURES = REPO / "tests" / "fixtures"
DATA = REPO / "data"


@pytest.fixture(scope="session")
def vocab():
    return load_default()


@pytest.fixture(scope="session")
def replay_components():
    """Pipeline wired to the recorded search/endpoint fixtures. Read-only."""
    cfg = AppConfig(fixture_mode="replay", fixture_root=str(FIXTURES),
                    reference_year=2024)
    return build_components(cfg)
