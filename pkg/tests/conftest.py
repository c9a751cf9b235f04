import json
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
REPLICA_CONFIG = ROOT / "demos" / "configs" / "enhanced_two_photon.json"


@pytest.fixture
def replica_config_path():
    return REPLICA_CONFIG


@pytest.fixture
def replica_config():
    return json.loads(REPLICA_CONFIG.read_text())
