import sys
from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from lattice.parameters import critical_h  # noqa: E402
from utils.config_loader import ConfigLoader  # noqa: E402
from utils.data_models import Parameters  # noqa: E402


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(20240601))


@pytest.fixture
def h_w():
    """h_w at beta = 1"""
    return critical_h(1.0)


@pytest.fixture
def critical_params(h_w):
    return Parameters(beta=1.0, h=h_w, N=2)


@pytest.fixture
def make_config(tmp_path):
    """ExperimentConfig factory writing into a temporary output root"""

    def factory(experiment, **overrides):
        overrides.setdefault("out", tmp_path / "runs")
        overrides.setdefault("workers", 1)
        return ConfigLoader.load(None, experiment=experiment, **overrides)

    return factory
