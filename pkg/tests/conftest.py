import json
import warnings
from pathlib import Path

import numpy as np
import pytest

from analysis.adversarial import build_atom
from analysis.grid import SampledFunction, make_grid
from analysis.littlewood_paley import build_filter_bank
from experiments.settings import ExperimentConfig, build_resources


@pytest.fixture(scope="session")
def grid10():
    return make_grid(10, -1, 2)


@pytest.fixture(scope="session")
def unit_grid():
    return make_grid(8, 0, 1)


@pytest.fixture(scope="session")
def bank_half(grid10):
    """m1 = 3, r = 1/2: scales 0..6 on grid10."""
    return build_filter_bank(3, 0.5, grid10)


@pytest.fixture(scope="session")
def bank_small(grid10):
    """m1 = 3, r = 2^-4: scales 0..3 on grid10."""
    return build_filter_bank(3, 2.0 ** -4, grid10)


@pytest.fixture(scope="session")
def atom(grid10):
    return build_atom(grid=grid10)


@pytest.fixture(scope="session")
def small_config():
    return ExperimentConfig(6.0, 2.0, -0.7, N_min=1, N_max=3, j_max=10, samples=2,
                            exclude_capped=False)


@pytest.fixture(scope="session")
def small_resources(small_config):
    return build_resources(small_config)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_function(grid, rng, lo=0, hi=1):
    """Gaussian cell values on [lo, hi), zero elsewhere in the window."""
    samples = np.zeros(grid.n_points)
    start, stop = grid.index_of(lo), grid.index_of(hi)
    samples[start:stop] = rng.standard_normal(stop - start)
    return SampledFunction(grid, samples)


@pytest.fixture
def noise():
    return random_function


BASELINE_DIR = Path(__file__).parent / "baselines"


@pytest.fixture
def baseline():
    """
    Compare values with tests/baselines/<name>.json.

    A missing file is written from the values of the current run, which
    freezes them for every later run.
    """
    def check(name, values, rel=1e-9):
        path = BASELINE_DIR / f"{name}.json"
        if not path.exists():
            BASELINE_DIR.mkdir(exist_ok=True)
            path.write_text(json.dumps(values, indent=2, sort_keys=True) + "\n")
            warnings.warn(f"recorded new baseline {path.name}")
            return
        recorded = json.loads(path.read_text())
        assert sorted(recorded) == sorted(values)
        for key, value in values.items():
            assert value == pytest.approx(recorded[key], rel=rel), key
    return check
