import math

import numpy as np
import pytest

from kitaev_zb.model import ChainParams

R2 = 1 / math.sqrt(2)
DRIFT_SPINOR = (R2, -R2)


@pytest.fixture
def magic():
    return ChainParams(mu=0.0, tp=1.0, d=1.0, n_sites=256)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_field(rng, n_sites, origin=None):
    from kitaev_zb.state import SpinorField

    z = rng.normal(size=(2, n_sites)) + 1j * rng.normal(size=(2, n_sites))
    z /= np.linalg.norm(z)
    return SpinorField(z[0], z[1], origin=n_sites // 2 if origin is None else origin)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[key])
