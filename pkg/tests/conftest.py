import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

finite = st.floats(-10.0, 10.0, allow_nan=False, allow_infinity=False)
quats = arrays(np.float64, 4, elements=finite)
pures = arrays(np.float64, 3, elements=finite)


def _unit(a):
    n = np.linalg.norm(a)
    return a / n


units = quats.filter(lambda a: np.linalg.norm(a) > 1e-3).map(_unit)
nonzero_quats = quats.filter(lambda a: np.linalg.norm(a) > 1e-3)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
