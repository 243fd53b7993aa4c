import numpy as np
import pytest

from geoctl.errors import ConfigurationError, ControlRangeError
from geoctl.fields import FieldSpec, symmetric
from geoctl.system import ControlRange, ControlSystem

I, J = np.eye(4)[1:3]


def test_ranges():
    box = ControlRange.box(2, 0, 1)
    assert box.contains([0.5, 1.0]) and not box.contains([1.5, 0])
    assert not box.contains([0.5])
    assert box.extreme_points().shape == (4, 2)
    ball = ControlRange.ball(3, 2.0)
    assert ball.contains([0, 2, 0]) and not ball.contains([2, 2, 0])
    fin = ControlRange.finite([[-1], [1]])
    assert fin.contains([1.0]) and not fin.contains([0.0])
    for bad in (lambda: ControlRange.box(1, 1, 0), lambda: ControlRange.ball(2, -1),
                lambda: ControlRange.finite([]), lambda: ControlRange("cube", 1),
                lambda: ControlRange("box", 0)):
        with pytest.raises(ConfigurationError):
            bad()


@pytest.mark.parametrize("crange", [ControlRange.box(2, -1, 1), ControlRange.ball(3, 0.7),
                                    ControlRange.finite([[0, 0], [1, 0], [0, 1]])])
def test_samples_inside(crange, rng):
    u = crange.sample(rng, 500)
    assert u.shape == (500, crange.dim)
    assert all(crange.contains(v) for v in u)
    assert ControlRange.from_json(crange.to_json()) == crange


def test_ball_samples_hit_boundary(rng):
    u = ControlRange.ball(3, 1.0).sample(rng, 1000)
    r = np.linalg.norm(u, axis=1)
    assert 0.35 < np.mean(np.isclose(r, 1.0)) < 0.65


def test_system_frozen_and_json():
    sys_ = ControlSystem(symmetric([1, 0, 0, 0]), (symmetric(I), FieldSpec.of(w=J)),
                         ControlRange.box(2, -1, 1))
    f = sys_.frozen([0.5, -1])
    assert np.allclose(f.vector, sys_.drift.vector + 0.5 * symmetric(I).vector
                       - FieldSpec.of(w=J).vector)
    assert not sys_.is_symmetric
    with pytest.raises(ControlRangeError):
        sys_.frozen([2, 0])
    assert ControlSystem.from_json(sys_.to_json()) == sys_
    rev = sys_.reversed()
    assert np.allclose(rev.frozen_vectors([0.5, -1]), -sys_.frozen_vectors([0.5, -1]))


def test_system_validation():
    with pytest.raises(ConfigurationError):
        ControlSystem(symmetric([1, 0, 0, 0]), (symmetric(I),))
    with pytest.raises(ConfigurationError):
        ControlSystem(symmetric([1, 0, 0, 0]), (symmetric(I),), ControlRange.box(2))
    drift_only = ControlSystem(symmetric([1, 0, 0, 0]))
    assert drift_only.m == 0 and drift_only.is_symmetric
    drift_only.check_control([])
    with pytest.raises(ControlRangeError):
        drift_only.check_control([1.0])
