import numpy as np
import pytest

from geoctl.errors import ConfigurationError, DomainError
from geoctl.orbits import Schedule
from geoctl.projective import (ProjPoint, b_invariance_residual, build_example, canonicalize,
                               default_w, dome_C, example_attractor, example_attractor_sweep,
                               induced_field, larc_check_example, proj_distance, proj_flow,
                               rotated_boundary, sym_embed, sym_inner)
from geoctl.lie_so14 import bracket_closure


def unit_rows(rng, k, n):
    v = rng.standard_normal((k, n))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def test_canonical_representatives(rng):
    v = unit_rows(rng, 50, 4)
    c = canonicalize(v)
    assert np.all(c[:, 0] > 0)
    assert np.allclose(canonicalize(-v), c)
    assert np.allclose(canonicalize([0, -1, 0]), [0, 1, 0])
    assert ProjPoint(v[0]).same(ProjPoint(-v[0]))
    assert proj_distance(v[0], -v[0]) == 0
    with pytest.raises(DomainError):
        ProjPoint([1.0, 1.0, 0.0])


def test_induced_field_examples(rng):
    n = 4
    m = np.diag([1.0, 0, 0, 0])
    e1 = np.eye(n)[0]
    assert np.allclose(induced_field(m, e1), 0)
    assert np.allclose(induced_field(m, [0, 0.6, 0.8, 0]), 0)
    sys_ = build_example(n, default_w(n))
    assert np.linalg.norm(induced_field(sys_.A, sys_.v0)) <= 1e-12
    x = unit_rows(rng, 100, n)
    mats = rng.standard_normal((100, n, n))
    val = induced_field(mats, x)
    assert np.max(np.abs(np.sum(val * x, axis=1))) <= 1e-12
    assert np.allclose(induced_field(mats, -x), -val, atol=1e-14)


def test_build_example():
    assert build_example(3, default_w(3)).m == 1
    s4 = build_example(4, default_w(4))
    assert s4.m == 3
    assert np.allclose(s4.v0[0], 0.5) and np.isclose(np.linalg.norm(s4.v0), 1)
    ev = np.sort(np.linalg.eigvalsh(s4.A))
    assert np.allclose(ev, [-0.25, -0.25, -0.25, 0.75], atol=1e-10)
    assert abs(np.trace(s4.A)) <= 1e-12
    for bad in ([0, 0], [1, 1], [0.5]):
        with pytest.raises(ConfigurationError):
            build_example(3, bad)
    with pytest.raises(ConfigurationError):
        build_example(2, [np.sqrt(0.5)])


def test_sym_inner(rng):
    n = 3
    v = unit_rows(rng, 10_000, n)
    w = unit_rows(rng, 10_000, n)
    trace = np.einsum("kij,kji->k", np.einsum("ki,kj->kij", v, v) - np.eye(n) / n,
                      np.einsum("ki,kj->kij", w, w) - np.eye(n) / n)
    assert np.max(np.abs(trace - (np.sum(v * w, axis=1) ** 2 - 1 / n))) <= 1e-12
    V = sym_embed(v[0])
    assert sym_inner(V, V) == pytest.approx(1 - 1 / n, abs=1e-12)
    assert sym_inner(sym_embed([1, 0, 0]), sym_embed([0, 1, 0])) == pytest.approx(-1 / n, abs=1e-12)
    assert np.allclose(sym_embed([1, 0, 0]), np.diag([1, 0, 0]) - np.eye(3) / 3)
    with pytest.raises(DomainError):
        sym_embed([1, 1, 0])


def test_dome_examples():
    d = dome_C(3)
    s = build_example(3, default_w(3))
    assert d.contains([1, 0, 0]) and d.contains(s.v0) and d.contains(-s.v0)
    assert not d.contains([0, 1, 0])
    with pytest.raises(ConfigurationError):
        dome_C(1)


@pytest.mark.parametrize("n,rank", [(3, 8), (4, 15)])
def test_larc_example(n, rank):
    s = build_example(n, default_w(n))
    assert larc_check_example(s) == rank
    assert len(bracket_closure(list(s.B))) == s.m


def test_drift_only_fixed_point():
    s = build_example(3, default_w(3))
    sched = [Schedule([5.0], [[0.0]])]
    pts, _ = proj_flow(s, s.v0, sched)
    assert np.max(proj_distance(pts, s.v0)) <= 1e-12


def test_b_only_invariance():
    for n in (3, 4):
        assert b_invariance_residual(build_example(n, default_w(n)), trials=50) <= 1e-9


def test_attractors():
    s = build_example(3, default_w(3))
    assert proj_distance(example_attractor(s, [0.0]), s.v0) <= 1e-12
    # conjugated drifts have attractors on the boundary of the dome
    b = rotated_boundary(s, 50)
    assert np.allclose(np.abs(b[:, 0]), 1 / np.sqrt(3), atol=1e-12)
    # the frozen fields A + u B keep their attractors inside the dome
    sweep = example_attractor_sweep(s, np.linspace(-1, 1, 21)[:, None])
    assert np.all(dome_C(3).contains(sweep))


def test_proj_flow_matches_expm(rng):
    from scipy.linalg import expm
    s = build_example(3, default_w(3))
    x0 = unit_rows(rng, 1, 3)[0]
    sched = Schedule([0.7, 1.3], [[0.5], [-1.0]])
    pts, idx = proj_flow(s, x0, [sched], h=1e-3)
    y = expm(1.3 * s.matrices([-1.0])) @ expm(0.7 * s.matrices([0.5])) @ x0
    assert proj_distance(pts[-1], y / np.linalg.norm(y)) <= 1e-9
    assert np.all(idx == 0)
