import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from geoctl.convex import (SphericalRegion, cone_distance, dome_invariance_threshold, dome_real_rate,
                           geodesic_segment_points, is_pointed, r_t)
from geoctl.errors import ConfigurationError, DomainError, NonUniqueGeodesicError
from geoctl.fields import field_values
from geoctl.quaternion import random_unit

from conftest import units

ONE = np.array([1.0, 0, 0, 0])
I, J, K = np.eye(4)[1:]
S2 = np.sqrt(2)


def test_contains_examples():
    assert SphericalRegion.dome(ONE, 1 / S2).contains((ONE + I) / S2, tol=1e-9)
    assert not SphericalRegion.dome(ONE, 1 / S2).contains(I)
    seg = SphericalRegion.segment((ONE + I) / S2, (ONE - I) / S2)
    assert seg.contains(seg.p1) and seg.contains(ONE) and not seg.contains(J)
    hull = SphericalRegion.hull([ONE, I, J])
    assert hull.contains((ONE + I + J) / np.sqrt(3))
    assert not hull.contains(K) and not hull.contains(-I)


def test_pointed_examples():
    assert is_pointed([ONE, I])
    assert not is_pointed([I, -I])
    assert not is_pointed([ONE, I, J, K, -(ONE + I + J + K) / 2])
    with pytest.raises(DomainError):
        is_pointed([])
    with pytest.raises(ConfigurationError):
        SphericalRegion.hull([I, -I])


def test_pointed_invariance(rng):
    for _ in range(30):
        g = rng.standard_normal((rng.integers(2, 7), 4))
        base = is_pointed(g)
        perm = g[rng.permutation(len(g))] * rng.uniform(0.1, 10, size=(len(g), 1))
        assert is_pointed(perm) == base


def test_segment_points_examples():
    pts = geodesic_segment_points(ONE, I, 3)
    assert np.allclose(pts, [ONE, (ONE + I) / S2, I])
    assert np.allclose(geodesic_segment_points(I, I, 4), I)
    pts = geodesic_segment_points((ONE + I) / S2, (ONE - I) / S2, 5)
    assert np.allclose(pts[2], ONE)
    assert np.allclose(pts[:, 2:], 0)
    with pytest.raises(NonUniqueGeodesicError):
        geodesic_segment_points(ONE, -ONE, 3)
    with pytest.raises(NonUniqueGeodesicError):
        SphericalRegion.segment(I, -I)
    with pytest.raises(DomainError):
        geodesic_segment_points(ONE, I, 1)


def test_segment_points_uniform(rng):
    a, b = random_unit(rng, 2)
    pts = geodesic_segment_points(a, b, 7)
    steps = np.arccos(np.clip(np.sum(pts[1:] * pts[:-1], axis=1), -1, 1))
    assert np.allclose(steps, steps[0], atol=1e-9)
    assert np.array_equal(pts[0], a) and np.array_equal(pts[-1], b)


@given(units, units, st.integers(2, 20), st.integers(2, 20))
def test_segment_convexity(a, b, n, m):
    if np.linalg.norm(a + b) < 1e-3:
        return
    seg = SphericalRegion.segment(a, b)
    pts = geodesic_segment_points(a, b, n)
    i, j = 0, n - 1
    sub = geodesic_segment_points(pts[i // 2], pts[(i + j) // 2 + 1 if n > 2 else j], m)
    assert np.all(seg.contains(sub, tol=1e-9))


def test_thresholds():
    assert dome_invariance_threshold(I) == pytest.approx(1 / S2)
    assert dome_invariance_threshold([0, 0, 0, 0]) == 1.0
    assert dome_invariance_threshold(2 * J) == pytest.approx(1 / np.sqrt(5))
    assert r_t(I, np.pi / 2) == pytest.approx(1.0)
    assert r_t(I, 0.0) == pytest.approx(1 / S2)
    assert r_t(K, np.pi / 3) == pytest.approx(2 / np.sqrt(5))
    for t in np.linspace(0, np.pi, 13):
        assert r_t(2 * J, t) >= dome_invariance_threshold(2 * J) - 1e-15


def test_real_part_dynamics(rng):
    n = 10_000
    z = np.c_[np.zeros(n), rng.standard_normal((n, 3)) * rng.uniform(0.1, 3, (n, 1))]
    zn = np.linalg.norm(z, axis=1)
    a = rng.random(n) / np.sqrt(1 + zn ** 2)
    w = np.c_[np.zeros(n), rng.standard_normal((n, 3))]
    w *= (np.sqrt(1 - a ** 2) / np.linalg.norm(w, axis=1))[:, None]
    p = a[:, None] * ONE + w
    for sign in (+1, -1):
        vec = np.c_[np.tile(ONE, (n, 1)) + sign * z, np.zeros((n, 6))]
        re = field_values(vec, p)[:, 0]
        assert np.all(re > 0)
        cos_t = np.sum(w * z, axis=1) / (np.linalg.norm(w, axis=1) * zn)
        closed = np.array([dome_real_rate(z[k], a[k], np.arccos(np.clip(cos_t[k], -1, 1)), sign)
                           for k in range(0, n, 500)])
        assert np.allclose(closed, re[::500], atol=1e-12)


def test_dome_as_hull(rng):
    for level in (0.3, 1 / S2):
        dome = SphericalRegion.dome(ONE, level)
        gens = np.concatenate([dome.boundary_sample(200), ONE[None]])
        hull = SphericalRegion.hull(gens)
        pts = dome.sample(rng, 300, boundary_fraction=0.3)
        assert np.all(hull.contains(pts, tol=2e-2))


def test_sampling_inside(rng):
    regions = [SphericalRegion.dome(ONE, 0.5),
               SphericalRegion.segment(ONE, (ONE + J) / S2),
               SphericalRegion.hull([ONE, I, J, (ONE + I + J) / np.sqrt(3)])]
    for region in regions:
        pts = region.sample(rng, 200, boundary_fraction=0.5)
        assert pts.shape == (200, 4)
        assert np.allclose(np.linalg.norm(pts, axis=1), 1)
        assert np.all(region.contains(pts, tol=1e-9))
        b = region.boundary_sample(50)
        assert np.all(region.contains(b, tol=1e-9))
        assert SphericalRegion.from_json(region.to_json()).to_json() == region.to_json()
    assert np.allclose(regions[0].sample(rng, 20, 1.0) @ ONE, 0.5)


def test_extended_segment():
    seg = SphericalRegion.segment((ONE + I) / S2, (ONE - I) / S2)
    big = seg.extended(0.2)
    assert big.arc_length == pytest.approx(seg.arc_length + 0.4)
    assert np.all(big.contains(seg.boundary_sample(20)))
    with pytest.raises(ConfigurationError):
        SphericalRegion.dome(ONE, 0.5).extended(0.1)
    with pytest.raises(ConfigurationError):
        SphericalRegion.dome(ONE, 0.5).arc_length


def test_region_validation():
    with pytest.raises(ConfigurationError):
        SphericalRegion.dome(ONE, 1.0)
    with pytest.raises(ConfigurationError):
        SphericalRegion.dome(2 * ONE, 0.5)
    with pytest.raises(ConfigurationError):
        SphericalRegion.from_json({"kind": "torus"})


def test_cone_distance():
    g = np.array([ONE, I])
    assert cone_distance(g, (ONE + I) / S2) <= 1e-12
    assert cone_distance(g, J) == pytest.approx(1.0)
    assert cone_distance(g, -ONE) == pytest.approx(1.0)


def test_any_within():
    hull = SphericalRegion.hull([ONE, I, J])
    assert hull.any_within(np.array([K, -ONE, (ONE + I) / S2]), 1e-9)
    assert not hull.any_within(np.array([K, -ONE]), 0.1)
