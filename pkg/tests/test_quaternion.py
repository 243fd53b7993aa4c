import numpy as np
import pytest
from hypothesis import given

from geoctl import quaternion as Q
from geoctl.errors import DegeneratePointError, DomainError
from geoctl.quaternion import I, J, K, ONE, PureQuaternion, Quaternion, UnitQuaternion

from conftest import nonzero_quats, pures, quats, units

TOL = 1e-12


def test_product_table():
    assert Q.mul(I, J).isclose(K)
    assert Q.mul(J, K).isclose(I)
    assert Q.mul(K, I).isclose(J)
    for e in (I, J, K):
        assert Q.mul(e, e).isclose(-ONE)
    assert Q.mul(J, I).isclose(-K)


def test_mul_examples():
    p = Quaternion(0.3, -1.2, 2.0, 0.5)
    assert Q.mul(ONE, p).isclose(p)
    assert Q.mul([1, 1, 0, 0], [1, -1, 0, 0]).isclose([2, 0, 0, 0])


def test_conjugate_norm_inverse():
    assert Q.conjugate([1, 1, 0, 0]).isclose([1, -1, 0, 0])
    assert Q.norm([1, 1, 1, 1]) == pytest.approx(2.0, abs=TOL)
    assert Q.inverse(K).isclose(-K)
    with pytest.raises(DomainError):
        Q.inverse([0, 0, 0, 0])


def test_project_to_sphere():
    s = 1 / np.sqrt(2)
    assert Q.project_to_sphere([2, 2, 0, 0]).isclose([s, s, 0, 0])
    assert Q.project_to_sphere(J).isclose(J)
    assert Q.project_to_sphere([1, 1, 1, 1]).isclose([0.5] * 4)
    with pytest.raises(DegeneratePointError):
        Q.project_to_sphere([1e-15, 0, 0, 0])


def test_re_im():
    assert Q.im([1, 1, 0, 0]) == PureQuaternion(1, 0, 0)
    assert Q.re(J) == 0.0
    pq = Q.mul(I, Q.conjugate(I))
    assert pq.im.norm() <= TOL
    assert pq.re == pytest.approx(1.0)


def test_value_types_validate():
    with pytest.raises(DomainError):
        Quaternion(np.nan, 0, 0, 0)
    with pytest.raises(DomainError):
        UnitQuaternion(1.0, 1e-3, 0, 0)
    with pytest.raises(DomainError):
        PureQuaternion.from_array([1.0, 0, 0, 0])
    assert PureQuaternion.from_array([0.0, 1, 2, 3]).array[0] == 0.0
    u = UnitQuaternion(0.0, 0.6, 0.8, 0.0)
    assert u.inverse().isclose(u.conjugate())


def test_json_roundtrip():
    p = Quaternion(1.5, -2, 0.25, 3)
    assert Quaternion.from_array(p.to_json()) == p
    z = PureQuaternion(1, 2, 3)
    assert PureQuaternion.from_array(z.to_json()) == z


def test_as_array_pads_pure():
    assert np.array_equal(Q.as_array([1, 2, 3]), [0, 1, 2, 3])
    with pytest.raises(DomainError):
        Q.as_array([1, 2])


@given(quats, quats)
def test_norm_multiplicative(p, q):
    lhs = Q.qnorm(Q.qmul(p, q))
    assert abs(lhs - Q.qnorm(p) * Q.qnorm(q)) <= TOL * max(1.0, lhs)


@given(quats, quats, quats)
def test_associative(p, q, r):
    a = Q.qmul(Q.qmul(p, q), r)
    b = Q.qmul(p, Q.qmul(q, r))
    assert np.max(np.abs(a - b)) <= TOL * max(1.0, np.max(np.abs(a)))


@given(quats, quats)
def test_inner_is_real_part(p, q):
    lhs = Q.qinner(p, q)
    rhs = Q.qmul(p, Q.qconj(q))[0]
    assert abs(lhs - rhs) <= TOL * max(1.0, abs(lhs), Q.qnorm(p) * Q.qnorm(q))


@given(units)
def test_unit_times_conjugate(p):
    assert np.allclose(Q.qmul(p, Q.qconj(p)), [1, 0, 0, 0], atol=TOL)


@given(quats)
def test_conjugate_involution(p):
    assert np.array_equal(Q.qconj(Q.qconj(p)), p)


@given(nonzero_quats)
def test_inverse(p):
    inv = Q.Quaternion.from_array(p).inverse().array
    assert np.allclose(Q.qmul(p, inv), [1, 0, 0, 0], atol=1e-10)


@given(pures, pures)
def test_pure_product_formula(a, b):
    # for pure quaternions: a b = -a.b + a x b
    prod = Q.qmul(np.r_[0, a], np.r_[0, b])
    assert np.allclose(prod, np.r_[-a @ b, np.cross(a, b)], atol=1e-10)


def test_matrix_oracle(rng):
    p = rng.standard_normal((1000, 4))
    q = rng.standard_normal((1000, 4))
    direct = Q.qmul(p, q)
    left = np.einsum("nij,nj->ni", np.array([Q.left_matrix(x) for x in p]), q)
    right = np.einsum("nij,nj->ni", np.array([Q.right_matrix(y) for y in q]), p)
    assert np.max(np.abs(direct - left)) <= TOL * 10
    assert np.max(np.abs(direct - right)) <= TOL * 10


def test_random_unit_and_exp(rng):
    u = Q.random_unit(rng, 50)
    assert np.allclose(Q.qnorm(u), 1.0, atol=TOL)
    e = Q.qexp_pure([np.pi / 2, 0, 0])
    assert np.allclose(e, [0, 1, 0, 0], atol=TOL)
