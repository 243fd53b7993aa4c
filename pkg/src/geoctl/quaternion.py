"""Quaternion algebra on H = R^4 and the unit sphere S^3.

Two layers live here.  The value types :class:`Quaternion`,
:class:`UnitQuaternion` and :class:`PureQuaternion` are small immutable
objects for readable code and serialization.  The array functions
(``qmul``, ``qconj`` ...) act on numpy arrays whose last axis has length 4,
ordered ``(w, x, y, z)`` = ``1, i, j, k``; the integrators and samplers use
those directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from .errors import DegeneratePointError, DomainError
from .tolerances import ALGEBRAIC_TOL, DEGENERATE_NORM


# ----------------------------------------------------------------------------
# array layer
# ----------------------------------------------------------------------------

def qmul(a, b):
    """Hamilton product of quaternion arrays, broadcasting over leading axes.

    Uses the scalar/vector split ``a0 b0 - a.b + a0 b + b0 a + a x b``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a0, av = a[..., :1], a[..., 1:]
    b0, bv = b[..., :1], b[..., 1:]
    scalar = a0 * b0 - np.sum(av * bv, axis=-1, keepdims=True)
    vector = a0 * bv + b0 * av + np.cross(av, bv)
    return np.concatenate([scalar, vector], axis=-1)


def qconj(a):
    return np.asarray(a, dtype=float) * np.array([1.0, -1.0, -1.0, -1.0])


def qnorm(a):
    return np.linalg.norm(np.asarray(a, dtype=float), axis=-1)


def qinner(a, b):
    """Euclidean inner product on R^4 (equal to ``Re(a conj(b))``)."""
    return np.sum(np.asarray(a, dtype=float) * np.asarray(b, dtype=float), axis=-1)


def qnormalize(a):
    a = np.asarray(a, dtype=float)
    return a / qnorm(a)[..., None]


def left_matrix(p) -> np.ndarray:
    """4x4 real matrix L with ``L @ q == p * q``."""
    w, x, y, z = np.asarray(p, dtype=float)
    return np.array([
        [w, -x, -y, -z],
        [x, w, -z, y],
        [y, z, w, -x],
        [z, -y, x, w],
    ])


def right_matrix(p) -> np.ndarray:
    """4x4 real matrix R with ``R @ q == q * p``."""
    w, x, y, z = np.asarray(p, dtype=float)
    return np.array([
        [w, -x, -y, -z],
        [x, w, z, -y],
        [y, -z, w, x],
        [z, y, -x, w],
    ])


def qexp_pure(v):
    """exp of a pure quaternion given by its 3 imaginary components."""
    v = np.asarray(v, dtype=float)
    theta = np.linalg.norm(v, axis=-1, keepdims=True)
    safe = np.where(theta > 0, theta, 1.0)
    return np.concatenate([np.cos(theta), np.sin(theta) * v / safe], axis=-1)


def random_unit(rng: np.random.Generator, size=None) -> np.ndarray:
    """Uniform samples on S^3 (normalized Gaussians)."""
    shape = (4,) if size is None else (*np.atleast_1d(size), 4)
    g = rng.standard_normal(shape)
    return g / np.linalg.norm(g, axis=-1, keepdims=True)


# ----------------------------------------------------------------------------
# value types
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class Quaternion:
    w: float
    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("w", "x", "y", "z"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise DomainError(f"non-finite quaternion component {name}={value}")
            object.__setattr__(self, name, value)

    @classmethod
    def from_array(cls, a) -> "Quaternion":
        a = np.asarray(a, dtype=float).reshape(-1)
        if a.shape != (4,):
            raise DomainError(f"expected 4 components, got {a.shape[0]}")
        return cls(*a)

    @property
    def array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    @property
    def re(self) -> float:
        return self.w

    @property
    def im(self) -> "PureQuaternion":
        return PureQuaternion(self.x, self.y, self.z)

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm(self) -> float:
        return float(np.linalg.norm(self.array))

    def inverse(self) -> "Quaternion":
        n2 = float(self.array @ self.array)
        if n2 == 0.0:
            raise DomainError("zero quaternion has no inverse")
        return Quaternion.from_array(qconj(self.array) / n2)

    def __add__(self, other):
        return Quaternion.from_array(self.array + as_array(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Quaternion.from_array(self.array - as_array(other))

    def __rsub__(self, other):
        return Quaternion.from_array(as_array(other) - self.array)

    def __neg__(self):
        return Quaternion.from_array(-self.array)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Quaternion.from_array(self.array * other)
        return Quaternion.from_array(qmul(self.array, as_array(other)))

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return Quaternion.from_array(self.array * other)
        return Quaternion.from_array(qmul(as_array(other), self.array))

    def __truediv__(self, scalar: float):
        return Quaternion.from_array(self.array / scalar)

    def isclose(self, other, tol: float = ALGEBRAIC_TOL) -> bool:
        return bool(np.max(np.abs(self.array - as_array(other))) <= tol)

    def to_json(self) -> list:
        return self.array.tolist()

    def __repr__(self):
        return f"Quaternion({self.w:.6g}, {self.x:.6g}, {self.y:.6g}, {self.z:.6g})"


@dataclass(frozen=True, repr=False)
class UnitQuaternion(Quaternion):
    """A point of S^3.  Construction fails unless | |q| - 1 | <= 1e-12."""

    def __post_init__(self):
        super().__post_init__()
        n = self.norm()
        if abs(n - 1.0) > ALGEBRAIC_TOL:
            raise DomainError(f"|q| = {n!r} is not 1")

    @classmethod
    def from_array(cls, a) -> "UnitQuaternion":
        a = np.asarray(a, dtype=float).reshape(-1)
        if a.shape != (4,):
            raise DomainError(f"expected 4 components, got {a.shape[0]}")
        return cls(*a)

    def inverse(self) -> "UnitQuaternion":
        return UnitQuaternion.from_array(qconj(self.array))

    def __repr__(self):
        return f"UnitQuaternion({self.w:.6g}, {self.x:.6g}, {self.y:.6g}, {self.z:.6g})"


@dataclass(frozen=True)
class PureQuaternion:
    """Element of Im H; the scalar part is structurally absent."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("x", "y", "z"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise DomainError(f"non-finite component {name}={value}")
            object.__setattr__(self, name, value)

    @classmethod
    def from_array(cls, a) -> "PureQuaternion":
        a = np.asarray(a, dtype=float).reshape(-1)
        if a.shape == (4,):
            if a[0] != 0.0:
                raise DomainError("quaternion with nonzero real part is not pure")
            a = a[1:]
        if a.shape != (3,):
            raise DomainError(f"expected 3 components, got {a.shape[0]}")
        return cls(*a)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    @property
    def array(self) -> np.ndarray:
        return np.array([0.0, self.x, self.y, self.z])

    def as_quaternion(self) -> Quaternion:
        return Quaternion(0.0, self.x, self.y, self.z)

    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))

    def __add__(self, other: "PureQuaternion") -> "PureQuaternion":
        return PureQuaternion.from_array(self.vector + other.vector)

    def __sub__(self, other: "PureQuaternion") -> "PureQuaternion":
        return PureQuaternion.from_array(self.vector - other.vector)

    def __neg__(self):
        return PureQuaternion.from_array(-self.vector)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return PureQuaternion.from_array(self.vector * other)
        return self.as_quaternion() * other

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return PureQuaternion.from_array(self.vector * other)
        return other * self.as_quaternion()

    def to_json(self) -> list:
        return self.vector.tolist()


QuaternionLike = Union[Quaternion, PureQuaternion, Iterable[float], np.ndarray]

ONE = Quaternion(1.0, 0.0, 0.0, 0.0)
I = Quaternion(0.0, 1.0, 0.0, 0.0)
J = Quaternion(0.0, 0.0, 1.0, 0.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


def as_array(p: QuaternionLike) -> np.ndarray:
    """4-component float array for any quaternion-like input."""
    if isinstance(p, (Quaternion, PureQuaternion)):
        return p.array
    a = np.asarray(p, dtype=float)
    if a.shape[-1] == 3:
        a = np.concatenate([np.zeros(a.shape[:-1] + (1,)), a], axis=-1)
    if a.shape[-1] != 4:
        raise DomainError(f"cannot interpret shape {a.shape} as quaternion")
    return a


def as_unit_array(p: QuaternionLike, tol: float = ALGEBRAIC_TOL) -> np.ndarray:
    a = as_array(p)
    n = qnorm(a)
    if np.any(np.abs(n - 1.0) > tol):
        raise DomainError(f"point not on S^3: |p| = {n}")
    return a


# ----------------------------------------------------------------------------
# named operations
# ----------------------------------------------------------------------------

def mul(p: QuaternionLike, q: QuaternionLike) -> Quaternion:
    return Quaternion.from_array(qmul(as_array(p), as_array(q)))


def conjugate(p: QuaternionLike) -> Quaternion:
    return Quaternion.from_array(qconj(as_array(p)))


def norm(p: QuaternionLike) -> float:
    return float(qnorm(as_array(p)))


def inverse(p: QuaternionLike) -> Quaternion:
    return Quaternion.from_array(as_array(p)).inverse()


def re(p: QuaternionLike) -> float:
    return float(as_array(p)[0])


def im(p: QuaternionLike) -> PureQuaternion:
    return PureQuaternion.from_array(as_array(p)[1:])


def inner(p: QuaternionLike, q: QuaternionLike) -> float:
    return float(qinner(as_array(p), as_array(q)))


def project_to_sphere(p: QuaternionLike) -> UnitQuaternion:
    a = as_array(p)
    n = float(qnorm(a))
    if not n > DEGENERATE_NORM:
        raise DegeneratePointError(f"cannot project |p| = {n:g} onto S^3")
    a = a / n
    # one more pass absorbs the rounding of the first division
    return UnitQuaternion.from_array(a / float(qnorm(a)))
