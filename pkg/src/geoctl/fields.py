"""Vector fields on S^3 induced by the infinitesimal action of so(1,4).

A field is named by a triple ``(q, z, w)`` with ``q`` in H (symmetric part)
and ``z, w`` in Im H (left and right so(4) parts):

    X(x) = 1/2 (q - x conj(q) x) + z x + x w

On S^3 the symmetric term equals ``q - <q, x> x``, the gradient of the
height function ``<q, .>``.

Bracket convention: ``[V, W](p) = DV(p) W(p) - DW(p) V(p)``.  With it, the
map from matrices to fields is a homomorphism (linear fields ``x -> Ax``
satisfy ``[V_A, V_B] = V_[A,B]``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from . import lie_so14
from .errors import DegenerateFieldError, DomainError, InvalidElementError
from .quaternion import (
    PureQuaternion,
    Quaternion,
    QuaternionLike,
    UnitQuaternion,
    as_array,
    as_unit_array,
    qconj,
    qinner,
    qmul,
)
from .tolerances import ALGEBRAIC_TOL

LINEARIZATION_STEP = 1e-6
BRACKET_STEP = 1e-5
# eigenvalue real parts must clear this margin to count as attracting/repelling
CLASSIFY_MARGIN = 1e-9


@dataclass(frozen=True)
class FieldSpec:
    q: Quaternion = field(default_factory=lambda: Quaternion(0, 0, 0, 0))
    z: PureQuaternion = field(default_factory=lambda: PureQuaternion(0, 0, 0))
    w: PureQuaternion = field(default_factory=lambda: PureQuaternion(0, 0, 0))

    @classmethod
    def of(cls, q=(0, 0, 0, 0), z=(0, 0, 0), w=(0, 0, 0)) -> "FieldSpec":
        """Build from array-likes; ``z`` and ``w`` may be given with 3 or 4 entries."""
        return cls(
            Quaternion.from_array(as_array(q)),
            PureQuaternion.from_array(np.asarray(as_array(z))),
            PureQuaternion.from_array(np.asarray(as_array(w))),
        )

    @classmethod
    def from_vector(cls, v) -> "FieldSpec":
        v = np.asarray(v, dtype=float)
        return cls.of(v[:4], v[4:7], v[7:10])

    @property
    def vector(self) -> np.ndarray:
        """The 10 coordinates ``(q0..q3, z1..z3, w1..w3)``."""
        return np.concatenate([self.q.array, self.z.vector, self.w.vector])

    @property
    def is_symmetric(self) -> bool:
        return not (np.any(self.z.vector) or np.any(self.w.vector))

    def __add__(self, other: "FieldSpec") -> "FieldSpec":
        return FieldSpec.from_vector(self.vector + other.vector)

    def __sub__(self, other: "FieldSpec") -> "FieldSpec":
        return FieldSpec.from_vector(self.vector - other.vector)

    def __neg__(self) -> "FieldSpec":
        return FieldSpec.from_vector(-self.vector)

    def __mul__(self, scalar: float) -> "FieldSpec":
        return FieldSpec.from_vector(float(scalar) * self.vector)

    __rmul__ = __mul__

    def to_json(self) -> dict:
        return {"q": self.q.to_json(), "z": self.z.to_json(), "w": self.w.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "FieldSpec":
        return cls.of(data.get("q", (0, 0, 0, 0)), data.get("z", (0, 0, 0)),
                      data.get("w", (0, 0, 0)))


def symmetric(q: QuaternionLike) -> FieldSpec:
    """The gradient field X_(q,0,0)."""
    return FieldSpec.of(q=as_array(q))


# --- evaluation ---------------------------------------------------------------

def field_values(vec, x) -> np.ndarray:
    """Evaluate fields with 10-coordinate vectors ``vec`` at points ``x``.

    Both arguments broadcast over leading axes.  No unit-norm check: this is
    the ambient extension to R^4 used inside integrators.
    """
    vec = np.asarray(vec, dtype=float)
    x = np.asarray(x, dtype=float)
    q = vec[..., :4]
    zeros = np.zeros(vec.shape[:-1] + (1,))
    z = np.concatenate([zeros, vec[..., 4:7]], axis=-1)
    w = np.concatenate([zeros, vec[..., 7:10]], axis=-1)
    sym = 0.5 * (q - qmul(qmul(x, qconj(q)), x))
    return sym + qmul(z, x) + qmul(x, w)


def evaluate(spec: FieldSpec, x: QuaternionLike) -> Quaternion:
    """Tangent vector ``X_(q,z,w)(x)`` at a point of S^3."""
    xa = as_unit_array(x)
    return Quaternion.from_array(field_values(spec.vector, xa))


def gradient_height(q: QuaternionLike, p: QuaternionLike) -> Quaternion:
    """Gradient of ``<q, .>`` on S^3 at ``p``: ``q - <q,p> p``."""
    pa = as_unit_array(p)
    qa = as_array(q)
    return Quaternion.from_array(qa - qinner(qa, pa) * pa)


def f_values(vec, p) -> np.ndarray:
    """Array form of the F-function ``X(p) p^{-1}`` (points assumed unit)."""
    return qmul(field_values(vec, p), qconj(p))


def f_function(spec: FieldSpec, p: QuaternionLike) -> Quaternion:
    """``F(p) = X(p) conj(p)``; its zeros are exactly the singular points of X."""
    pa = as_unit_array(p)
    return Quaternion.from_array(f_values(spec.vector, pa))


# --- singularities -------------------------------------------------------------

class SingularityKind(str, Enum):
    ATTRACTOR = "attractor"
    REPELLER = "repeller"
    OTHER = "other"


@dataclass(frozen=True)
class Singularity:
    point: UnitQuaternion
    kind: SingularityKind
    eigenvalues: tuple = ()


def tangent_frame(p) -> np.ndarray:
    """Orthonormal basis (3x4) of the tangent space of S^3 at ``p``.

    Gram-Schmidt on the standard basis with the point removed; the basis
    vector most aligned with ``p`` is dropped.
    """
    p = np.asarray(p, dtype=float)
    order = np.argsort(np.abs(p))
    frame = []
    for idx in order[:3]:
        v = np.eye(4)[idx] - p[idx] * p
        for e in frame:
            v = v - (e @ v) * e
        frame.append(v / np.linalg.norm(v))
    return np.array(frame)


def f_linearization(spec: FieldSpec, p, step: float = LINEARIZATION_STEP) -> np.ndarray:
    """3x3 Jacobian of F at ``p`` by central differences along a tangent frame.

    Tangent vectors ``v`` are mapped to Im H by ``v -> v conj(p)`` (an
    isometry), so at a singular point the eigenvalues equal those of the
    field's linearization.
    """
    p = as_unit_array(p)
    vec = spec.vector
    frame = tangent_frame(p)
    out_frame = qmul(frame, qconj(p))
    jac = np.empty((3, 3))
    for j, e in enumerate(frame):
        plus = p + step * e
        minus = p - step * e
        plus /= np.linalg.norm(plus)
        minus /= np.linalg.norm(minus)
        d = (f_values(vec, plus) - f_values(vec, minus)) / (2 * step)
        jac[:, j] = out_frame @ d
    return jac


def classify(spec: FieldSpec, p) -> Singularity:
    eig = np.linalg.eigvals(f_linearization(spec, p))
    if np.all(eig.real < -CLASSIFY_MARGIN):
        kind = SingularityKind.ATTRACTOR
    elif np.all(eig.real > CLASSIFY_MARGIN):
        kind = SingularityKind.REPELLER
    else:
        kind = SingularityKind.OTHER
    return Singularity(UnitQuaternion.from_array(np.asarray(p, dtype=float)), kind,
                       tuple(complex(e) for e in eig))


def singularities_symmetric(q: QuaternionLike) -> tuple[Singularity, Singularity]:
    """Attractor ``q/|q|`` and repeller ``-q/|q|`` of X_(q,0,0), classified."""
    qa = as_array(q)
    n = float(np.linalg.norm(qa))
    if n == 0.0:
        raise DegenerateFieldError("X_(0,0,0) vanishes identically")
    a = qa / n
    a = a / np.linalg.norm(a)
    spec = symmetric(qa)
    return classify(spec, a), classify(spec, -a)


def attractor_of(q) -> np.ndarray:
    """Array form of ``q/|q|`` for one or many symmetric parts."""
    q = np.asarray(q, dtype=float)
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


# --- matrices <-> fields --------------------------------------------------------

def to_matrix(spec: FieldSpec) -> np.ndarray:
    """so(1,4) element whose infinitesimal action on S^3 is ``spec``."""
    basis = lie_so14.gamma_basis()
    m = lie_so14.embed_symmetric(spec.q.array)
    for e, zc, wc in zip("ijk", spec.z.vector, spec.w.vector):
        m = m + zc * basis.left[e] + wc * basis.right[e]
    return m


def from_matrix(m) -> FieldSpec:
    m = np.asarray(m, dtype=float)
    if not lie_so14.is_member(m):
        raise InvalidElementError("matrix is not in so(1,4)")
    split = lie_so14.cartan_split(m)
    left, right = lie_so14.gamma_coordinates(split.k_part)
    return FieldSpec.of(q=split.s_part[0, 1:], z=left, w=right)


def field_bracket(a: FieldSpec, b: FieldSpec, points, step: float = BRACKET_STEP) -> np.ndarray:
    """``[X_a, X_b]`` at ``points`` by central differences of the ambient fields."""
    p = np.asarray(points, dtype=float)
    va, vb = a.vector, b.vector
    xa = field_values(va, p)
    xb = field_values(vb, p)
    da_b = (field_values(va, p + step * xb) - field_values(va, p - step * xb)) / (2 * step)
    db_a = (field_values(vb, p + step * xa) - field_values(vb, p - step * xa)) / (2 * step)
    return da_b - db_a


def field_bracket_check(a: FieldSpec, b: FieldSpec, samples: Sequence) -> float:
    """Max deviation between the finite-difference field bracket and the field
    of the matrix commutator ``[to_matrix(a), to_matrix(b)]``."""
    pts = np.atleast_2d(np.asarray([as_array(s) for s in samples], dtype=float))
    if pts.shape[0] == 0:
        raise DomainError("at least one sample point is required")
    as_unit_array(pts)
    c = from_matrix(lie_so14.bracket(to_matrix(a), to_matrix(b)))
    diff = field_bracket(a, b, pts) - field_values(c.vector, pts)
    return float(np.max(np.linalg.norm(diff, axis=-1)))


# --- image of F_(1,0,0) on great circles through 1 ------------------------------

@dataclass(frozen=True)
class GreatCircleImage:
    points: np.ndarray        # samples p on C_z
    images: np.ndarray        # F_(1,0,0)(p), pure quaternions as 4-arrays
    coefficients: np.ndarray  # t with F(p) ~ t z
    line_deviation: float     # sup distance of an image from the line R z
    endpoint_gap: float       # 1 - max |t|

    @property
    def on_segment(self) -> bool:
        return bool(np.all(np.abs(self.coefficients) <= 1.0 + ALGEBRAIC_TOL))


def f_image_on_great_circle(z: QuaternionLike, n_samples: int) -> GreatCircleImage:
    """Sample F_(1,0,0) on the great circle through 1 and the unit pure ``z``."""
    za = as_array(z)
    if abs(za[0]) > 0.0:
        raise DomainError("z must be a pure quaternion")
    if abs(np.linalg.norm(za) - 1.0) > ALGEBRAIC_TOL:
        raise DomainError("z must have unit norm")
    if n_samples < 3:
        raise DomainError("need at least 3 samples")
    theta = 2 * np.pi * np.arange(n_samples) / n_samples
    one = np.array([1.0, 0.0, 0.0, 0.0])
    pts = np.cos(theta)[:, None] * one + np.sin(theta)[:, None] * za
    images = f_values(symmetric(one).vector, pts)
    coeff = images @ za
    resid = images - coeff[:, None] * za
    return GreatCircleImage(
        points=pts,
        images=images,
        coefficients=coeff,
        line_deviation=float(np.max(np.linalg.norm(resid, axis=-1))),
        endpoint_gap=float(1.0 - np.max(np.abs(coeff))),
    )
