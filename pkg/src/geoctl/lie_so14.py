"""Matrix model of so(1,4).

Two realizations are used.  The ``I_{1,4} = diag(1,-1,-1,-1,-1)`` form holds
the Cartan decomposition so(4) + H that the vector fields on S^3 are built
from: an element is ``[[0, b], [b^T, g]]`` with ``g`` skew.  The
``J_{1,4}`` form (``-1_3`` block plus an off-diagonal 2x2 swap) diagonalizes
a maximal abelian subspace and is only used for the restricted root spaces.
No conversion between the two realizations is provided.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import qr

from .errors import ConfigurationError, InvalidElementError, NotSymmetricError
from .quaternion import Quaternion, as_array
from .tolerances import ALGEBRAIC_TOL, RANK_TOL

I14 = np.diag([1.0, -1.0, -1.0, -1.0, -1.0])

J14 = np.zeros((5, 5))
J14[:3, :3] = -np.eye(3)
J14[3, 4] = J14[4, 3] = 1.0

DIM = 10


def membership_residual(m, form: np.ndarray = I14) -> float:
    """Largest entry of ``form @ m + m.T @ form``."""
    m = np.asarray(m, dtype=float)
    return float(np.max(np.abs(form @ m + m.T @ form)))


def is_member(m, form: np.ndarray = I14, tol: float = ALGEBRAIC_TOL) -> bool:
    m = np.asarray(m, dtype=float)
    return m.shape == (5, 5) and membership_residual(m, form) <= tol


def _checked(m, form=I14) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.shape != (5, 5):
        raise InvalidElementError(f"expected a 5x5 matrix, got {m.shape}")
    r = membership_residual(m, form)
    if r > ALGEBRAIC_TOL:
        raise InvalidElementError(f"not in so(1,4): membership residual {r:.3g}")
    return m


def bracket(a, b) -> np.ndarray:
    """Commutator ``ab - ba`` of two so(1,4) elements (I_{1,4} realization)."""
    a = _checked(a)
    b = _checked(b)
    return a @ b - b @ a


def commutator(a, b) -> np.ndarray:
    """Unchecked ``ab - ba`` for square matrices of any size."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return a @ b - b @ a


# --- symmetric part <-> quaternions -------------------------------------------

def embed_symmetric(q) -> np.ndarray:
    """Quaternion ``p + q i + r j + s k`` -> ``[[0, b], [b^T, 0]]``, ``b = (p,q,r,s)``."""
    beta = as_array(q)
    m = np.zeros((5, 5))
    m[0, 1:] = beta
    m[1:, 0] = beta
    return m


def extract_symmetric(m) -> Quaternion:
    m = _checked(m)
    k, _ = _split(m)
    if np.max(np.abs(k)) > ALGEBRAIC_TOL:
        raise NotSymmetricError("matrix has a nonzero so(4) component")
    return Quaternion.from_array(m[0, 1:])


# --- gamma matrices -----------------------------------------------------------

_A2 = np.array([[0.0, -1.0], [1.0, 0.0]])
_B2 = np.array([[0.0, 1.0], [1.0, 0.0]])
_C2 = np.array([[-1.0, 0.0], [0.0, 1.0]])
_Z2 = np.zeros((2, 2))
_I2 = np.eye(2)


def _pad(gamma: np.ndarray) -> np.ndarray:
    m = np.zeros((5, 5))
    m[1:, 1:] = gamma
    return m


# right multiplication x -> x e   (written gamma_e)
GAMMA_RIGHT = {
    "i": np.block([[_A2, _Z2], [_Z2, -_A2]]),
    "j": np.block([[_Z2, -_I2], [_I2, _Z2]]),
    "k": np.block([[_Z2, _A2], [_A2, _Z2]]),
}
# left multiplication x -> e x    (written _e gamma)
GAMMA_LEFT = {
    "i": np.block([[_A2, _Z2], [_Z2, _A2]]),
    "j": np.block([[_Z2, _C2], [-_C2, _Z2]]),
    "k": np.block([[_Z2, -_B2], [_B2, _Z2]]),
}


@dataclass(frozen=True)
class GammaBasis:
    """The six so(4) generators padded to 5x5.

    ``right[e]`` is X_e, whose adjoint action on an embedded quaternion S is
    ``S e``; ``left[e]`` is _eX, acting as ``e S``.
    """

    right: dict
    left: dict

    def as_list(self) -> list:
        return [self.right[e] for e in "ijk"] + [self.left[e] for e in "ijk"]


def gamma_basis() -> GammaBasis:
    return GammaBasis(
        right={e: _pad(g) for e, g in GAMMA_RIGHT.items()},
        left={e: _pad(g) for e, g in GAMMA_LEFT.items()},
    )


def gamma_coordinates(m) -> tuple[np.ndarray, np.ndarray]:
    """Coordinates of the so(4) block of ``m`` in the gamma basis.

    Returns ``(left, right)`` 3-vectors, i.e. the ``z`` and ``w`` of the
    induced field ``z x + x w``.  The six gammas are Frobenius-orthogonal
    with squared norm 4, so projection is exact.
    """
    g = np.asarray(m, dtype=float)[1:, 1:]
    left = np.array([np.sum(g * GAMMA_LEFT[e]) / 4.0 for e in "ijk"])
    right = np.array([np.sum(g * GAMMA_RIGHT[e]) / 4.0 for e in "ijk"])
    return left, right


def standard_basis() -> list:
    """Four symmetric embeds of 1, i, j, k followed by the six gammas."""
    return [embed_symmetric(e) for e in np.eye(4)] + gamma_basis().as_list()


# --- Cartan decomposition -----------------------------------------------------

def theta(m) -> np.ndarray:
    """Cartan involution ``X -> -X^T``."""
    return -np.asarray(m, dtype=float).T


def _split(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    k = 0.5 * (m + theta(m))
    return k, m - k


@dataclass(frozen=True)
class CartanSplit:
    k_part: np.ndarray
    s_part: np.ndarray


def cartan_split(m) -> CartanSplit:
    """Project onto the +1 (so(4)) and -1 (symmetric) eigenspaces of theta."""
    m = _checked(m)
    k, s = _split(m)
    return CartanSplit(k_part=k, s_part=s)


def b_theta(a, b) -> float:
    """``B_theta(X, Y) = -<X, theta Y>`` where ``<,>`` is the trace form.

    The trace form ``tr(XY)`` is a positive multiple (1/3) of the Killing form
    of so(1,4), so positivity is unaffected; the result equals ``tr(X Y^T)``.
    """
    return -float(np.trace(np.asarray(a, dtype=float) @ theta(b)))


def gram_matrix(basis: Sequence[np.ndarray]) -> np.ndarray:
    return np.array([[b_theta(a, b) for b in basis] for a in basis])


# --- bracket closure ----------------------------------------------------------

def numerical_rank(mats: Sequence[np.ndarray], tol: float = RANK_TOL) -> int:
    """Rank of a list of matrices, column-pivoted QR on their flattenings."""
    if len(mats) == 0:
        return 0
    cols = np.stack([np.asarray(m, dtype=float).ravel() for m in mats], axis=1)
    _, r, _ = qr(cols, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    if diag.size == 0 or diag[0] == 0.0:
        return 0
    return int(np.sum(diag > tol * max(1.0, diag[0])))


def bracket_closure(generators: Sequence[np.ndarray], tol: float = RANK_TOL,
                    max_dim: int | None = None) -> list:
    """Basis of the smallest bracket-closed subspace containing ``generators``.

    Brackets of every pair of current basis elements are added whenever they
    leave the current span (residual above ``tol`` after normalization);
    iteration stops once a full pass adds nothing or ``max_dim`` is reached.
    """
    if len(generators) == 0:
        raise ConfigurationError("at least one generator is required")
    basis: list = []
    ortho: list = []

    def absorb(m: np.ndarray) -> bool:
        v = m.ravel()
        nv = np.linalg.norm(v)
        if nv <= tol:
            return False
        v = v / nv
        for e in ortho:
            v = v - (e @ v) * e
        # second Gram-Schmidt pass for stability
        for e in ortho:
            v = v - (e @ v) * e
        r = np.linalg.norm(v)
        if r <= tol:
            return False
        ortho.append(v / r)
        basis.append(m)
        return True

    for g in generators:
        absorb(np.asarray(g, dtype=float))

    grown = True
    while grown and (max_dim is None or len(basis) < max_dim):
        grown = False
        for a, b in itertools.combinations(list(basis), 2):
            if absorb(commutator(a, b)):
                grown = True
                if max_dim is not None and len(basis) >= max_dim:
                    break
    return basis


def larc_rank(generators: Sequence[np.ndarray]) -> int:
    """Dimension of Lie(generators) inside so(1,4); 10 means LARC holds."""
    if len(generators) == 0:
        raise ConfigurationError("at least one generator is required")
    gens = [_checked(g) for g in generators]
    return len(bracket_closure(gens, max_dim=DIM))


# --- restricted roots in the J_{1,4} realization ------------------------------

@dataclass(frozen=True)
class RootSpaceDecomp:
    g_plus: list
    g_minus: list
    g_zero: list

    @staticmethod
    def h(alpha: float) -> np.ndarray:
        """Element ``diag(0,0,0,alpha,-alpha)`` of the maximal abelian subspace."""
        return np.diag([0.0, 0.0, 0.0, alpha, -alpha])


def root_space_decomposition() -> RootSpaceDecomp:
    """Bases of g_lambda, g_-lambda and g_0 for H = diag(0,0,0,a,-a)."""
    e = np.eye(3)
    g_plus, g_minus, g_zero = [], [], []
    for c in e:
        x = np.zeros((5, 5))
        x[:3, 4] = c
        x[3, :3] = c
        g_plus.append(x)
    for b in e:
        x = np.zeros((5, 5))
        x[:3, 3] = b
        x[4, :3] = b
        g_minus.append(x)
    for j, k in [(0, 1), (0, 2), (1, 2)]:
        x = np.zeros((5, 5))
        x[j, k], x[k, j] = -1.0, 1.0
        g_zero.append(x)
    g_zero.append(np.diag([0.0, 0.0, 0.0, 1.0, -1.0]))
    return RootSpaceDecomp(g_plus=g_plus, g_minus=g_minus, g_zero=g_zero)


# --- serialization ------------------------------------------------------------

def to_json(m) -> list:
    return np.asarray(m, dtype=float).reshape(25).tolist()


def from_json(values) -> np.ndarray:
    a = np.asarray(values, dtype=float)
    if a.size == 4:
        return embed_symmetric(a)
    if a.size != 25:
        raise ConfigurationError(f"expected 25 matrix entries, got {a.size}")
    return a.reshape(5, 5)
