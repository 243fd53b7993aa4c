"""Linear control system ``x' = (A + sum u_i B_i) x`` on projective space.

Points of P^{n-1} are unit vectors up to sign.  The drift is
``A = v0 v0^T - Id/n`` with ``v0 = (1/sqrt(n), w)``; the controls ``B_i`` are
the elementary rotations of the last ``n - 1`` coordinates.  The candidate
invariant set is the cone ``|<v, e1>| >= 1/sqrt(n)``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.linalg import expm
from scipy.spatial import cKDTree

from .errors import ConfigurationError, DomainError
from .lie_so14 import bracket_closure
from .orbits import draw_schedules
from .system import ControlRange
from .tolerances import ALGEBRAIC_TOL, CLOUD_DELTA, INVARIANCE_TOL

log = logging.getLogger(__name__)

PROJ_STEP = 1e-2
CANON_TOL = 1e-12
B_INVARIANCE_TOL = 1e-9


def canonicalize(v) -> np.ndarray:
    """Representative(s) whose first coordinate above 1e-12 in size is positive."""
    v = np.array(v, dtype=float)
    flat = np.atleast_2d(v)
    big = np.abs(flat) > CANON_TOL
    first = np.argmax(big, axis=1)
    lead = flat[np.arange(flat.shape[0]), first]
    flat *= np.where(lead < 0, -1.0, 1.0)[:, None]
    return flat.reshape(v.shape)


def proj_distance(v, w) -> np.ndarray:
    """``min(|v - w|, |v + w|)``."""
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    return np.minimum(np.linalg.norm(v - w, axis=-1), np.linalg.norm(v + w, axis=-1))


@dataclass(frozen=True)
class ProjPoint:
    v: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float)
        if abs(np.linalg.norm(v) - 1.0) > ALGEBRAIC_TOL:
            raise DomainError("projective representative must be a unit vector")
        object.__setattr__(self, "v", canonicalize(v))

    def same(self, other: "ProjPoint", tol: float = ALGEBRAIC_TOL) -> bool:
        return bool(proj_distance(self.v, other.v) <= tol)


def induced_field(m, x) -> np.ndarray:
    """``Mx - <Mx, x> x`` for one or many unit vectors ``x``."""
    m = np.asarray(m, dtype=float)
    x = np.asarray(x, dtype=float)
    mx = np.einsum("...ij,...j->...i", m, x)
    return mx - np.sum(mx * x, axis=-1, keepdims=True) * x


def so_basis(k: int) -> list:
    """``E_ab - E_ba`` for ``a < b`` in lexicographic order, k x k."""
    out = []
    for a, b in combinations(range(k), 2):
        x = np.zeros((k, k))
        x[a, b], x[b, a] = 1.0, -1.0
        out.append(x)
    return out


@dataclass(frozen=True)
class ProjSystem:
    n: int
    A: np.ndarray
    B: tuple
    range: ControlRange
    v0: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.A, dtype=float)
        if a.shape != (self.n, self.n):
            raise ConfigurationError("A has the wrong shape")
        if np.max(np.abs(a - a.T)) > ALGEBRAIC_TOL or abs(np.trace(a)) > 1e-10:
            raise ConfigurationError("A must be symmetric and traceless")
        for b in self.B:
            b = np.asarray(b)
            if b.shape != (self.n, self.n) or np.max(np.abs(b + b.T)) > ALGEBRAIC_TOL:
                raise ConfigurationError("each B_i must be skew")
            if np.max(np.abs(b[0])) > ALGEBRAIC_TOL or np.max(np.abs(b[:, 0])) > ALGEBRAIC_TOL:
                raise ConfigurationError("each B_i must have the block form diag(0, X_i)")
        if self.range.dim != len(self.B):
            raise ConfigurationError("range dimension differs from the number of B_i")

    @property
    def m(self) -> int:
        return len(self.B)

    def matrices(self, u) -> np.ndarray:
        """``A + sum u_i B_i`` for controls of shape (..., m)."""
        u = np.asarray(u, dtype=float)
        return self.A + np.tensordot(u, np.asarray(self.B), axes=(-1, 0))

    def sample_controls(self, rng: np.random.Generator, k: int) -> np.ndarray:
        return self.range.sample(rng, k)


def build_example(n: int, w, low: float = -1.0, high: float = 1.0) -> ProjSystem:
    """The example system for ``v0 = (1/sqrt(n), w)`` with ``|w|^2 = 1 - 1/n``."""
    if n < 3:
        raise ConfigurationError("the example needs n >= 3")
    w = np.asarray(w, dtype=float).ravel()
    if w.shape != (n - 1,):
        raise ConfigurationError(f"w must have {n - 1} entries")
    if abs(1.0 / n + w @ w - 1.0) > ALGEBRAIC_TOL:
        raise ConfigurationError("w must satisfy 1/n + |w|^2 = 1")
    v0 = np.r_[1.0 / np.sqrt(n), w]
    a = np.outer(v0, v0) - np.eye(n) / n
    bs = []
    for x in so_basis(n - 1):
        b = np.zeros((n, n))
        b[1:, 1:] = x
        bs.append(b)
    return ProjSystem(n, a, tuple(bs), ControlRange.box(len(bs), low, high), v0)


def default_w(n: int) -> np.ndarray:
    """``w`` along ``(1, ..., 1)``, scaled to the norm condition."""
    w = np.ones(n - 1)
    return w * np.sqrt(1.0 - 1.0 / n) / np.linalg.norm(w)


def sym_embed(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if abs(np.linalg.norm(v) - 1.0) > ALGEBRAIC_TOL:
        raise DomainError("sym_embed needs a unit vector")
    return np.outer(v, v) - np.eye(v.shape[0]) / v.shape[0]


def sym_inner(a, b) -> float:
    """Trace form ``tr(AB)``."""
    return float(np.trace(np.asarray(a, dtype=float) @ np.asarray(b, dtype=float)))


@dataclass(frozen=True)
class ProjDome:
    """``{[v] : |<v, e1>| >= 1/sqrt(n)}``."""

    n: int

    @property
    def level(self) -> float:
        return 1.0 / np.sqrt(self.n)

    def deficit(self, v) -> np.ndarray:
        """``1/sqrt(n) - |<v, e1>|``; positive outside."""
        return self.level - np.abs(np.asarray(v, dtype=float)[..., 0])

    def contains(self, v, tol: float = 1e-9):
        return self.deficit(v) <= tol

    def sample(self, rng: np.random.Generator, k: int, boundary_fraction: float = 0.0) -> np.ndarray:
        """Representatives with uniform angle to e1 up to the boundary."""
        phi_max = np.arccos(self.level)
        phi = rng.uniform(0.0, phi_max, size=k)
        phi[: int(round(boundary_fraction * k))] = phi_max
        d = rng.standard_normal((k, self.n - 1))
        d /= np.linalg.norm(d, axis=1, keepdims=True)
        return np.column_stack([np.cos(phi), np.sin(phi)[:, None] * d])


def dome_C(n: int) -> ProjDome:
    if n < 2:
        raise ConfigurationError("dome_C needs n >= 2")
    return ProjDome(n)


def larc_check_example(system: ProjSystem) -> int:
    """Dimension of the Lie algebra generated by ``A, B_1, ..., B_m``."""
    if np.linalg.norm(system.v0[1:]) == 0.0:
        log.warning("w = 0: the irreducibility argument does not apply")
    return len(bracket_closure([system.A, *system.B]))


# --- flows -------------------------------------------------------------------------

def proj_flow(system: ProjSystem, x0, schedules, h: float = PROJ_STEP, record_every: int = 5):
    """RK4 + normalization for many schedules at once.

    Every piece is split into ``ceil(d/h)`` equal steps; samples advance in
    lockstep with their own step sizes.  Returns ``(points, sample_index)``
    with canonicalized representatives (x0 and every ``record_every``-th
    step and the end of each schedule).
    """
    n_s = len(schedules)
    x = np.array(np.broadcast_to(np.asarray(x0, dtype=float), (n_s, system.n)))
    seg_ids, steps = [], []
    for s in schedules:
        counts = np.maximum(1, np.ceil(s.durations / h - 1e-9).astype(int))
        seg_ids.append(np.repeat(np.arange(len(counts)), counts))
        steps.append(np.repeat(s.durations / counts, counts))
    length = max(len(x) for x in steps)
    seg = np.zeros((n_s, length), dtype=int)
    hs = np.zeros((n_s, length))
    for i in range(n_s):
        seg[i, : len(seg_ids[i])] = seg_ids[i]
        hs[i, : len(steps[i])] = steps[i]
    mats = [system.matrices(s.controls) for s in schedules]
    k_max = max(len(m) for m in mats)
    stack = np.zeros((n_s, k_max, system.n, system.n))
    for i, m in enumerate(mats):
        stack[i, : len(m)] = m

    rows = np.arange(n_s)
    out, idx = [x.copy()], [rows]
    for k in range(length):
        m = stack[rows, seg[:, k]]

        def f(y):
            return induced_field(m, y)
        h_k = hs[:, k][:, None]
        k1 = f(x)
        k2 = f(x + 0.5 * h_k * k1)
        k3 = f(x + 0.5 * h_k * k2)
        k4 = f(x + h_k * k3)
        x = x + (h_k / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        x /= np.linalg.norm(x, axis=1, keepdims=True)
        if (k + 1) % record_every == 0 or k + 1 == length:
            out.append(x.copy())
            idx.append(rows)
    return canonicalize(np.concatenate(out)), np.concatenate(idx)


def proj_cloud(system: ProjSystem, x0, horizon: float, samples: int, seed: int,
               h: float = PROJ_STEP) -> np.ndarray:
    schedules = draw_schedules(system, horizon, samples, seed)
    pts, _ = proj_flow(system, x0, schedules, h)
    return pts


def b_invariance_residual(system: ProjSystem, seed: int = 0, trials: int = 200,
                          horizon: float = 5.0) -> float:
    """Largest change of ``<v, e1>`` under flows of the B_i alone.

    Uses both ``expm(t B) v`` and the RK4 projective flow of ``sum u_i B_i``.
    """
    rng = np.random.default_rng([int(seed), 0xB])
    v = rng.standard_normal((trials, system.n))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    worst = 0.0
    for i in range(trials):
        u = rng.uniform(-1.0, 1.0, size=system.m)
        b = np.tensordot(u, np.asarray(system.B), axes=(0, 0))
        y = expm(rng.uniform(0.0, horizon) * b) @ v[i]
        worst = max(worst, abs(y[0] - v[i, 0]))
    b_only = ProjSystem(system.n, np.zeros((system.n, system.n)), system.B, system.range, system.v0)
    schedules = draw_schedules(b_only, horizon, trials, seed)
    pts, idx = proj_flow(b_only, v, schedules)
    # canonicalization may flip signs; compare absolute first coordinates
    worst = max(worst, float(np.max(np.abs(np.abs(pts[:, 0]) - np.abs(v[idx, 0])))))
    return worst


def example_attractor(system: ProjSystem, u) -> np.ndarray:
    """Attracting fixed point of ``A + sum u_i B_i``: the eigenvector of the
    eigenvalue with the largest real part."""
    vals, vecs = np.linalg.eig(system.matrices(u))
    top = int(np.argmax(vals.real))
    if abs(vals[top].imag) > 1e-12:
        raise DomainError("dominant eigenvalue is not real; no attracting fixed point")
    v = vecs[:, top].real
    return canonicalize(v / np.linalg.norm(v))


def example_attractor_sweep(system: ProjSystem, controls) -> np.ndarray:
    return np.array([example_attractor(system, u) for u in np.atleast_2d(controls)])


def rotated_boundary(system: ProjSystem, k: int, seed: int = 0) -> np.ndarray:
    """``expm(sum s_i B_i) v0``: attractors of the conjugated drifts, all on
    ``<v, e1> = 1/sqrt(n)``."""
    if system.m == 1:
        s = np.linspace(0.0, 2.0 * np.pi, k, endpoint=False)[:, None]
    else:
        s = np.random.default_rng([int(seed), 0xE]).uniform(-np.pi, np.pi, size=(k, system.m))
    b = np.asarray(system.B)
    return np.array([expm(np.tensordot(si, b, axes=(0, 0))) @ system.v0 for si in s])


def verify_example_ics(system: ProjSystem, horizon: float = 20.0, samples: int = 500,
                       seed: int = 0, grid: int = 10, delta: float = CLOUD_DELTA,
                       invariance_trials: int = 500, attraction_grid: int = 30,
                       attraction_samples: int = 32) -> dict:
    """Invariance, reachability and attraction checks for ``dome_C(n)``,
    plus the B-only invariance of ``<v, e1>``."""
    dome = dome_C(system.n)
    rng = np.random.default_rng([int(seed), 0x9E])

    starts = dome.sample(rng, invariance_trials, boundary_fraction=0.5)
    scheds = draw_schedules(system, min(horizon, 10.0), invariance_trials, seed)
    pts, idx = proj_flow(system, starts, scheds)
    deficit = dome.deficit(pts)
    worst = float(np.max(deficit))
    exit_start = starts[idx[int(np.argmax(deficit))]].tolist()
    invariance = {"pass": bool(worst <= INVARIANCE_TOL), "worst_violation": worst,
                  "tol": INVARIANCE_TOL, "trials": invariance_trials, "worst_start": exit_start}

    gpts = canonicalize(np.concatenate([[np.eye(system.n)[0], system.v0],
                                        dome.sample(rng, grid - 2, 0.4)]))
    failures, worst_gap = [], 0.0
    for i, x in enumerate(gpts):
        cloud = proj_cloud(system, x, horizon, samples, int(seed) + 7919 * (i + 1))
        tree = cKDTree(np.concatenate([cloud, -cloud]))
        gaps, _ = tree.query(gpts)
        worst_gap = max(worst_gap, float(gaps.max()))
        for j in np.flatnonzero(gaps > delta):
            failures.append({"from": x.tolist(), "to": gpts[j].tolist(), "gap": float(gaps[j])})
    reach = {"pass": not failures, "pairs": int(len(gpts) ** 2), "worst_gap": worst_gap,
             "delta": delta, "failures": failures}

    grng = np.random.default_rng([int(seed), 0x53])
    g = grng.standard_normal((attraction_grid, system.n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    missed = []
    for i, x in enumerate(g):
        cloud = proj_cloud(system, x, horizon, attraction_samples, int(seed) + 104729 * (i + 1))
        if not np.any(dome.deficit(cloud) <= delta):
            missed.append(x.tolist())
    attraction = {"pass": not missed, "starts": attraction_grid, "delta": delta,
                  "failures": missed}

    b_res = b_invariance_residual(system, seed)
    b_check = {"pass": bool(b_res <= B_INVARIANCE_TOL), "residual": b_res, "tol": B_INVARIANCE_TOL}

    sweep = example_attractor_sweep(system, system.range.extreme_points())
    heights = np.abs(sweep[:, 0])
    conditions = {"invariance": invariance, "reachability": reach, "attraction": attraction,
                  "b_invariance": b_check}
    return {"n": system.n, "v0": system.v0.tolist(), "level": dome.level,
            "horizon": horizon, "samples": samples, "seed": int(seed),
            "extreme_attractor_heights": heights.tolist(),
            "conditions": conditions, "pass": all(c["pass"] for c in conditions.values())}
