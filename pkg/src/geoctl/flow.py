"""Integration of induced fields on S^3.

``integrate`` is classical RK4 in R^4 followed by renormalization after every
step.  Symmetric fields ``X_(q,0,0)`` also have a closed-form flow along the
great circle through the start point and ``q/|q|``: the angle ``a`` to the
attractor obeys ``tan(a(t)/2) = tan(a(0)/2) exp(-|q| t)``.  The samplers in
:mod:`geoctl.orbits` use that form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigurationError, DomainError
from .fields import FieldSpec
from .quaternion import QuaternionLike, as_unit_array, left_matrix, right_matrix
from .tolerances import NORM_TOL

DEFAULT_STEP = 1e-3
DEFAULT_HORIZON = 20.0

_LEFT = np.array([left_matrix(e) for e in np.eye(4)[1:]])    # (3, 4, 4)
_RIGHT = np.array([right_matrix(e) for e in np.eye(4)[1:]])


def compile_fields(vecs) -> Callable[[np.ndarray], np.ndarray]:
    """Fast evaluator for fields with coordinates ``vecs`` (shape (10,) or (N, 10)).

    Uses ``1/2 (q - x conj(q) x) = 1/2 (1 + |x|^2) q - <q, x> x``, valid on
    all of R^4, and writes ``z x + x w`` as one 4x4 matrix.
    """
    vecs = np.asarray(vecs, dtype=float)
    q = vecs[..., :4]
    gen = (np.einsum("...a,aij->...ij", vecs[..., 4:7], _LEFT)
           + np.einsum("...a,aij->...ij", vecs[..., 7:10], _RIGHT))

    rotation = bool(np.any(vecs[..., 4:]))

    def f(x: np.ndarray) -> np.ndarray:
        sq = np.sum(x * x, axis=-1, keepdims=True)
        qx = np.sum(q * x, axis=-1, keepdims=True)
        out = 0.5 * (1.0 + sq) * q - qx * x
        if rotation:
            out = out + np.einsum("...ij,...j->...i", gen, x)
        return out

    return f


def rk4_step(f: Callable, x: np.ndarray, h) -> np.ndarray:
    """One RK4 step followed by projection back to the sphere."""
    h = np.asarray(h, dtype=float)
    if h.ndim:
        h = h[..., None]
    k1 = f(x)
    k2 = f(x + 0.5 * h * k1)
    k3 = f(x + 0.5 * h * k2)
    k4 = f(x + h * k3)
    y = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return y / np.linalg.norm(y, axis=-1, keepdims=True)


@dataclass
class Trajectory:
    times: np.ndarray
    points: np.ndarray
    control_log: list = field(default_factory=list)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        if self.times.shape[0] != self.points.shape[0]:
            raise ConfigurationError("times and points differ in length")

    def __len__(self):
        return self.times.shape[0]

    @property
    def end(self) -> np.ndarray:
        return self.points[-1]

    def norm_error(self) -> float:
        return float(np.max(np.abs(np.linalg.norm(self.points, axis=1) - 1.0)))

    def to_rows(self) -> np.ndarray:
        """(N, 5) array with columns t, w, x, y, z."""
        return np.column_stack([self.times, self.points])


def _time_grid(t_final: float, h: float) -> np.ndarray:
    if not h > 0:
        raise ConfigurationError("step h must be positive")
    if t_final < 0:
        raise ConfigurationError("t_final must be nonnegative")
    n = int(math.ceil(t_final / h - 1e-9))
    grid = np.arange(n + 1, dtype=float) * h
    if n:
        grid[-1] = t_final
    return grid


def integrate(spec: FieldSpec, x0: QuaternionLike, t_final: float = DEFAULT_HORIZON,
              h: float = DEFAULT_STEP) -> Trajectory:
    """RK4 + projection from ``x0``; the last step is shortened to end at ``t_final``.

    A start exactly at a singular point (the repeller included) stays put.
    """
    x = as_unit_array(x0).copy()
    times = _time_grid(t_final, h)
    f = compile_fields(spec.vector)
    pts = np.empty((times.shape[0], 4))
    pts[0] = x
    for k in range(1, times.shape[0]):
        x = rk4_step(f, x, times[k] - times[k - 1])
        pts[k] = x
    return Trajectory(times, pts, [((0.0, float(t_final)), ())])


def integrate_batch(vecs, x0, t_final: float = DEFAULT_HORIZON,
                    h: float = DEFAULT_STEP) -> np.ndarray:
    """Endpoints of many flows at once; ``vecs`` (10,) or (N, 10), ``x0`` (N, 4)."""
    x = np.array(x0, dtype=float)
    as_unit_array(x, tol=NORM_TOL)
    f = compile_fields(vecs)
    times = _time_grid(t_final, h)
    for dt in np.diff(times):
        x = rk4_step(f, x, dt)
    return x


def symmetric_flow(q, p, t) -> np.ndarray:
    """Closed-form flow of ``X_(q,0,0)`` from ``p`` for time ``t`` (broadcasting).

    Points at the attractor or repeller (or fields with q = 0) do not move.
    """
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    t = np.asarray(t, dtype=float)
    qn = np.linalg.norm(q, axis=-1)
    a = q / np.where(qn > 0, qn, 1.0)[..., None]
    c = np.sum(p * a, axis=-1)
    perp = p - c[..., None] * a
    s = np.linalg.norm(perp, axis=-1)
    moving = (s > 1e-15) & (qn > 0)
    n = perp / np.where(moving, s, 1.0)[..., None]
    # tan(angle/2) computed without cancellation on either hemisphere
    half = np.where(c >= 0, s / np.maximum(1.0 + c, 1e-300), (1.0 - c) / np.where(moving, s, 1.0))
    angle = 2.0 * np.arctan(half * np.exp(-qn * t))
    out = np.cos(angle)[..., None] * a + np.sin(angle)[..., None] * n
    out = out / np.linalg.norm(out, axis=-1, keepdims=True)
    return np.where(moving[..., None], out, p)


def angle_to(a, p) -> np.ndarray:
    """Angle between unit vectors, accurate near 0 and pi."""
    a = np.asarray(a, dtype=float)
    p = np.asarray(p, dtype=float)
    c = np.sum(a * p, axis=-1)
    s = np.linalg.norm(p - c[..., None] * a, axis=-1)
    return np.arctan2(s, c)


def great_circle_test(traj: Trajectory) -> float:
    """Max distance of trajectory points from the best-fit 2-plane through 0."""
    pts = traj.points
    if pts.shape[0] < 3:
        raise DomainError("great_circle_test needs at least 3 points")
    if np.max(np.abs(pts - pts[0])) == 0.0:
        return 0.0
    _, _, vt = np.linalg.svd(pts, full_matrices=True)
    resid = pts @ vt[2:].T
    return float(np.max(np.linalg.norm(resid, axis=1)))


def integrate_switched(system, x0: QuaternionLike, schedule: Sequence,
                       h: float = DEFAULT_STEP) -> Trajectory:
    """Concatenate RK4 flows of the frozen fields along ``[(duration, u), ...]``.

    Controls switch closed-on-the-left: the sample at a switch time belongs to
    both pieces and the new control applies from it onward.
    """
    x = as_unit_array(x0).copy()
    for duration, u in schedule:
        if not duration > 0:
            raise ConfigurationError("schedule durations must be positive")
        system.check_control(u)
    times = [np.zeros(1)]
    pts = [x[None, :]]
    log = []
    t0 = 0.0
    for duration, u in schedule:
        u = np.atleast_1d(np.asarray(u, dtype=float))
        f = compile_fields(system.frozen_vectors(u))
        grid = _time_grid(float(duration), h)
        seg = np.empty((grid.shape[0] - 1, 4))
        for k, dt in enumerate(np.diff(grid)):
            x = rk4_step(f, x, dt)
            seg[k] = x
        times.append(t0 + grid[1:])
        pts.append(seg)
        log.append(((t0, t0 + float(duration)), tuple(u.tolist())))
        t0 += float(duration)
    return Trajectory(np.concatenate(times), np.concatenate(pts), log)
