"""Sampled positive orbits and numerical checks of invariant control sets.

A positive orbit is approximated by a cloud: the points visited by random
piecewise-constant schedules.  Every schedule has its own generator seeded by
``(seed, index)``, so clouds do not depend on how the work is distributed.

Symmetric systems are flowed in closed form.  Each constant piece is recorded
where the angle to its attractor crosses a multiple of ``min_arc``, at the
times ``k * record_dt`` of a global lattice, and at its end.  Both grids are
global, so a truncated schedule revisits the points of the full run.
"""
from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .convex import SphericalRegion
from .errors import ConfigurationError
from .fields import Singularity, SingularityKind
from .flow import DEFAULT_STEP, compile_fields, integrate_switched, rk4_step, symmetric_flow
from .quaternion import QuaternionLike, UnitQuaternion, as_unit_array, random_unit
from .system import ControlSystem
from .tolerances import CLOUD_DELTA, INVARIANCE_TOL, NORM_TOL

log = logging.getLogger(__name__)

RECORD_DT = 1.0
MIN_ARC = 0.02
CHUNK = 256
MEAN_SWITCHES = 5.0
REPELLER_EPS = 0.1


def worker_count() -> int:
    """Worker threads, capped by the GEOCTL_THREADS environment variable."""
    n = os.cpu_count() or 1
    cap = os.environ.get("GEOCTL_THREADS")
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise ConfigurationError(f"GEOCTL_THREADS={cap!r} is not an integer") from None
    return n


def _map(fn: Callable, items: Sequence) -> list:
    workers = worker_count()
    if workers <= 1 or len(items) < 64:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def schedule_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, int(index)])


# --- schedules -----------------------------------------------------------------

@dataclass(frozen=True)
class Schedule:
    """Piecewise-constant control: ``controls[i]`` held for ``durations[i]``."""

    durations: np.ndarray
    controls: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.durations, dtype=float)
        c = np.asarray(self.controls, dtype=float)
        if c.ndim == 1:
            c = c[:, None]
        if d.ndim != 1 or d.shape[0] != c.shape[0]:
            raise ConfigurationError("durations and controls differ in length")
        if np.any(d <= 0):
            raise ConfigurationError("schedule durations must be positive")
        object.__setattr__(self, "durations", d)
        object.__setattr__(self, "controls", c)

    @property
    def total(self) -> float:
        return float(np.sum(self.durations))

    def truncated(self, t: float) -> "Schedule":
        """The prefix of this schedule on ``[0, t]``."""
        if t <= 0:
            raise ConfigurationError("truncation time must be positive")
        ends = np.cumsum(self.durations)
        k = int(np.searchsorted(ends, t, side="left"))
        if k >= len(ends):
            return self
        start = ends[k - 1] if k else 0.0
        d = list(self.durations[:k])
        if t - start > 0:
            d.append(t - start)
        return Schedule(np.asarray(d), self.controls[: len(d)])

    def as_pairs(self) -> list:
        return [(float(d), tuple(u.tolist())) for d, u in zip(self.durations, self.controls)]

    def to_json(self) -> dict:
        return {"durations": self.durations.tolist(), "controls": self.controls.tolist()}


def draw_schedule(system: ControlSystem, rng: np.random.Generator, horizon: float) -> Schedule:
    """Poisson(5)+1 pieces, uniform partition of a uniform total in (0, horizon]."""
    k = int(rng.poisson(MEAN_SWITCHES)) + 1
    total = horizon * (1.0 - rng.random())
    cuts = np.sort(rng.uniform(0.0, total, size=k - 1))
    durations = np.diff(np.concatenate([[0.0], cuts, [total]]))
    controls = system.sample_controls(rng, k)
    keep = durations > 0
    if not np.all(keep):
        durations, controls = durations[keep], controls[keep]
    return Schedule(durations, controls)


def draw_schedules(system: ControlSystem, horizon: float, samples: int, seed: int) -> list:
    return [draw_schedule(system, schedule_rng(seed, i), horizon) for i in range(samples)]


# --- simulation ----------------------------------------------------------------

def _expand(lo: np.ndarray, hi: np.ndarray):
    """Segment ids and integers ``lo[i] .. hi[i]`` (inclusive), flattened."""
    n = np.maximum(hi - lo + 1, 0)
    seg = np.repeat(np.arange(lo.shape[0]), n)
    offs = np.arange(n.sum()) - np.repeat(np.cumsum(n) - n, n)
    return seg, lo[seg] + offs


def _lattice(t0: float, d: float, dt: float) -> np.ndarray:
    """Local times ``k dt - t0`` strictly inside ``(0, d)``, then ``d``."""
    k0 = int(np.floor(t0 / dt)) + 1
    k1 = int(np.ceil((t0 + d) / dt))
    local = np.arange(k0, k1 + 1) * dt - t0
    local = local[(local > 0) & (local < d)]
    return np.concatenate([local, [d]])


def _rk4_to(f, p: np.ndarray, targets: np.ndarray, h: float) -> np.ndarray:
    out = np.empty((targets.shape[0], 4))
    t = 0.0
    for i, target in enumerate(targets):
        n = max(1, int(np.ceil((target - t) / h - 1e-9)))
        dt = (target - t) / n
        for _ in range(n):
            p = rk4_step(f, p, dt)
        out[i] = p
        t = target
    return out


def _simulate_general(system, x0, schedule, record_dt, h):
    vecs = system.frozen_vectors(schedule.controls)
    p = np.asarray(x0, dtype=float)
    t0 = 0.0
    times, pts = [], []
    for vec, d in zip(vecs, schedule.durations):
        local = _lattice(t0, float(d), record_dt)
        seg = _rk4_to(compile_fields(vec), p, local, h)
        times.append(t0 + local)
        pts.append(seg)
        p = seg[-1]
        t0 += float(d)
    return np.concatenate(times), np.concatenate(pts)


def _simulate_symmetric(system, x0, schedules, record_dt, min_arc):
    """Closed-form flows of many schedules at once.

    Each piece is recorded where the angle to its attractor crosses a
    multiple of ``min_arc``, on the global time lattice, and at its end.
    """
    n_s = len(schedules)
    k_max = max(len(s.durations) for s in schedules)
    dur = np.zeros((n_s, k_max))
    ctl = np.zeros((n_s, k_max, system.m))
    for i, s in enumerate(schedules):
        dur[i, : len(s.durations)] = s.durations
        ctl[i, : len(s.durations)] = s.controls
    valid = dur > 0
    q = system.frozen_vectors(ctl)[..., :4]
    x0 = np.broadcast_to(np.asarray(x0, dtype=float), (n_s, 4))
    starts = np.empty((n_s, k_max + 1, 4))
    starts[:, 0] = x0
    t_start = np.zeros((n_s, k_max + 1))
    for j in range(k_max):
        nxt = symmetric_flow(q[:, j], starts[:, j], dur[:, j])
        starts[:, j + 1] = np.where(valid[:, j, None], nxt, starts[:, j])
        t_start[:, j + 1] = t_start[:, j] + dur[:, j]

    sid, jid = np.nonzero(valid)
    qs, ps, t0, d = q[sid, jid], starts[sid, jid], t_start[sid, jid], dur[sid, jid]
    ends, t_end = starts[sid, jid + 1], t0 + d

    # angle-grid crossings
    qn = np.linalg.norm(qs, axis=1)
    a = qs / np.where(qn > 0, qn, 1.0)[:, None]
    c = np.sum(ps * a, axis=1)
    perp = ps - c[:, None] * a
    s = np.linalg.norm(perp, axis=1)
    moving = (s > 1e-15) & (qn > 0)
    nvec = perp / np.where(moving, s, 1.0)[:, None]
    th0 = np.arctan2(s, c)
    th1 = np.where(moving, 2.0 * np.arctan(np.tan(th0 / 2.0) * np.exp(-qn * d)), th0)
    out_t, out_p, out_i = [t_end], [ends], [sid]
    if min_arc > 0:
        lo = np.floor(th1 / min_arc).astype(int) + 1
        hi = np.ceil(th0 / min_arc).astype(int) - 1
        hi = np.where(moving, hi, lo - 1)
        seg, k = _expand(lo, hi)
        th = k * min_arc
        keep = (th > th1[seg]) & (th < th0[seg])
        seg, th = seg[keep], th[keep]
        pts = np.cos(th)[:, None] * a[seg] + np.sin(th)[:, None] * nvec[seg]
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        tt = t0[seg] + np.log(np.tan(th0[seg] / 2.0) / np.tan(th / 2.0)) / qn[seg]
        out_t.append(tt)
        out_p.append(pts)
        out_i.append(sid[seg])

    # global time lattice
    lo = np.floor(t0 / record_dt).astype(int) + 1
    hi = np.ceil(t_end / record_dt).astype(int)
    seg, k = _expand(lo, hi)
    local = k * record_dt - t0[seg]
    keep = (local > 0) & (local < d[seg])
    seg, local = seg[keep], local[keep]
    out_t.append(t0[seg] + local)
    out_p.append(symmetric_flow(qs[seg], ps[seg], local))
    out_i.append(sid[seg])

    times = np.concatenate(out_t)
    index = np.concatenate(out_i)
    order = np.lexsort((times, index))
    return times[order], np.concatenate(out_p)[order], index[order]


def simulate_schedule(system: ControlSystem, x0, schedule: Schedule,
                      record_dt: float = RECORD_DT, h: float = DEFAULT_STEP,
                      min_arc: float = MIN_ARC):
    """Recorded ``(times, points)`` of one schedule, x0 excluded.

    Symmetric systems use the closed-form flow; others RK4 with step ``h``
    recorded on the time lattice only.
    """
    if system.is_symmetric:
        t, p, _ = _simulate_symmetric(system, x0, [schedule], record_dt, min_arc)
        return t, p
    return _simulate_general(system, x0, schedule, record_dt, h)


def simulate_schedules(system: ControlSystem, x0, schedules: Sequence[Schedule],
                       record_dt: float = RECORD_DT, h: float = DEFAULT_STEP,
                       min_arc: float = MIN_ARC):
    """``(times, points, schedule_index)`` for many schedules.

    ``x0`` is one start or one start per schedule.  Work is split into
    fixed chunks, so the result does not depend on the worker count.
    """
    x0 = np.asarray(x0, dtype=float)
    per_start = x0.ndim == 2
    if system.is_symmetric:
        chunks = [range(i, min(i + CHUNK, len(schedules))) for i in range(0, len(schedules), CHUNK)]

        def run(r):
            t, p, idx = _simulate_symmetric(system, x0[r.start:r.stop] if per_start else x0,
                                            [schedules[i] for i in r], record_dt, min_arc)
            return t, p, idx + r.start
        parts = _map(run, chunks)
    else:
        def run(i):
            t, p = _simulate_general(system, x0[i] if per_start else x0, schedules[i], record_dt, h)
            return t, p, np.full(t.shape[0], i)
        parts = _map(run, list(range(len(schedules))))
    return (np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts]),
            np.concatenate([p[2] for p in parts]))


@dataclass
class ReachCloud:
    """Sampled approximation of the positive orbit of ``source``."""

    source: np.ndarray
    points: np.ndarray
    horizon: float
    samples: int
    seed: int
    times: np.ndarray = field(repr=False, default=None)
    schedule_index: np.ndarray = field(repr=False, default=None)
    schedules: list = field(repr=False, default_factory=list)

    @property
    def source_quaternion(self) -> UnitQuaternion:
        return UnitQuaternion.from_array(self.source)

    def endpoints(self) -> np.ndarray:
        last = np.r_[self.schedule_index[1:] != self.schedule_index[:-1], True]
        mask = last & (self.schedule_index >= 0)
        return self.points[mask]

    def distance_to(self, y) -> np.ndarray:
        """Chordal distance from each ``y`` to the nearest cloud point."""
        d, _ = cKDTree(self.points).query(np.atleast_2d(y))
        return d

    def spot_check(self, system: ControlSystem, n_points: int | None = None,
                   seed: int = 0, h: float = DEFAULT_STEP) -> float:
        """Re-integrate random recorded points with RK4; largest deviation.

        ``n_points`` defaults to 1% of the cloud.
        """
        idx = np.flatnonzero(self.schedule_index >= 0)
        if n_points is None:
            n_points = max(1, len(self.points) // 100)
        rng = np.random.default_rng(seed)
        pick = rng.choice(idx, size=min(n_points, idx.size), replace=False)
        worst = 0.0
        for i in pick:
            sched = self.schedules[self.schedule_index[i]].truncated(self.times[i])
            traj = integrate_switched(system, self.source, sched.as_pairs(), h)
            worst = max(worst, float(np.linalg.norm(traj.end - self.points[i])))
        return worst


def sample_positive_orbit(system: ControlSystem, x0: QuaternionLike, horizon: float,
                          samples: int, seed: int = 0, record_dt: float = RECORD_DT,
                          min_arc: float = MIN_ARC, schedules: Sequence[Schedule] | None = None) -> ReachCloud:
    """Cloud of points reached from ``x0`` by ``samples`` random schedules.

    Explicit ``schedules`` (e.g. truncations) replace the random draw.
    """
    if not horizon > 0:
        raise ConfigurationError("horizon must be positive")
    if samples < 1:
        raise ConfigurationError("samples must be at least 1")
    if system.m and system.range is None:
        raise ConfigurationError("system without control range")
    x = as_unit_array(x0, tol=NORM_TOL)
    if schedules is None:
        schedules = draw_schedules(system, horizon, samples, seed)
    schedules = list(schedules)
    times, pts, index = simulate_schedules(system, x, schedules, record_dt, min_arc=min_arc)
    return ReachCloud(source=x, points=np.concatenate([x[None, :], pts]), horizon=float(horizon),
                      samples=len(schedules), seed=int(seed), times=np.r_[0.0, times],
                      schedule_index=np.r_[-1, index], schedules=schedules)


# --- invariant control sets --------------------------------------------------------

@dataclass(frozen=True)
class ICSCandidate:
    region: SphericalRegion
    attractor_set: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "attractor_set", tuple(self.attractor_set))
        if self.attractor_set:
            pts = np.array([s.point.array for s in self.attractor_set])
            if not np.all(self.region.contains(pts, 1e-9)):
                raise ConfigurationError("an attractor of the candidate lies outside its region")

    def to_json(self) -> dict:
        return {"region": self.region.to_json(),
                "attractors": [s.point.array.tolist() for s in self.attractor_set]}


def verify_invariance(system: ControlSystem, region: SphericalRegion, trials: int = 1000,
                      seed: int = 0, horizon: float = 10.0, record_dt: float = RECORD_DT,
                      boundary_fraction: float = 0.5) -> float:
    """Largest exit depth over random starts in ``region`` and random schedules.

    Domes report the signed depth ``level - <p, axis>`` (negative: never left);
    segments and hulls report distance, so 0 means no exit.
    """
    rng = np.random.default_rng([int(seed), 0xD0E])
    starts = region.sample(rng, trials, boundary_fraction)

    schedules = draw_schedules(system, horizon, trials, seed)
    _, pts, _ = simulate_schedules(system, starts, schedules, record_dt)
    pts = np.concatenate([starts, pts])
    if region.kind == "hull":
        # distances via NNLS; the dense part of each path is redundant
        pts = pts[:: max(1, len(pts) // 20000)]
    return float(np.max(region.distance(pts)))


def repellers(system: ControlSystem) -> np.ndarray:
    """Repellers ``-q(u)/|q(u)|`` of the frozen fields at the extreme controls."""
    if system.m == 0:
        us = np.zeros((1, 0))
    else:
        us = system.range.extreme_points()
    q = system.frozen_vectors(us)[..., :4]
    n = np.linalg.norm(q, axis=-1)
    return -(q[n > 0] / n[n > 0, None])


def sphere_grid(n: int, seed: int, exclude: np.ndarray | None = None,
                eps: float = REPELLER_EPS) -> np.ndarray:
    """``n`` seeded random points of S^3, none within ``eps`` of ``exclude``."""
    rng = np.random.default_rng([int(seed), 0x53])
    out = []
    while len(out) < n:
        p = random_unit(rng, size=n)
        if exclude is not None and len(exclude):
            d = np.min(np.linalg.norm(p[:, None, :] - exclude[None, :, :], axis=-1), axis=1)
            p = p[d > eps]
        out.extend(p)
    return np.asarray(out[:n])


def verify_ics(system: ControlSystem, candidate: ICSCandidate | SphericalRegion, grid: int = 12,
               horizon: float = 30.0, samples: int = 2000, seed: int = 0,
               delta: float = CLOUD_DELTA, invariance_trials: int = 500,
               attraction_grid: int = 40, attraction_samples: int = 64) -> dict:
    """Numerical check of the three defining conditions for ``candidate``.

    (a) invariance: ``verify_invariance <= 1e-3``;
    (b) reachability: each pair ``(x, y)`` of a region grid has a cloud point
        from ``x`` within ``delta`` of ``y``;
    (c) attraction: from seeded points of S^3 (away from the repellers) some
        sampled orbit comes within ``delta`` of the region.
    """
    region = candidate.region if isinstance(candidate, ICSCandidate) else candidate
    rng = np.random.default_rng([int(seed), 0x1C5])

    worst = verify_invariance(system, region, invariance_trials, seed, horizon=min(horizon, 10.0))
    invariance = {"pass": bool(worst <= INVARIANCE_TOL), "worst_violation": worst,
                  "tol": INVARIANCE_TOL, "trials": invariance_trials}

    pts = region.grid(grid, rng)
    failures = []
    worst_gap = 0.0
    for i, x in enumerate(pts):
        cloud = sample_positive_orbit(system, x, horizon, samples, seed=int(seed) + 7919 * (i + 1))
        gaps = cloud.distance_to(pts)
        worst_gap = max(worst_gap, float(gaps.max()))
        for j in np.flatnonzero(gaps > delta):
            failures.append({"from": x.tolist(), "to": pts[j].tolist(), "gap": float(gaps[j])})
    reach = {"pass": not failures, "pairs": int(len(pts) ** 2), "worst_gap": worst_gap,
             "delta": delta, "failures": failures}

    starts = sphere_grid(attraction_grid, seed, exclude=repellers(system))
    missed = []
    for i, x in enumerate(starts):
        cloud = sample_positive_orbit(system, x, horizon, attraction_samples,
                                      seed=int(seed) + 104729 * (i + 1))
        if not region.any_within(cloud.points, delta):
            missed.append(x.tolist())
    attraction = {"pass": not missed, "starts": int(len(starts)), "delta": delta,
                  "excluded_radius": REPELLER_EPS, "failures": missed}

    conditions = {"invariance": invariance, "reachability": reach, "attraction": attraction}
    return {"region": region.to_json(), "horizon": horizon, "samples": samples, "seed": int(seed),
            "conditions": conditions, "pass": all(c["pass"] for c in conditions.values())}


# --- attractor set E -----------------------------------------------------------------

def attractor_sweep(system: ControlSystem, control_grid) -> list:
    """Attractors ``q(u)/|q(u)|`` of the frozen symmetric fields over ``control_grid``.

    Controls with ``q(u) = 0`` are logged and skipped.
    """
    if not system.is_symmetric:
        raise ConfigurationError("attractor_sweep needs symmetric drift and control fields")
    us = np.asarray(control_grid, dtype=float)
    if us.ndim == 1:
        us = us[:, None] if system.m == 1 else us[None, :]
    out = []
    for u in us:
        system.check_control(u)
        q = system.frozen_vectors(u)[:4]
        n = float(np.linalg.norm(q))
        if n == 0.0:
            log.warning("control %s gives the zero field; skipped", u.tolist())
            continue
        a = q / n
        a = a / np.linalg.norm(a)
        out.append(Singularity(UnitQuaternion.from_array(a), SingularityKind.ATTRACTOR, (-n,) * 3))
    return out


def sphere_controls(n: int, radius: float = 1.0) -> np.ndarray:
    """``n`` Fibonacci-lattice controls on the sphere of ``radius`` in R^3."""
    k = np.arange(n) + 0.5
    phi = np.arccos(1.0 - 2.0 * k / n)
    theta = np.pi * (1.0 + 5.0 ** 0.5) * k
    u = np.column_stack([np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)])
    return radius * u
