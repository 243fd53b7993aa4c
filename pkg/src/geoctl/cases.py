"""The five case-study systems ``X_(1,0,0) + sum u_i X_(z_i,0,0)`` and their
expected invariant control sets."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .convex import SphericalRegion
from .errors import ConfigurationError, FixtureError
from .fields import symmetric
from .orbits import ICSCandidate, attractor_sweep, sample_positive_orbit, sphere_controls, verify_ics
from .quaternion import QuaternionLike, as_array
from .system import ControlRange, ControlSystem
from .tolerances import CLOUD_DELTA

CASE_IDS = ("i", "i_prime", "ii", "ii_prime", "iii")
ONE = np.array([1.0, 0.0, 0.0, 0.0])
#: control ball radius for case (iii); the dome level is 1/sqrt(1 + r^2)
BALL_RADIUS = 1.0


def _pure(z: QuaternionLike, what: str) -> np.ndarray:
    a = as_array(z).astype(float)
    if abs(a[0]) > 1e-12:
        raise FixtureError(f"{what} must be a pure quaternion")
    if np.linalg.norm(a[1:]) == 0.0:
        raise FixtureError(f"{what} must be nonzero")
    return np.r_[0.0, a[1:]]


def _unit(v):
    return v / np.linalg.norm(v)


@dataclass(frozen=True)
class CaseStudy:
    id: str
    system: ControlSystem
    expected: ICSCandidate

    def control_grid(self, n: int = 21) -> np.ndarray:
        r = self.system.range
        if r.kind == "finite":
            return np.asarray(r.values)
        if r.kind == "box":
            t = np.linspace(r.low, r.high, n)
            if r.dim == 1:
                return t[:, None]
            g = np.meshgrid(*[t] * r.dim, indexing="ij")
            return np.stack([x.ravel() for x in g], axis=1)
        return sphere_controls(n * n, r.radius)


def build_case(case_id: str, z: QuaternionLike = (0, 1, 0, 0), z1: QuaternionLike = (0, 1, 0, 0),
               z2: QuaternionLike = (0, 0, 1, 0), radius: float = BALL_RADIUS) -> CaseStudy:
    """System and expected region for one case; defaults z = z1 = i, z2 = j."""
    drift = symmetric(ONE)
    if case_id in ("i", "i_prime"):
        zq = _pure(z, "z")
        crange = ControlRange.box(1, -1.0, 1.0) if case_id == "i" else ControlRange.finite([[-1.0], [1.0]])
        system = ControlSystem(drift, (symmetric(zq),), crange)
        region = SphericalRegion.segment(_unit(ONE + zq), _unit(ONE - zq))
        attractors = attractor_sweep(system, [[-1.0], [1.0]])
    elif case_id in ("ii", "ii_prime"):
        a, b = _pure(z1, "z1"), _pure(z2, "z2")
        p1, p2 = _unit(ONE + a), _unit(ONE + b)
        if np.linalg.norm(np.cross(a[1:], b[1:])) <= 1e-12 * np.linalg.norm(a) * np.linalg.norm(b):
            raise FixtureError("p1 and p2 lie on one great circle through 1")
        if case_id == "ii":
            crange = ControlRange.box(2, 0.0, 1.0)
            gens = [ONE, p1, p2, _unit(ONE + a + b)]
        else:
            crange = ControlRange.finite([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
            gens = [ONE, p1, p2]
        system = ControlSystem(drift, (symmetric(a), symmetric(b)), crange)
        region = SphericalRegion.hull(gens)
        attractors = attractor_sweep(system, crange.extreme_points())
    elif case_id == "iii":
        if not radius > 0:
            raise FixtureError("ball radius must be positive")
        crange = ControlRange.ball(3, radius)
        controls = tuple(symmetric(e) for e in np.eye(4)[1:])
        system = ControlSystem(drift, controls, crange)
        region = SphericalRegion.dome(ONE, 1.0 / np.sqrt(1.0 + radius ** 2))
        attractors = attractor_sweep(system, sphere_controls(6, radius))
    else:
        raise ConfigurationError(f"unknown case {case_id!r}; expected one of {CASE_IDS}")
    return CaseStudy(case_id, system, ICSCandidate(region, attractors))


def default_samples(case_id: str) -> int:
    """Schedules per reachability cloud; the dome boundary is a 2-sphere and
    needs a denser cloud than the arcs and hulls."""
    return 4000 if case_id == "iii" else 2000


def run_case(case_id: str, z=None, z1=None, z2=None, horizon: float = 30.0, samples: int | None = None,
             seed: int = 0, grid: int = 12, radius: float = BALL_RADIUS,
             cloud_samples: int = 200, boundary_points: int = 200,
             delta: float = CLOUD_DELTA) -> tuple[dict, dict]:
    """Verify one case; returns ``(report, artifacts)`` with arrays for export."""
    kwargs = {k: v for k, v in (("z", z), ("z1", z1), ("z2", z2)) if v is not None}
    case = build_case(case_id, radius=radius, **kwargs)
    if samples is None:
        samples = default_samples(case_id)
    result = verify_ics(case.system, case.expected, grid=grid, horizon=horizon,
                        samples=samples, seed=seed, delta=delta)
    sweep = attractor_sweep(case.system, case.control_grid())
    cloud = sample_positive_orbit(case.system, ONE, horizon, cloud_samples, seed)
    report = {"case": case_id, "system": case.system.to_json(),
              "expected": case.expected.to_json(), **result}
    artifacts = {
        "cloud": cloud.points,
        "attractors": np.array([s.point.array for s in sweep]),
        "boundary": case.expected.region.boundary_sample(boundary_points),
    }
    return report, artifacts
