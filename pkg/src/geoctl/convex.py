"""Spherically convex regions of S^3 described by their cones.

A region is one of

* ``dome``:    ``{p : <p, axis> >= level}``, ``0 <= level < 1``
* ``segment``: the minimal great-circle arc between two non-antipodal points
* ``hull``:    ``S^3 ∩ co(generators)`` for a pointed finitely generated cone

Distances returned by :meth:`SphericalRegion.distance` are chordal (in R^4),
except for domes where the height deficit ``level - <p, axis>`` is used; both
are zero on the boundary and positive outside.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog, nnls
from scipy.spatial import ConvexHull, QhullError

from .errors import ConfigurationError, DomainError, NonUniqueGeodesicError
from .quaternion import QuaternionLike, as_array, as_unit_array
from .tolerances import ALGEBRAIC_TOL

POINTED_TOL = 1e-9
MEMBERSHIP_TOL = 1e-9


def _unit(v, what: str) -> np.ndarray:
    v = as_array(v).astype(float)
    if abs(np.linalg.norm(v) - 1.0) > 1e-9:
        raise ConfigurationError(f"{what} must be a unit quaternion")
    return v / np.linalg.norm(v)


def cone_distance(generators: np.ndarray, p) -> float:
    """Euclidean distance from ``p`` to the conic hull of the rows of ``generators``."""
    _, resid = nnls(np.asarray(generators, dtype=float).T, np.asarray(p, dtype=float))
    return float(resid)


def is_pointed(generators) -> bool:
    """True iff the conic hull of ``generators`` contains no line.

    Not pointed exactly when 0 is a nontrivial nonnegative combination; that
    is decided by the residual of ``min |G a|`` subject to ``a >= 0, sum a = 1``.
    """
    if len(generators) == 0:
        raise DomainError("no generators")
    g = np.atleast_2d(np.asarray([as_array(x) for x in generators], dtype=float))
    scale = max(1.0, float(np.max(np.abs(g))))
    a = np.vstack([g.T, scale * np.ones((1, g.shape[0]))])
    b = np.concatenate([np.zeros(g.shape[1]), [scale]])
    _, resid = nnls(a, b)
    return bool(resid >= POINTED_TOL)


def geodesic_segment_points(p1: QuaternionLike, p2: QuaternionLike, n: int) -> np.ndarray:
    """``n`` points on the minimal arc from ``p1`` to ``p2``, uniform in angle."""
    a = as_unit_array(p1)
    b = as_unit_array(p2)
    if n < 2:
        raise DomainError("need n >= 2")
    if np.linalg.norm(a + b) <= ALGEBRAIC_TOL:
        raise NonUniqueGeodesicError("antipodal endpoints have no unique minimal geodesic")
    c = float(a @ b)
    perp = b - c * a
    s = float(np.linalg.norm(perp))
    if s == 0.0:
        return np.repeat(a[None, :], n, axis=0)
    theta_max = float(np.arctan2(s, c))
    theta = np.linspace(0.0, theta_max, n)
    pts = np.cos(theta)[:, None] * a + np.sin(theta)[:, None] * (perp / s)
    pts[0], pts[-1] = a, b
    return pts


def dome_invariance_threshold(z: QuaternionLike) -> float:
    """Largest dome level ``1/sqrt(1+|z|^2)`` invariant under X_(1±z,0,0)."""
    return float(1.0 / np.sqrt(1.0 + np.sum(as_array(z)[1:] ** 2)))


def r_t(z: QuaternionLike, t: float) -> float:
    """Level at which ``Re X_(1-z,0,0)(a+w)`` changes sign, angle(w, z) = t."""
    zn2 = float(np.sum(as_array(z)[1:] ** 2))
    return float(1.0 / np.sqrt(1.0 + zn2 * np.cos(t) ** 2))


def dome_real_rate(z: QuaternionLike, a: float, t: float, sign: int = +1) -> float:
    """``Re X_(1+sign z,0,0)(a + w)`` for ``|w| = sqrt(1-a^2)`` at angle ``t`` to ``z``.

    Closed form ``1 - a^2 - sign * a sqrt(1-a^2) |z| cos t``.
    """
    zn = float(np.linalg.norm(as_array(z)[1:]))
    return 1.0 - a * a - sign * a * np.sqrt(max(0.0, 1.0 - a * a)) * zn * np.cos(t)


def _fibonacci_s2(n: int) -> np.ndarray:
    k = np.arange(n) + 0.5
    phi = np.arccos(1.0 - 2.0 * k / n)
    theta = np.pi * (1.0 + 5.0 ** 0.5) * k
    return np.column_stack([np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)])


def _complement_basis(v: np.ndarray) -> np.ndarray:
    """3x4 orthonormal basis of the complement of the unit vector ``v``."""
    _, _, vt = np.linalg.svd(v[None, :])
    return vt[1:]


@dataclass(frozen=True)
class SphericalRegion:
    kind: str
    axis: np.ndarray | None = None
    level: float = 0.0
    p1: np.ndarray | None = None
    p2: np.ndarray | None = None
    generators: np.ndarray | None = field(default=None, repr=False)

    # --- constructors -------------------------------------------------------

    @classmethod
    def dome(cls, axis: QuaternionLike = (1, 0, 0, 0), level: float = 0.0) -> "SphericalRegion":
        if not 0.0 <= level < 1.0:
            raise ConfigurationError(f"dome level {level} outside [0, 1)")
        return cls("dome", axis=_unit(axis, "dome axis"), level=float(level))

    @classmethod
    def segment(cls, p1: QuaternionLike, p2: QuaternionLike) -> "SphericalRegion":
        a, b = _unit(p1, "segment endpoint"), _unit(p2, "segment endpoint")
        if np.linalg.norm(a + b) <= ALGEBRAIC_TOL:
            raise NonUniqueGeodesicError("segment endpoints are antipodal")
        return cls("segment", p1=a, p2=b)

    @classmethod
    def hull(cls, generators) -> "SphericalRegion":
        g = np.atleast_2d(np.asarray([_unit(x, "hull generator") for x in generators]))
        if not is_pointed(g):
            raise ConfigurationError("hull generators span a cone that is not pointed")
        return cls("hull", generators=g)

    # --- geometry -----------------------------------------------------------

    def _arc(self):
        c = float(self.p1 @ self.p2)
        perp = self.p2 - c * self.p1
        s = float(np.linalg.norm(perp))
        if s == 0.0:
            return _complement_basis(self.p1)[0], 0.0
        return perp / s, float(np.arctan2(s, c))

    @property
    def arc_length(self) -> float:
        if self.kind != "segment":
            raise ConfigurationError("arc_length is defined for segments only")
        return self._arc()[1]

    def distance(self, p) -> np.ndarray:
        """Signed exit depth for domes, distance to the region otherwise."""
        p = np.asarray(p, dtype=float)
        if self.kind == "dome":
            return self.level - p @ self.axis
        if self.kind == "segment":
            n, theta_max = self._arc()
            x = p @ self.p1
            y = p @ n
            ang = np.clip(np.arctan2(y, x), 0.0, theta_max)
            near = np.cos(ang)[..., None] * self.p1 + np.sin(ang)[..., None] * n
            return np.linalg.norm(p - near, axis=-1)
        if self.kind == "hull":
            flat = np.atleast_2d(p)
            out = np.array([cone_distance(self.generators, x) for x in flat])
            return out.reshape(p.shape[:-1])
        raise ConfigurationError(f"unknown region kind {self.kind!r}")

    def contains(self, p, tol: float = MEMBERSHIP_TOL):
        return self.distance(p) <= tol

    def any_within(self, points: np.ndarray, tol: float) -> bool:
        """Whether some of ``points`` lies within ``tol`` of the region."""
        points = np.atleast_2d(points)
        if self.kind != "hull":
            return bool(np.any(self.distance(points) <= tol))
        # cheap prefilter: points far from every generator cannot be close to
        # the hull only if the hull is small; check nearest-to-centre first
        centre = self.generators.sum(axis=0)
        order = np.argsort(-(points @ centre))
        for chunk in np.array_split(order, max(1, len(order) // 256)):
            if np.any(self.distance(points[chunk]) <= tol):
                return True
        return False

    def attractor_membership(self, points, tol: float = MEMBERSHIP_TOL) -> np.ndarray:
        return np.atleast_1d(self.contains(np.atleast_2d(points), tol))

    # --- sampling -----------------------------------------------------------

    def sample(self, rng: np.random.Generator, n: int, boundary_fraction: float = 0.0) -> np.ndarray:
        """``n`` points of the region; a fraction is drawn on its boundary."""
        n_b = int(round(boundary_fraction * n))
        inner = self._sample_interior(rng, n - n_b)
        if n_b == 0:
            return inner
        return np.concatenate([inner, self._sample_boundary(rng, n_b)])

    def _sample_interior(self, rng, n):
        if n <= 0:
            return np.zeros((0, 4))
        if self.kind == "dome":
            phi_max = np.arccos(self.level)
            top = np.sin(min(phi_max, np.pi / 2)) ** 2
            phis = []
            while len(phis) < n:
                cand = rng.uniform(0.0, phi_max, size=2 * n)
                keep = cand[rng.random(2 * n) * top <= np.sin(cand) ** 2]
                phis.extend(keep.tolist())
            phi = np.asarray(phis[:n])
            return self._dome_points(phi, rng.standard_normal((n, 3)))
        if self.kind == "segment":
            n_vec, theta_max = self._arc()
            th = rng.uniform(0.0, theta_max, size=n)
            return np.cos(th)[:, None] * self.p1 + np.sin(th)[:, None] * n_vec
        weights = rng.dirichlet(np.ones(len(self.generators)), size=n)
        pts = weights @ self.generators
        return pts / np.linalg.norm(pts, axis=1, keepdims=True)

    def _sample_boundary(self, rng, n):
        if self.kind == "dome":
            phi = np.full(n, np.arccos(self.level))
            return self._dome_points(phi, rng.standard_normal((n, 3)))
        if self.kind == "segment":
            pick = rng.random(n) < 0.5
            return np.where(pick[:, None], self.p1, self.p2)
        g = self.generators
        i = rng.integers(0, len(g), size=n)
        j = rng.integers(0, len(g), size=n)
        t = rng.random(n)[:, None]
        pts = (1 - t) * g[i] + t * g[j]
        return pts / np.linalg.norm(pts, axis=1, keepdims=True)

    def _dome_points(self, phi, directions):
        basis = _complement_basis(self.axis)
        d = directions / np.linalg.norm(directions, axis=1, keepdims=True)
        return np.cos(phi)[:, None] * self.axis + np.sin(phi)[:, None] * (d @ basis)

    def boundary_sample(self, n: int) -> np.ndarray:
        """Deterministic sample of the region's boundary (for export)."""
        if self.kind == "dome":
            phi = np.full(n, np.arccos(self.level))
            return self._dome_points(phi, _fibonacci_s2(n))
        if self.kind == "segment":
            return geodesic_segment_points(self.p1, self.p2, max(n, 2))
        return _hull_boundary(self.generators, n)

    def grid(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Test points spread over the region: structured for segments,
        random with a boundary share otherwise."""
        if self.kind == "segment":
            return geodesic_segment_points(self.p1, self.p2, max(n, 2))
        if self.kind == "hull":
            k = min(n, len(self.generators))
            return np.concatenate([self.generators[:k], self.sample(rng, n - k, 0.3)])
        return np.concatenate([self.axis[None, :], self.sample(rng, n - 1, 0.4)])

    def extended(self, angle: float) -> "SphericalRegion":
        """Segment lengthened by ``angle`` radians beyond each endpoint."""
        if self.kind != "segment":
            raise ConfigurationError("only segments can be extended")
        n_vec, theta_max = self._arc()
        a = np.cos(-angle) * self.p1 + np.sin(-angle) * n_vec
        b = np.cos(theta_max + angle) * self.p1 + np.sin(theta_max + angle) * n_vec
        return SphericalRegion.segment(a / np.linalg.norm(a), b / np.linalg.norm(b))

    # --- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        if self.kind == "dome":
            return {"kind": "dome", "axis": self.axis.tolist(), "level": self.level}
        if self.kind == "segment":
            return {"kind": "segment", "p1": self.p1.tolist(), "p2": self.p2.tolist()}
        return {"kind": "hull", "generators": self.generators.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "SphericalRegion":
        kind = data.get("kind")
        if kind == "dome":
            return cls.dome(data.get("axis", (1, 0, 0, 0)), float(data["level"]))
        if kind == "segment":
            return cls.segment(data["p1"], data["p2"])
        if kind == "hull":
            return cls.hull(data["generators"])
        raise ConfigurationError(f"unknown region kind {kind!r}")


def _separating_direction(g: np.ndarray) -> np.ndarray:
    c = g.sum(axis=0)
    c = c / np.linalg.norm(c)
    if np.all(g @ c > 1e-9):
        return c
    # maximise t subject to <g_i, c> >= t, |c_k| <= 1
    k = g.shape[1]
    res = linprog(np.r_[np.zeros(k), -1.0],
                  A_ub=np.c_[-g, np.ones(len(g))], b_ub=np.zeros(len(g)),
                  bounds=[(-1, 1)] * k + [(None, None)])
    c = res.x[:k]
    return c / np.linalg.norm(c)


def _hull_boundary(g: np.ndarray, n: int) -> np.ndarray:
    """Points on the relative boundary of ``S^3 ∩ co(g)`` via a gnomonic chart."""
    c = _separating_direction(g)
    y = g / (g @ c)[:, None] - c
    centred = y - y.mean(axis=0)
    _, s, vt = np.linalg.svd(centred)
    d = int(np.sum(s > 1e-9 * max(1.0, s[0] if s.size else 1.0)))
    if d == 0:
        return g[:1].repeat(max(n, 1), axis=0)
    coords = centred @ vt[:d].T
    if d == 1:
        edges = [(int(np.argmin(coords[:, 0])), int(np.argmax(coords[:, 0])))]
    else:
        try:
            hull = ConvexHull(coords)
        except QhullError:
            edges = [(i, j) for i in range(len(g)) for j in range(i + 1, len(g))]
        else:
            edges = sorted({tuple(sorted((int(s[i]), int(s[(i + 1) % len(s)]))))
                            for s in hull.simplices for i in range(len(s))})
    per = max(2, int(np.ceil(n / len(edges))))
    pts = []
    for i, j in edges:
        t = np.linspace(0.0, 1.0, per)[:, None]
        seg = c + (1 - t) * y[i] + t * y[j]
        pts.append(seg / np.linalg.norm(seg, axis=1, keepdims=True))
    return np.concatenate(pts)[: max(n, len(edges) * 2)]
