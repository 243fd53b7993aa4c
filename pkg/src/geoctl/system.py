"""Control systems ``X_drift + sum_i u_i X_i`` with a control range U."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, ControlRangeError
from .fields import FieldSpec

RANGE_TOL = 1e-12


@dataclass(frozen=True)
class ControlRange:
    """U as a box ``[low, high]^m``, a finite set of vectors, or a ball ``B[0, r]``.

    Sampling mixes interior draws with extreme draws (box vertices, ball
    boundary) half and half; extreme controls generate the extreme attractors.
    """

    kind: str
    dim: int
    low: float = -1.0
    high: float = 1.0
    radius: float = 1.0
    values: tuple = ()

    def __post_init__(self):
        if self.kind not in ("box", "finite", "ball"):
            raise ConfigurationError(f"unknown control range kind {self.kind!r}")
        if self.dim < 1:
            raise ConfigurationError("control dimension must be positive")
        if self.kind == "box" and not self.low <= self.high:
            raise ConfigurationError("empty box")
        if self.kind == "ball" and not self.radius >= 0:
            raise ConfigurationError("ball radius must be nonnegative")
        if self.kind == "finite":
            if len(self.values) == 0:
                raise ConfigurationError("finite control set is empty")
            vals = tuple(tuple(float(c) for c in np.atleast_1d(v)) for v in self.values)
            if any(len(v) != self.dim for v in vals):
                raise ConfigurationError("finite control values have wrong dimension")
            object.__setattr__(self, "values", vals)

    @classmethod
    def box(cls, dim: int, low: float = -1.0, high: float = 1.0) -> "ControlRange":
        return cls("box", dim, low=float(low), high=float(high))

    @classmethod
    def finite(cls, values: Sequence) -> "ControlRange":
        vals = [np.atleast_1d(np.asarray(v, dtype=float)) for v in values]
        if not vals:
            raise ConfigurationError("finite control set is empty")
        return cls("finite", len(vals[0]), values=tuple(tuple(v) for v in vals))

    @classmethod
    def ball(cls, dim: int, radius: float = 1.0) -> "ControlRange":
        return cls("ball", dim, radius=float(radius))

    def contains(self, u, tol: float = RANGE_TOL) -> bool:
        u = np.atleast_1d(np.asarray(u, dtype=float))
        if u.shape != (self.dim,):
            return False
        if self.kind == "box":
            return bool(np.all(u >= self.low - tol) and np.all(u <= self.high + tol))
        if self.kind == "ball":
            return bool(np.linalg.norm(u) <= self.radius + tol)
        return any(np.max(np.abs(u - np.asarray(v))) <= tol for v in self.values)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """``n`` control values, shape (n, dim)."""
        if self.kind == "finite":
            vals = np.asarray(self.values, dtype=float)
            return vals[rng.integers(0, len(vals), size=n)]
        extreme = rng.random(n) < 0.5
        if self.kind == "box":
            interior = rng.uniform(self.low, self.high, size=(n, self.dim))
            corner = np.where(rng.random((n, self.dim)) < 0.5, self.low, self.high)
            return np.where(extreme[:, None], corner, interior)
        g = rng.standard_normal((n, self.dim))
        nrm = np.linalg.norm(g, axis=1, keepdims=True)
        nrm[nrm == 0] = 1.0
        direction = g / nrm
        r = self.radius * np.where(extreme, 1.0, rng.random(n) ** (1.0 / self.dim))
        return direction * r[:, None]

    def extreme_points(self, n_ball: int = 6) -> np.ndarray:
        """Vertices / finite values / a few axis points on the ball boundary."""
        if self.kind == "finite":
            return np.asarray(self.values, dtype=float)
        if self.kind == "box":
            grids = np.meshgrid(*[[self.low, self.high]] * self.dim, indexing="ij")
            return np.stack([g.ravel() for g in grids], axis=1)
        eye = np.eye(self.dim)
        return self.radius * np.concatenate([eye, -eye])[:n_ball]

    def to_json(self) -> dict:
        if self.kind == "box":
            return {"kind": "box", "dim": self.dim, "low": self.low, "high": self.high}
        if self.kind == "ball":
            return {"kind": "ball", "dim": self.dim, "radius": self.radius}
        return {"kind": "finite", "dim": self.dim, "values": [list(v) for v in self.values]}

    @classmethod
    def from_json(cls, data: dict) -> "ControlRange":
        kind = data.get("kind")
        if kind == "finite":
            return cls.finite(data["values"])
        if kind == "box":
            return cls.box(int(data["dim"]), data.get("low", -1.0), data.get("high", 1.0))
        if kind == "ball":
            return cls.ball(int(data["dim"]), data.get("radius", 1.0))
        raise ConfigurationError(f"unknown control range kind {kind!r}")


@dataclass(frozen=True)
class ControlSystem:
    drift: FieldSpec
    controls: tuple = field(default_factory=tuple)
    range: ControlRange | None = None

    def __post_init__(self):
        object.__setattr__(self, "controls", tuple(self.controls))
        m = len(self.controls)
        if m and self.range is None:
            raise ConfigurationError("control fields given without a control range")
        if self.range is not None and self.range.dim != m:
            raise ConfigurationError(f"range dimension {self.range.dim} != {m} control fields")

    @property
    def m(self) -> int:
        return len(self.controls)

    @property
    def is_symmetric(self) -> bool:
        return self.drift.is_symmetric and all(c.is_symmetric for c in self.controls)

    def control_matrix(self) -> np.ndarray:
        """(m, 10) matrix of control field coordinates."""
        if not self.controls:
            return np.zeros((0, 10))
        return np.array([c.vector for c in self.controls])

    def frozen_vectors(self, u) -> np.ndarray:
        """Field coordinates ``drift + sum u_i X_i`` for controls of shape (..., m)."""
        u = np.asarray(u, dtype=float)
        if self.m == 0:
            return np.broadcast_to(self.drift.vector, u.shape[:-1] + (10,)).copy()
        return self.drift.vector + u @ self.control_matrix()

    def frozen(self, u) -> FieldSpec:
        u = np.atleast_1d(np.asarray(u, dtype=float))
        self.check_control(u)
        return FieldSpec.from_vector(self.frozen_vectors(u))

    def check_control(self, u) -> None:
        u = np.atleast_1d(np.asarray(u, dtype=float))
        if self.m == 0:
            if u.size:
                raise ControlRangeError("system has no controls")
            return
        if not self.range.contains(u):
            raise ControlRangeError(f"control {u.tolist()} outside U")

    def sample_controls(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.m == 0:
            return np.zeros((n, 0))
        return self.range.sample(rng, n)

    def reversed(self) -> "ControlSystem":
        """Time reversal: every field negated (negative orbits)."""
        return ControlSystem(-self.drift, tuple(-c for c in self.controls), self.range)

    def to_json(self) -> dict:
        return {
            "drift": self.drift.to_json(),
            "controls": [c.to_json() for c in self.controls],
            "range": None if self.range is None else self.range.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "ControlSystem":
        controls = tuple(FieldSpec.from_json(c) for c in data.get("controls", []))
        rng = data.get("range")
        crange = None if rng is None else ControlRange.from_json(rng)
        return cls(FieldSpec.from_json(data["drift"]), controls, crange)
