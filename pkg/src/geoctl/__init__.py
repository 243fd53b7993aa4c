"""Quaternionic vector fields on S^3 induced by so(1,4), their control
systems, and numerical checks of invariant control sets."""

__version__ = "0.1.0"

from .convex import SphericalRegion, geodesic_segment_points, is_pointed
from .errors import (ConfigurationError, ControlRangeError, DomainError, FixtureError,
                     GeoctlError, InvalidElementError)
from .fields import FieldSpec, evaluate, symmetric
from .flow import integrate, integrate_switched, symmetric_flow
from .orbits import ICSCandidate, attractor_sweep, sample_positive_orbit, verify_ics, verify_invariance
from .quaternion import PureQuaternion, Quaternion, UnitQuaternion
from .system import ControlRange, ControlSystem

__all__ = [
    "ConfigurationError", "ControlRange", "ControlRangeError", "ControlSystem", "DomainError",
    "FieldSpec", "FixtureError", "GeoctlError", "ICSCandidate", "InvalidElementError",
    "PureQuaternion", "Quaternion", "SphericalRegion", "UnitQuaternion", "attractor_sweep",
    "evaluate", "geodesic_segment_points", "integrate", "integrate_switched", "is_pointed",
    "sample_positive_orbit", "symmetric", "symmetric_flow", "verify_ics", "verify_invariance",
]
