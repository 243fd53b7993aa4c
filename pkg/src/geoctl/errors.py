"""Exception hierarchy."""


class GeoctlError(Exception):
    """Base class for all package errors."""


class DomainError(GeoctlError, ValueError):
    """Argument outside the domain of an operation (e.g. a non-unit point)."""


class DegeneratePointError(DomainError):
    pass


class DegenerateFieldError(DomainError):
    pass


class InvalidElementError(GeoctlError, ValueError):
    """Matrix is not an element of the expected Lie algebra."""


class NotSymmetricError(InvalidElementError):
    pass


class ConfigurationError(GeoctlError, ValueError):
    pass


class ControlRangeError(ConfigurationError):
    pass


class NonUniqueGeodesicError(DomainError):
    pass


class FixtureError(ConfigurationError):
    """A case-study configuration violates the assumptions of its construction."""
