class SetSizeError(Exception):
    """Base class for errors raised by this package."""


class InvalidSpec(SetSizeError, ValueError):
    """A subset spec, shape or hidden set is malformed."""


class FamilyViolation(SetSizeError):
    """An oracle call used a subset outside the session's allowed family."""


class CapExceeded(SetSizeError):
    """An estimator hit its query/sample/iteration cap."""


class InvalidParams(SetSizeError, ValueError):
    """Parameters of an instance generator or configuration are out of range."""


class EstimatorFailure(SetSizeError):
    """A sampling-noise event the estimator cannot recover from (zero hits, no cut, ...)."""
