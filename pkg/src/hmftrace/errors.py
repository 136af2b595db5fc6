"""Exception hierarchy shared by all hmftrace modules."""


class HmftraceError(Exception):
    """Base class for every error raised by this package."""


class InvalidFieldError(HmftraceError):
    """Field descriptor is not a valid totally real quadratic field."""


class UnsupportedDegreeError(HmftraceError):
    """Operation implemented only for degree-2 fields was asked for more."""


class DomainError(HmftraceError):
    """Argument outside the mathematical domain of the operation."""


class PoleError(DomainError):
    """Evaluation requested at (or too close to) a pole."""


class InconsistencyError(HmftraceError):
    """Two internal computations of the same quantity disagree."""


class AccuracyError(HmftraceError):
    """Requested tolerance cannot be certified by the numerical scheme."""


class QuadratureError(AccuracyError):
    """Adaptive quadrature failed to converge; carries the last estimate."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class NonIntegrableError(HmftraceError):
    """Integral keeps growing under domain refinement."""


class AmbiguousClassificationError(HmftraceError):
    """Trace too close to the parabolic boundary and no exact data given."""


class DegenerateAngleError(DomainError):
    """Rotation angle 0 or pi: not an admissible elliptic coordinate."""


class ResourceError(HmftraceError):
    """Enumeration would exceed the configured element/point budget."""


class ConfigError(HmftraceError):
    """Malformed run configuration; carries a line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
