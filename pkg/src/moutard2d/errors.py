"""Exception types shared across the package."""


class ConsistencyError(ValueError):
    """The one-form defining theta is not closed, so theta does not exist."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""


class PathDependenceError(RuntimeError):
    """Two integration paths for theta disagree beyond tolerance."""


class WavenumberMismatch(ValueError):
    """Helmholtz solutions with different k were combined."""


class LeadingPartError(ValueError):
    """Q does not lead with -x**4 - y**4, so the outer bound does not apply."""


class InconclusiveError(RuntimeError):
    """The positivity search hit the minimum cell size without a verdict."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class CertificateMissing(RuntimeError):
    """A spectral computation was requested for a C without a zero-free Q."""


class SolverStagnation(RuntimeError):
    """An inner linear solve or the eigensolver failed to converge."""
