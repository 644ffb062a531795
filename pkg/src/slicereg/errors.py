"""Exception hierarchy shared by every module."""


class ParseError(ValueError):
    """Malformed quaternion literal, polynomial JSON or expression JSON."""


class DomainError(ValueError):
    """An operation was applied outside its mathematical domain."""


class ZeroDivisorError(DomainError, ZeroDivisionError):
    """Inversion of the zero quaternion."""


class FrameError(DomainError):
    """Imaginary units that do not form an orthonormal frame, or mismatched frames."""


class PoleError(DomainError):
    """Evaluation point lies on the zero set of a symmetrization."""

    def __init__(self, message, leaf=None, point=None):
        super().__init__(message)
        self.leaf = leaf
        self.point = point


class ZeroPolynomialError(DomainError):
    """The zero polynomial was passed where a nonzero one is required."""


class DegenerateLocusError(DomainError):
    """A point lies on (or too close to) a degenerate sphere, or on the real axis where a sphere is needed."""


class InconsistencyError(RuntimeError):
    """A numerical result contradicts the theory; indicates loss of accuracy."""
