"""Exception hierarchy shared by all dppm modules."""


class DppmError(Exception):
    """Base class for all dppm-specific failures."""


class InvalidSpectrumError(DppmError, ValueError):
    """A quadratic objective was given a nonpositive diagonal entry."""


class StationaryPointError(DppmError):
    """A direction was requested at a point with zero gradient."""


class NonDescentError(DppmError):
    """A step was requested along a direction with nonnegative slope."""


class DegenerateSegmentError(DppmError):
    """The probed ray is concave in its first cell; no usable convex segment."""


class UnboundedDualError(DppmError):
    """The two-variable dual is unbounded above; the linearization is degenerate."""


class SingularUpdateError(DppmError):
    """The rank-one update denominator 1 + t p'Qp vanished."""


class ScheduleError(DppmError, ValueError):
    """A step-size schedule was configured with growth factor c <= 1."""


class EvaluationError(DppmError):
    """A function evaluation returned a non-finite value."""
