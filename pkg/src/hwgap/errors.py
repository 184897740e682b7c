"""Exception types shared by every module."""


class HWGapError(Exception):
    """Base class for library errors."""


class PreconditionViolated(HWGapError, ValueError):
    """Inputs fall outside the regime in which a computation is defined."""


class NumericalFailure(HWGapError, ArithmeticError):
    """A numerical routine could not reach its tolerance or hit an impossible sign."""
