"""Exception hierarchy shared by all modules."""


class PowmeanError(Exception):
    """Base class for errors raised by this package."""


class DomainError(PowmeanError, ValueError):
    """Evaluation at a pole, a zero of a negative power, or an invalid argument."""


class RegimeError(PowmeanError, ValueError):
    """The requested parameters fall outside the regime where a result exists.

    Typical cases are infinite asymptotic variance or a non-integrable
    estimator.
    """


class NonConvergenceError(PowmeanError, RuntimeError):
    """An iterative procedure stopped before meeting its tolerance."""
