"""Exception hierarchy shared by all winrestart modules."""


class WinRestartError(Exception):
    """Base class for every error raised by this package."""


class DomainError(WinRestartError, ValueError):
    """An argument lies outside the domain where a formula is defined."""


class NonFiniteState(WinRestartError, FloatingPointError):
    """The ODE state became inf/nan; usually the step size is too large."""


class ZeroSpeedStall(WinRestartError):
    """The speed never left zero although the gradient is nonzero."""


class NoProgress(WinRestartError):
    """Consecutive restart cycles stopped decreasing the objective gap.

    The partially built trajectory is attached as ``trajectory``.
    """

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class BracketFailure(WinRestartError):
    """No sign change was found while bracketing a root."""


class InvalidContraction(WinRestartError):
    """The computed per-cycle factor is not in (0, 1)."""


class NonFiniteIterate(WinRestartError, FloatingPointError):
    """The discrete algorithm diverged at iteration ``k``."""

    def __init__(self, message, k=None):
        super().__init__(message)
        self.k = k


class InsufficientData(WinRestartError, ValueError):
    """Fewer than two usable samples were supplied to a regression."""


class EmptyInput(WinRestartError, ValueError):
    """An operation received an empty sequence."""


class ConfigError(WinRestartError, ValueError):
    """Invalid experiment configuration; ``field`` names the culprit."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
