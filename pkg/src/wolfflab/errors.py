"""Exception types shared across wolfflab."""


class WolffLabError(Exception):
    """Base class for all wolfflab errors."""


class AssumptionViolation(WolffLabError, ValueError):
    """The standing hypotheses on (n, p, q, a, beta) do not hold.

    ``violations`` lists every failed inequality, not just the first.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class NumericalFailure(WolffLabError):
    """A computation could not reach its declared tolerance."""


class DomainError(WolffLabError, ValueError):
    pass


class QuadratureFailure(NumericalFailure):
    pass


class DivergentIntegral(NumericalFailure):
    """An improper integral diverges; ``side`` is 'origin', 'tail' or both."""

    def __init__(self, side, message=""):
        self.side = side
        super().__init__(message or f"integral diverges at {side}")


class DivergentPotential(NumericalFailure):
    pass


class IterationBudgetExceeded(NumericalFailure):
    pass


class NotApplicable(WolffLabError, ValueError):
    pass


class DerivativeUnavailable(NumericalFailure):
    pass


class StepSizeUnderflow(NumericalFailure):
    pass


class ClassificationAmbiguous(NumericalFailure):
    pass


class WindowTooNarrow(WolffLabError, ValueError):
    pass


class NotCritical(WolffLabError, ValueError):
    pass


class ConfigError(WolffLabError):
    """Bad run configuration; ``key`` names the offending entry."""

    def __init__(self, key, message=""):
        self.key = key
        super().__init__(message or f"bad config key {key!r}")
