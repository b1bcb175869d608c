"""
Engine exceptions.

Every failure a command can hit maps to one of these, and each class
carries the process exit code the CLI reports for it.
"""


class EngineError(Exception):
    """Base class for all engine errors."""
    exit_code = 1


class ModelParseError(EngineError):
    """Model or discount file cannot be parsed."""
    exit_code = 2


class DimensionMismatchError(ModelParseError):
    """Arrays in a model file disagree on d or Kmax."""


class ModelValidationError(EngineError):
    """A probabilistic invariant of the model is violated."""
    exit_code = 3

    def __init__(self, report):
        self.report = report
        super().__init__("; ".join(report.violations) or "invalid model")


class DomainError(EngineError):
    exit_code = 4


class DegenerateBackwardError(DomainError):
    """Conditioning on a backward recurrence time the sojourn law cannot reach."""

    def __init__(self, component, state, backward):
        self.component = component
        self.state = state
        self.backward = backward
        super().__init__(
            f"component {component}: H({backward}) = 1 in state {state}, "
            f"a sojourn older than {backward} periods is impossible"
        )


class A3ViolationError(DomainError):
    """Down states are not absorbing."""


class InitInDownError(DomainError):
    """Pricing requires both components to start in Up."""


class ZeroDenominatorError(DomainError):
    """A univariate baseline reliability reaches zero inside the horizon."""


class ZeroAnnuityError(DomainError):
    """The premium annuity is zero, so no par spread exists."""


class EmptyEnsembleError(DomainError):
    """Estimation requested on an ensemble with no paths."""


class HorizonOverflowError(EngineError):
    """Horizon or backward exceeds the configured table bounds."""
    exit_code = 5


class TMaxTooSmallError(HorizonOverflowError):
    """Pricing truncation horizon leaves too much unresolved mass."""
