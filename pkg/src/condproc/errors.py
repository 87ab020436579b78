"""Exception types raised across the package."""


class CondProcError(Exception):
    """Base class for all package errors."""


class QuadratureFailure(CondProcError):
    def __init__(self, msg, interval=None):
        super().__init__(msg if interval is None else f"{msg} on {interval}")
        self.interval = interval


class DomainError(CondProcError, ValueError):
    pass


class IndeterminateClassification(CondProcError):
    def __init__(self, msg, exit_partial=None, entrance_partial=None):
        super().__init__(f"{msg} (exit partial={exit_partial}, entrance partial={entrance_partial})")
        self.exit_partial = exit_partial
        self.entrance_partial = entrance_partial


class NormalizationError(CondProcError):
    pass


class InconsistentRepresentation(CondProcError):
    pass


class DegenerateDenominator(CondProcError):
    pass


class LeakExceeded(CondProcError):
    pass


class RejectionBudgetExhausted(CondProcError):
    pass


class HorizonReached(CondProcError):
    pass


class StateEscapedInterval(CondProcError):
    pass


class GridError(CondProcError, ValueError):
    pass


class SingularSystem(CondProcError):
    pass


class ConfigError(CondProcError, ValueError):
    def __init__(self, msg, field=None):
        super().__init__(msg if field is None else f"{field}: {msg}")
        self.field = field
