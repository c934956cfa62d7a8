class ScatteringError(Exception):
    """Base error. ``exit_code`` is the status the CLI terminates with."""

    exit_code = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class InvalidParameterError(ScatteringError, ValueError):
    exit_code = 2


class BranchError(ScatteringError, ZeroDivisionError):
    """sqrt or reciprocal of a jet whose constant term vanishes."""

    exit_code = 2


class ConditioningError(ScatteringError, ArithmeticError):
    exit_code = 3


class StateNormalizationError(ScatteringError):
    exit_code = 4


class ValidationFailure(ScatteringError):
    exit_code = 5


class ConditioningWarning(RuntimeWarning):
    pass
