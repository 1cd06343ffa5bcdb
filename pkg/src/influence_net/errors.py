"""Exception hierarchy shared by every module."""


class InfluenceNetError(Exception):
    """Base class for all package errors."""


class InvalidInputError(InfluenceNetError, ValueError):
    pass


class EmptyInputError(InvalidInputError):
    pass


class SelfInfluenceError(InvalidInputError):
    pass


class MissingNodeError(InfluenceNetError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class InvalidWeightError(InvalidInputError):
    pass


class InvalidParameterError(InvalidInputError):
    pass


class InconsistentInputError(InvalidInputError):
    pass


class DegenerateInputError(InfluenceNetError):
    pass


class NonConvergenceError(InfluenceNetError):
    """Raised by iterative solvers; ``partial`` holds the last iterate."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
