"""Exception hierarchy.

Everything numerical derives from :class:`NumericalRejection` so the CLI can
map it to a single exit code.
"""


class NumericalRejection(Exception):
    """An input was rejected because a numerical precondition failed."""


class AliasingError(NumericalRejection, ValueError):
    pass


class SingularSymbolError(NumericalRejection):
    def __init__(self, message, theta=None):
        super().__init__(message)
        self.theta = theta


class WindingError(NumericalRejection):
    def __init__(self, winding):
        super().__init__(f"no canonical factorization: winding {winding}")
        self.winding = winding


class PhaseResolutionError(NumericalRejection):
    pass


class ConvergenceError(NumericalRejection):
    def __init__(self, message, previous=None, current=None):
        super().__init__(message)
        self.previous = previous
        self.current = current


class ContourError(NumericalRejection):
    pass


class BoundPreconditionError(NumericalRejection, ValueError):
    pass
