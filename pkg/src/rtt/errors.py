"""Exception types shared across the package."""


class RttError(Exception):
    """Base class for all package errors."""


class InvalidInstanceError(RttError):
    """The instance violates a structural invariant (cycle, multiple sources, ...)."""


class CyclicDependencyError(InvalidInstanceError):
    """Raised when a race DAG has a cyclic read-write dependency."""


class InvalidFlowError(RttError):
    """A flow assignment violates conservation, budget or non-negativity."""

    def __init__(self, message, violations=None):
        super().__init__(message)
        self.violations = list(violations or [])


class IncompatibleAlgorithmError(RttError):
    """The chosen algorithm does not apply to the instance's duration families."""


class SizeGuardError(RttError):
    """The brute-force oracle refused an instance that exceeds its size guard."""


class LpSolveError(RttError):
    """The LP solver failed; carries the violated constraint as a certificate."""

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class ParseError(RttError):
    """An instance / flow / formula file could not be parsed."""
