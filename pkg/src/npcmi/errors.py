"""Exception types raised by the package."""


class NPCError(Exception):
    """Base class for estimator errors."""


class DomainError(NPCError, ValueError):
    """An argument lies outside a function's domain."""


class DegenerateInputError(NPCError, ValueError):
    """Data carries no usable dependency structure (constant or collinear)."""


class ConfigurationError(NPCError, ValueError):
    pass


class OptimizationError(NPCError, RuntimeError):
    pass


class NumericalConsistencyError(NPCError, ArithmeticError):
    pass


class InfiniteInformationError(NPCError, ArithmeticError):
    """Perfect dependence: the mutual information diverges."""


class ParseError(NPCError, ValueError):
    """Malformed input file; ``line`` is 1-based."""

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(where + message)
