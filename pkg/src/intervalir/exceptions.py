"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class IntervalIRError(Exception):
    """Base class for all library errors."""


class ParseError(IntervalIRError, ValueError):
    """Malformed run or qrels input."""

    def __init__(self, message, line=None, source=None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class ContractError(IntervalIRError, ValueError):
    """A precondition of an operation was violated."""


class DegenerateTopicError(IntervalIRError, ValueError):
    """Topic without any relevant document (recall base of zero)."""


class CapacityError(IntervalIRError):
    """Requested enumeration or embedding exceeds the configured cap."""


class ScaleDomainError(IntervalIRError, ValueError):
    """A score does not lie on the scale it is being ranked against.

    ``index`` is the position of the first offending value in the input.
    """

    def __init__(self, message, index=None):
        self.index = index
        super().__init__(message)


class NumericalError(IntervalIRError, ArithmeticError):
    """A numerical routine failed to converge."""


class DegenerateInputError(IntervalIRError, ValueError):
    """Input carries no ordering information (e.g. all values tied)."""
