"""Exception hierarchy shared by every module of the package."""


class WdroError(Exception):
    """Base class for all errors raised by :mod:`wdro`."""


class DimensionMismatch(WdroError, ValueError):
    pass


class NonFiniteValue(WdroError, ValueError):
    pass


class EmptyDataset(WdroError, ValueError):
    pass


class InvalidParams(WdroError, ValueError):
    pass


class InvalidLabel(WdroError, ValueError):
    pass


class IncompatibleRegularizer(WdroError, ValueError):
    pass


class NotLipschitz(WdroError, ValueError):
    pass


class DegeneratePair(WdroError, ValueError):
    pass


class InfeasibleInstance(WdroError, ValueError):
    pass


class SolverFailure(WdroError, RuntimeError):
    pass


class InvalidSpec(WdroError, ValueError):
    pass


class ParseError(WdroError, ValueError):
    """CSV content that cannot be parsed; carries the offending row and column."""

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class SchemaMismatch(WdroError, ValueError):
    pass
