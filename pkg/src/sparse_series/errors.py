"""Exception hierarchy.

Errors split into two families: ``InvalidInput`` for malformed requests and
``ComputationError`` for requests that are well formed but cannot be honoured
at the configured horizon, majorant or precision budget.  The command line
maps the first family to exit code 1 and the second to exit code 2.
"""


class SparseSeriesError(Exception):
    pass


class InvalidInput(SparseSeriesError, ValueError):
    pass


class ComputationError(SparseSeriesError):
    pass


class NoRealRootAboveOne(InvalidInput):
    pass


class ReducibleRejected(InvalidInput):
    pass


class NonRationalField(InvalidInput):
    pass


class EmptySupport(InvalidInput):
    pass


class TooFewElements(InvalidInput):
    pass


class RefinementBudgetExceeded(ComputationError):
    pass


class HorizonTooLarge(ComputationError):
    pass


class OutOfHorizon(ComputationError):
    pass


class HorizonInsufficient(ComputationError):
    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class MajorantTooWeak(ComputationError):
    pass


class OverflowPolicy(ComputationError):
    pass


class UnresolvedIntervals(ComputationError):
    def __init__(self, message, indices=()):
        super().__init__(message)
        self.indices = tuple(indices)


class NoWitnessFound(ComputationError):
    def __init__(self, failing, witnesses=()):
        shown = ", ".join(str(u) for u in list(failing)[:10])
        more = "" if len(failing) <= 10 else f" (+{len(failing) - 10} more)"
        super().__init__(f"no norm witness for u in {{{shown}}}{more}")
        self.failing = tuple(failing)
        self.witnesses = tuple(witnesses)
