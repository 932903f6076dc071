"""Exception hierarchy shared by every module."""


class ShiftSpecError(Exception):
    """Base class for all library errors."""


class MapDefinitionError(ShiftSpecError, ValueError):
    """A map presentation violates its structural invariants."""


class DomainError(ShiftSpecError, ValueError):
    """An index is not in the domain of a map."""


class PreconditionError(ShiftSpecError):
    """An operation was called outside its precondition."""


class BudgetError(ShiftSpecError):
    """A search ran out of its exploration budget; the answer is Unknown.

    ``partial`` carries whatever was computed before giving up.
    """

    def __init__(self, message: str, partial: object = None):
        super().__init__(message)
        self.partial = partial


class InstanceError(ShiftSpecError, ValueError):
    """A specification instance is malformed or violates a gap requirement."""


class InvariantError(ShiftSpecError, AssertionError):
    """An internal invariant failed. Indicates a bug or a wrong certificate."""
