"""Exception hierarchy shared across the package."""

from __future__ import annotations


class FctpError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(FctpError, ValueError):
    """Input data does not describe a valid instance."""


class NegativeFixedCost(ValidationError):
    pass


class DuplicateArc(ValidationError):
    pass


class SelfLoop(ValidationError):
    pass


class NonIntegerCapacity(ValidationError):
    pass


class NotATree(FctpError):
    pass


class UnsupportedVariant(FctpError):
    """The operation only covers the default (all LE, no lower link) variant."""


class CorruptTables(FctpError):
    pass


class InfeasibleFlow(FctpError):
    pass


class UnknownVariable(FctpError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its argument otherwise
        return str(self.args[0]) if self.args else ""


class NotInP(FctpError):
    pass


class ZeroCapacityArcWithFlow(NotInP):
    pass


class NotInQsn(FctpError):
    pass


class UnreachableTarget(FctpError):
    pass


class InvalidThreePartition(ValidationError):
    pass


class TooLarge(FctpError):
    pass


class BudgetExceeded(FctpError):
    def __init__(self, bound: int, limit: int) -> None:
        super().__init__(f"enumeration bound {bound} exceeds limit {limit}")
        self.bound = bound
        self.limit = limit


class InfeasibleInstance(FctpError):
    pass


class ParseError(FctpError):
    def __init__(self, message: str, *, line: int | None = None, field: str | None = None) -> None:
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.line = line
        self.field = field


class ModelFormatError(FctpError):
    pass


class NameTooLong(ModelFormatError):
    pass
