from typing import Optional


class EcaError(Exception):
    """Base class of every domain error; exit_code is what the CLI returns."""

    exit_code = 2


class InvalidInput(EcaError, ValueError):
    pass


class OddRingSize(InvalidInput):
    pass


class NotAPartition(InvalidInput):
    pass


class ShiftOutOfRange(InvalidInput):
    pass


class PeriodOverflow(InvalidInput):
    pass


class InfeasibleConstraint(InvalidInput):
    pass


class SizeMismatch(InvalidInput):
    pass


class RingTooSmall(InvalidInput):
    pass


class UnsupportedRule(InvalidInput):
    pass


class DoesNotFit(InvalidInput):
    pass


class InsufficientData(InvalidInput):
    pass


class InsufficientSeries(InvalidInput):
    pass


class ParseError(InvalidInput):
    exit_code = 4

    def __init__(self, message: str, position: int, text: Optional[str] = None) -> None:
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


class BudgetExceeded(EcaError):
    exit_code = 3


class PackedWidthExceeded(BudgetExceeded):
    pass
