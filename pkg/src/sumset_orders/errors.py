class SumsetError(Exception):
    """Base class for errors raised by this package."""


class DomainError(SumsetError, ValueError):
    """An input lies outside the domain of an operation."""


class BudgetExceeded(SumsetError):
    """A computation would exceed its memory or enumeration budget.

    ``predicted`` is the estimated cost (bits or enumerated elements), or a
    symbolic string such as ``"4^1000001"`` when the number itself is too
    large to write down; ``budget`` is the limit it was checked against.
    """

    def __init__(self, what, predicted, budget):
        self.what = what
        self.predicted = predicted if isinstance(predicted, str) else int(predicted)
        self.budget = int(budget)
        super().__init__(f"{what}: predicted cost {self.predicted} exceeds budget {self.budget}")
