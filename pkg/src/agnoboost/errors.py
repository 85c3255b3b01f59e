"""Exception types raised across the package."""


class AgnoboostError(Exception):
    """Base class for all package errors."""


class RepresentationError(AgnoboostError, TypeError):
    """A point's representation does not match the hypothesis backend."""


class EmptyDatasetError(AgnoboostError, ValueError):
    pass


class IndexOutOfRangeError(AgnoboostError, IndexError):
    pass


class ParameterError(AgnoboostError, ValueError):
    """An argument falls outside its documented range."""


class BudgetExceededError(AgnoboostError, RuntimeError):
    """Raised when a pool or combination search would exceed its cap.

    ``count`` is the exact number of operations the request would need.
    """

    def __init__(self, what, count, cap):
        self.what = what
        self.count = count
        self.cap = cap
        super().__init__(f"{what}: {count} exceeds budget cap {cap}")


class EdgeViolationError(AgnoboostError, RuntimeError):
    """A boosting round received a hypothesis without the required edge."""

    def __init__(self, round_index, error, limit):
        self.round_index = round_index
        self.error = error
        self.limit = limit
        super().__init__(
            f"round {round_index}: weighted error {error!r} exceeds 1/2 - theta = {limit!r}"
        )


class MarginGuaranteeError(AgnoboostError, AssertionError):
    """The margin guarantee failed after enough rounds; indicates a bug."""


class CapExceededError(AgnoboostError, ValueError):
    """An exhaustive enumeration would exceed its hard size cap."""


class PruningFailedError(AgnoboostError, RuntimeError):
    def __init__(self, attempts):
        self.attempts = attempts
        super().__init__(f"no pruned voter with positive margins after {attempts} attempts")
