"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid configuration or command usage."""


class GenerationError(ValueError):
    """A candidate generating set cannot be confirmed to generate the group."""


class BudgetExceededError(RuntimeError):
    """A search exceeded its memory budget.

    ``completed_radius`` is the largest radius whose layer finished before
    the budget ran out; ``partial`` optionally carries the work done so far.
    """

    def __init__(self, message: str, completed_radius: int, partial=None):
        super().__init__(message)
        self.completed_radius = completed_radius
        self.partial = partial
