class HypothesisError(ValueError):
    """A positivity hypothesis of a verification routine fails.

    ``where`` names the offending object, e.g. ``(level, index, k)`` for a
    tower factor, using 1-based indices.
    """

    def __init__(self, message: str, where: tuple | None = None, margin: float | None = None):
        super().__init__(message)
        self.where = where
        self.margin = margin


class StageSolveError(RuntimeError):
    """A Lefschetz decomposition stage met a (numerically) singular system."""

    def __init__(self, stage: int, condition: float):
        super().__init__(f"Hard Lefschetz solve failed at stage s={stage} (condition {condition:.3g})")
        self.stage = stage
        self.condition = condition


class NoWitnessError(ValueError):
    pass


class GenerationError(RuntimeError):
    pass


class UnsatisfiableSpec(GenerationError):
    """The requested instance parameters contradict a hypothesis; retrying cannot help."""
