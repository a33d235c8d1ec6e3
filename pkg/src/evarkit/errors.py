"""Exception types shared across modules."""


class SolverError(RuntimeError):
    """A one-dimensional search failed to converge."""

    def __init__(self, message: str, **diagnostics: float) -> None:
        detail = ", ".join(f"{k}={v!r}" for k, v in diagnostics.items())
        super().__init__(f"{message} ({detail})" if detail else message)
        self.diagnostics = diagnostics


class InconsistencyError(RuntimeError):
    """Two routes to the same quantity disagree beyond tolerance."""
