"""Exception types shared across the package."""


class DomainError(ValueError):
    """An objective function was evaluated outside its box bounds."""


class ConfigError(ValueError):
    """A configuration value is invalid or inconsistent."""


class EvaluationError(RuntimeError):
    """An objective evaluation produced a non-finite value."""

    def __init__(self, message: str, agent: int | None = None):
        super().__init__(message)
        self.agent = agent
