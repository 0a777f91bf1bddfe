"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument is outside its documented domain."""


class BudgetExceededError(RuntimeError):
    """An exact computation would exceed its evaluation budget."""


class InfeasibleError(RuntimeError):
    """A threshold or experiment target cannot be met by any configuration."""


class DataError(ValueError):
    """Input data violates a structural requirement (e.g. nonpositive values)."""


class ConfigError(ValueError):
    """Bad experiment configuration (unknown fields, inconsistent values)."""
