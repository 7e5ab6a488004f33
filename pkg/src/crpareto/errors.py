class ConfigError(ValueError):
    """Invalid configuration or out-of-range parameters."""


class BudgetExceeded(RuntimeError):
    """An enumeration or time budget was exceeded."""
