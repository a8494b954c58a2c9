class NoNeighbors(ValueError):
    """Raised when a computation needs at least one neighbor and has none."""


class DegenerateInput(ValueError):
    pass


class ConfigError(ValueError):
    pass
