"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """A requested configuration is invalid (bad basis size, bad process parameters, ...)."""


class FeasibilityError(RuntimeError):
    """A requested computation is combinatorially infeasible (e.g. too many candidate sets)."""
