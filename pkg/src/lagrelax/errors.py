"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Array shapes or sizes are inconsistent with the declared problem."""


class DomainError(ValueError):
    """A numeric argument lies outside its admissible range."""


class UnsupportedProblemError(ValueError):
    """The instance falls outside what this implementation handles
    (continuous variables, or more binaries than the enumeration limit)."""


class InfeasibleProblemError(ValueError):
    """No feasible point exists for the requested enumeration."""


class DegenerateFamilyError(ValueError):
    """The distribution family has no unique optimum (epsilon = 0)."""


class ConfigError(ValueError):
    """An experiment or solver configuration is invalid."""
