"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Raised when a scenario config fails to parse or validate."""


class InfeasibleScenarioError(RuntimeError):
    """Raised when a requested design or allocation cannot be satisfied."""


class InfeasibleTargetsError(InfeasibleScenarioError):
    """Beam gain targets exceed what the array can deliver."""


class SearchSpaceError(ValueError):
    """Exhaustive search request exceeds the supported enumeration bound."""


class DegenerateChannelError(InfeasibleScenarioError):
    """Effective channel matrix is rank deficient where an inverse is needed."""
