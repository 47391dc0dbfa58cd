"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid parameters or incompatible sizes."""


class RegimeError(RuntimeError):
    """The algorithm is too long for the adversary schedule to say anything."""


class InequalityViolation(AssertionError):
    """A numerically checked inequality failed beyond tolerance."""
