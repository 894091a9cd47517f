"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside an operation's domain (e.g. t >= T, state off-grid)."""


class ModelError(ValueError):
    """Model parameters violate a structural requirement (positivity, ordering, box)."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature could not reach the requested tolerance."""

    def __init__(self, message, *, interval=None, achieved=None, requested=None):
        super().__init__(message)
        self.interval = interval
        self.achieved = achieved
        self.requested = requested


class ConfigError(ValueError):
    """Experiment configuration failed schema validation; `field` names the offender."""

    def __init__(self, message, *, field=None):
        super().__init__(message)
        self.field = field
