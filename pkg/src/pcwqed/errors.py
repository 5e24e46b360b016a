"""Exception and warning types shared across the package."""


class ConfigError(Exception):
    """Invalid or incomplete experiment configuration (CLI exit code 1)."""


class NumericalError(Exception):
    """A numerical routine failed or left its validity domain (CLI exit code 2)."""


class BoundStateError(NumericalError):
    """No in-gap bound state: the coupling pushed the root into a band."""


class PoleProximityError(NumericalError):
    """Requested resolvent energy sits on (or too close to) a sampled band energy."""


class IntegratorError(NumericalError):
    """Time integration lost unitarity beyond tolerance."""


class ConvergenceWarning(UserWarning):
    """Truncation or fit quality below the requested tolerance."""


class CoverageWarning(UserWarning):
    """A sampling grid does not cover the physically relevant range."""


class RegimeWarning(UserWarning):
    """Parameters leave the regime in which an approximation is controlled."""
