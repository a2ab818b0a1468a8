"""Exception hierarchy shared across the package.

ConfigurationError and its subclasses cover everything a user can get wrong
before a run starts (CLI exit code 1); DivergenceError and SignalEvalError
cover runtime blow-ups (CLI exit code 2).
"""


class ParamestError(Exception):
    """Base class for all package errors."""


class ConfigurationError(ParamestError):
    """Invalid configuration: bad dimensions, gains, variants, or files."""


class ScenarioNotFoundError(ConfigurationError):
    """Requested builtin scenario name does not exist."""


class SignalParseError(ConfigurationError):
    """Signal expression string could not be parsed."""


class UnsupportedDimensionError(ConfigurationError):
    """Operation only defined for a restricted regressor dimension."""


class SignalEvalError(ParamestError):
    """Signal evaluation produced a non-finite value or divided by ~0."""


class DivergenceError(ParamestError):
    """Integration produced non-finite or unbounded state."""
