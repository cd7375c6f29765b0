"""Exception hierarchy shared across the pipeline.

The CLI maps these onto exit codes: config/usage problems exit 1,
data problems exit 2, numeric problems exit 3.
"""


class AdvflowError(Exception):
    """Base class for all pipeline errors."""


class ConfigError(AdvflowError, ValueError):
    """Invalid configuration value (bad fraction, epsilon, k, ...)."""


class ShapeError(AdvflowError, ValueError):
    """Incompatible array dimensions."""


class SchemaError(AdvflowError, ValueError):
    """CSV does not match the declared schema."""


class LabelError(AdvflowError, ValueError):
    """Unrecognized class name in the label column."""


class EmptyDataError(AdvflowError, ValueError):
    """No usable rows."""


class NumericError(AdvflowError, ArithmeticError):
    """Non-finite values where finite ones are required."""
