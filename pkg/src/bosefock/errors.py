"""Exception types raised across the package."""


class CapacityError(ValueError):
    """A requested truncated basis or kernel input exceeds the configured size limit."""


class ConvergenceError(RuntimeError):
    """An iterative routine hit its iteration cap."""


class PositivityError(ValueError):
    """The thermal weights violate beta*(H - mu) > 0."""


class QuadratureError(ValueError):
    """A quadrature rule is too coarse for the requested matrix entries."""


class ParseError(ValueError):
    """Syntax or name error in an operator expression, with a 1-based position."""

    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column


class ConfigError(ValueError):
    """Invalid job configuration."""
