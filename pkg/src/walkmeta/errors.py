"""Shared exception types."""


class WalkmetaError(Exception):
    """Base class for all library errors."""


class ParameterError(WalkmetaError, ValueError):
    """An argument violates a documented precondition."""


class GenerationError(WalkmetaError, RuntimeError):
    """Random construction exhausted its retry budget."""


class NumericalError(WalkmetaError, RuntimeError):
    """A computation produced non-finite values or failed to converge."""


class DiagnosticError(WalkmetaError, RuntimeError):
    """The input is structurally unsuitable (e.g. a periodic chain)."""


class ConfigError(WalkmetaError, ValueError):
    """Configuration file could not be parsed or validated."""
