"""Exception types shared across the toolkit."""


class GprLabError(Exception):
    """Base class for all gprlab errors."""


class NonFiniteDataError(GprLabError):
    """Input contains NaN or infinite values."""


class DegenerateInputError(GprLabError):
    """Input too small or otherwise degenerate for the requested operation."""


class ShapeMismatchError(GprLabError):
    """Array shape does not match what was declared or required."""


class UnknownVersionError(GprLabError):
    """Dataset manifest has an unsupported version number."""


class MissingSampleError(GprLabError):
    """Dataset manifest references a sample file that does not exist."""


class TargetInvisibleError(GprLabError):
    """Buried target never produces a return inside the time window."""


class CourantViolationError(GprLabError):
    """Requested FDTD time step violates the 2-D Courant stability bound."""


class GprMaxParseError(GprLabError):
    """Malformed gprMax config text."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class InfeasibleSceneError(GprLabError):
    """Scene randomization ranges cannot produce a valid scene."""


class NumericalAbortError(GprLabError):
    """Training hit a non-finite loss; carries the last good checkpoint."""

    def __init__(self, message: str, checkpoint=None):
        super().__init__(message)
        self.checkpoint = checkpoint


class LeakageError(GprLabError):
    """Evaluation data overlaps with training data."""


class ConfigError(GprLabError):
    """Run configuration is malformed or fails schema validation."""
