"""Exception hierarchy shared by all repulsive_strichartz modules."""

from typing import Optional


class ToolkitError(Exception):
    """Base class for every error raised deliberately by this package."""


class ArgumentError(ToolkitError, ValueError):
    """An operation was called outside its contract."""


class UnsupportedDimensionError(ArgumentError):
    pass


class ConfigError(ToolkitError, ValueError):
    """Invalid run configuration (unknown key, bad type, syntax error)."""

    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None):
        super().__init__(message)
        self.key = key
        self.line = line


class RefinementRequiredError(ToolkitError, RuntimeError):
    """The Mehler chirp is not resolved by the grid."""

    def __init__(self, message: str, min_points: int):
        super().__init__(message)
        self.min_points = min_points


class StepSizeError(ToolkitError, RuntimeError):
    """The split-step potential phase is not resolved by the time step."""

    def __init__(self, message: str, max_dt: float):
        super().__init__(message)
        self.max_dt = max_dt


class DomainTooSmallError(ToolkitError, RuntimeError):
    """Too much mass reached the periodic boundary shell."""

    def __init__(self, message: str, time: float, boundary_mass: float):
        super().__init__(message)
        self.time = time
        self.boundary_mass = boundary_mass


class ResolutionError(ToolkitError, RuntimeError):
    """The absorption parameter is below the discrete level-spacing floor."""

    def __init__(self, message: str, certificate: float):
        super().__init__(message)
        self.certificate = certificate


class ConditioningError(ToolkitError, RuntimeError):
    def __init__(self, message: str, condition: float):
        super().__init__(message)
        self.condition = condition


class NumericError(ToolkitError, ArithmeticError):
    """A linear solve or iteration produced non-finite numbers."""


class ClassificationError(ToolkitError, RuntimeError):
    """Two exponent-pair classifiers disagree where they must not."""
