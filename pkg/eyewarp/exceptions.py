# eyewarp/exceptions.py
"""
Custom exceptions for eyewarp.

All public exceptions inherit from EyeWarpError so callers can catch
the whole family with a single except clause if preferred. Each family
carries the process exit code the CLI maps it to.
"""

from __future__ import annotations


class EyeWarpError(Exception):
    """Base exception for all eyewarp errors."""

    exit_code: int = 2


# ---------------------------------------------------------------------------
# Input errors (exit code 1)
# ---------------------------------------------------------------------------


class InputError(EyeWarpError):
    """Raised when user-supplied files or values cannot be used."""

    exit_code = 1


class ConfigError(InputError):
    """Raised when a run configuration is invalid or references missing paths."""


class AssetFormatError(InputError):
    """
    Raised when a model asset directory is malformed.

    Attributes
    ----------
    path:
        The asset directory or file that failed validation.
    """

    def __init__(self, message: str, path: str | None = None) -> None:
        self.path = path
        super().__init__(f"{message} ({path})" if path else message)


class LandmarkFileError(InputError):
    """
    Raised when a landmark or gaze-target file line cannot be parsed.

    Attributes
    ----------
    line_number:
        1-based line number of the offending record, if known.
    """

    def __init__(self, message: str, line_number: int | None = None) -> None:
        self.line_number = line_number
        prefix = f"line {line_number}: " if line_number is not None else ""
        super().__init__(prefix + message)


class FrameSequenceError(InputError):
    """Raised when the input frame pattern matches nothing or a frame is unreadable."""


# ---------------------------------------------------------------------------
# Model errors (exit code 1: they always come from bad parameters)
# ---------------------------------------------------------------------------


class ModelError(EyeWarpError):
    """Raised by the morphable model for parameters it cannot represent."""

    exit_code = 1


class InvalidParameters(ModelError):
    """Raised when a parameter vector violates its documented constraints."""


class GuardRangeError(ModelError):
    """
    Raised when a value leaves the range an operation is defined on.

    Attributes
    ----------
    name:
        Name of the guarded quantity.
    value:
        The rejected value.
    """

    def __init__(self, name: str, value: float, low: float, high: float) -> None:
        self.name = name
        self.value = value
        super().__init__(f"{name}={value:.6g} outside guard range [{low:.6g}, {high:.6g}]")


class GazeTargetError(ModelError):
    """Raised when a gaze target lies inside (or on) an eyeball."""


# ---------------------------------------------------------------------------
# Rendering errors
# ---------------------------------------------------------------------------


class RenderError(EyeWarpError):
    """Base class for rasterizer failures."""


class BehindCameraError(RenderError):
    """Raised when a point that must be projected is at or behind the camera plane."""


class EmptyImageError(RenderError):
    """Raised when a camera describes a zero-area image."""


class NonManifoldMeshError(RenderError):
    """Raised when Loop subdivision stencils are requested for a non-manifold mesh."""


class MissingAttributeError(RenderError):
    """Raised when render_attributes() finds a face part without the requested attribute."""


class InvalidReflectionMap(RenderError):
    """Raised for a reflection map id outside 0..4."""


# ---------------------------------------------------------------------------
# Numerical errors (exit code 2)
# ---------------------------------------------------------------------------


class NumericalError(EyeWarpError):
    """Base class for optimisation failures."""

    exit_code = 2


class EmptyForegroundError(NumericalError):
    """Raised when the model renders no foreground pixels (it is off-screen)."""


class JacobianError(NumericalError):
    """
    Raised when a residual evaluation fails at a perturbed parameter.

    Attributes
    ----------
    parameter:
        Flat parameter name, e.g. ``theta_T[2]``.
    """

    def __init__(self, parameter: str, cause: Exception) -> None:
        self.parameter = parameter
        self.cause = cause
        super().__init__(f"residual evaluation failed while perturbing {parameter}: {cause}")


class SingularSystemError(NumericalError):
    """Raised when the damped normal equations cannot be solved."""
