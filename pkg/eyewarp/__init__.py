# eyewarp/__init__.py
"""
eyewarp: fit a multi-part morphable eye-region model to images by
analysis-by-synthesis, then redirect the gaze by warping the eyelids with a
model-derived flow field and compositing re-rendered eyeballs.

Public API surface:
  EyeRegionModel     — morphable eye-region asset (load / save / sample)
  ParameterVector    — the 50 model parameters Φ
  Camera             — pinhole intrinsics plus image size
  pose_scene         — Φ → posed camera-space Scene
  render             — Scene → Raster (color, part mask, depth)
  Observation        — observed frame plus tracked landmarks
  Objective          — residual vector r(Φ) with ‖r‖² = E(Φ)
  initialize         — Φ_init from 3D landmarks (Kabsch)
  fit                — annealed Gauss-Newton minimization of E(Φ)
  RedirectRequest    — new gaze target or explicit angles
  redirect_frame     — warp eyelids and composite new eyeballs
  RunConfig          — top-level configuration for the CLI commands
  EyeWarpError       — base of every exception raised by eyewarp
"""

from .config import RunConfig
from .energy import Objective, Observation
from .exceptions import EyeWarpError, InputError, NumericalError
from .model import EyeRegionModel, ParameterVector, pose_scene
from .models import EnergyBreakdown, FitTrace, FrameRecord, RedirectMode, RedirectRequest
from .redirect import redirect_frame, repose
from .render import Camera, default_camera, render
from .solver import fit, initialize

__all__ = [
    "RunConfig",
    "Objective",
    "Observation",
    "EyeWarpError",
    "InputError",
    "NumericalError",
    "EyeRegionModel",
    "ParameterVector",
    "pose_scene",
    "EnergyBreakdown",
    "FitTrace",
    "FrameRecord",
    "RedirectMode",
    "RedirectRequest",
    "redirect_frame",
    "repose",
    "Camera",
    "default_camera",
    "render",
    "fit",
    "initialize",
]

__version__ = "0.1.0"
