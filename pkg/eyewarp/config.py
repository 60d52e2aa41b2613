# eyewarp/config.py
"""
RunConfig and related sub-configs.

Supports construction from:
  - Python dict   → RunConfig.from_dict(data)
  - YAML file     → RunConfig.from_yaml("run.yaml")
  - Environment   → RunConfig.from_env()

Process-level knobs (thread count, log level) come from RuntimeSettings,
read from EYEWARP_* environment variables.
"""

from __future__ import annotations

import os
import re
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, Field, ValidationError, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from .constants import (
    AO_BAND,
    AO_MIN,
    CONVERGENCE_THRESHOLD,
    CORNEAL_REFRACTIVE_INDEX,
    DAMPING_FACTOR,
    DAMPING_GROWTH,
    ETA_DECAY,
    ETA_INITIAL,
    FOCAL_PER_WIDTH,
    IMAGE_WEIGHT,
    LAMBDA_GEO,
    LAMBDA_LDMKS,
    LAMBDA_POSE,
    LAMBDA_TEX,
    MAX_ITERATIONS,
    MAX_STEP_RETRIES,
    ROBUST_T,
    SEAM_BAND_PX,
    SEAM_SIGMA_PX,
    SPECULAR_WEIGHT,
    STEP_ANGLE_RAD,
    STEP_COLOR,
    STEP_MM,
    STEP_PCA,
)
from .exceptions import ConfigError, InvalidParameters
from .model.params import FIELD_SLICES, PARAM_COUNT, PARAM_LAYOUT, VIDEO_MASK, mask_indices
from .models import RedirectMode
from .render.camera import Camera


class EnergyWeights(BaseModel):
    """Term weights and the robust clamp T."""

    robust_t: float = Field(default=ROBUST_T, gt=0.0, description="Squared clamp of the per-pixel error.")
    image: float = Field(default=IMAGE_WEIGHT, ge=0.0, description="Photometric term weight.")
    ldmks: float = Field(default=LAMBDA_LDMKS, ge=0.0)
    geo: float = Field(default=LAMBDA_GEO, ge=0.0)
    tex: float = Field(default=LAMBDA_TEX, ge=0.0)
    pose: float = Field(default=LAMBDA_POSE, ge=0.0)


_STEP_GROUPS: dict[str, str] = {
    "beta_face": "pca",
    "tau_face": "pca",
    "beta_iris": "pca",
    "tau_iris": "color",
    "tau_tint": "color",
    "theta_R": "angle",
    "theta_T": "mm",
    "theta_iod": "mm",
    "theta_p": "angle",
    "theta_y": "angle",
    "theta_v": "angle",
    "theta_lid": "angle",
    "iota_amb": "color",
    "iota_dir": "color",
    "iota_rot": "angle",
}


class StepSizes(BaseModel):
    """Central-difference step per parameter group."""

    pca: float = Field(default=STEP_PCA, gt=0.0)
    angle: float = Field(default=STEP_ANGLE_RAD, gt=0.0, description="Radians.")
    mm: float = Field(default=STEP_MM, gt=0.0)
    color: float = Field(default=STEP_COLOR, gt=0.0)

    def as_array(self) -> np.ndarray:
        """Step for every flat parameter index (length PARAM_COUNT)."""
        steps = np.empty(PARAM_COUNT)
        for name, _ in PARAM_LAYOUT:
            steps[FIELD_SLICES[name]] = getattr(self, _STEP_GROUPS[name])
        return steps


class FitConfig(BaseModel):
    """Annealed Gauss-Newton settings."""

    max_iterations: int = Field(default=MAX_ITERATIONS, ge=1, le=100)
    eta_initial: float = Field(default=ETA_INITIAL, gt=0.0, le=1.0)
    eta_decay: float = Field(default=ETA_DECAY, gt=0.0, le=1.0)
    damping: float = Field(default=DAMPING_FACTOR, ge=0.0, description="Initial damping; columns of J are scaled to unit norm.")
    damping_growth: float = Field(default=DAMPING_GROWTH, gt=1.0, description="Damping multiplier per rejected step.")
    convergence_threshold: float = Field(default=CONVERGENCE_THRESHOLD, ge=0.0)
    max_step_retries: int = Field(default=MAX_STEP_RETRIES, ge=0)
    steps: StepSizes = Field(default_factory=StepSizes)
    mask: list[str] | None = Field(default=None, description="Parameter fields to optimize; None = all.")
    video_mask: list[str] = Field(default_factory=lambda: list(VIDEO_MASK))

    @field_validator("mask", "video_mask")
    @classmethod
    def _known_fields(cls, v: list[str] | None) -> list[str] | None:
        if v is not None:
            try:
                mask_indices(v)
            except InvalidParameters as exc:
                raise ValueError(str(exc)) from exc
        return v


class CameraConfig(BaseModel):
    """Intrinsics; missing focal/principal point default from the frame size."""

    fx: float | None = Field(default=None, gt=0.0)
    fy: float | None = Field(default=None, gt=0.0)
    cx: float | None = None
    cy: float | None = None

    def for_size(self, width: int, height: int) -> Camera:
        fx = self.fx if self.fx is not None else FOCAL_PER_WIDTH * width
        return Camera(
            fx=fx,
            fy=self.fy if self.fy is not None else fx,
            cx=self.cx if self.cx is not None else 0.5 * width,
            cy=self.cy if self.cy is not None else 0.5 * height,
            width=width,
            height=height,
        )


class RenderOptions(BaseModel):
    """Rendering switches."""

    subdivide: bool = Field(default=True, description="One Loop step on face parts before shading.")
    refraction: bool = Field(default=True)
    ambient_occlusion: bool = Field(default=True)
    refractive_index: float = Field(default=CORNEAL_REFRACTIVE_INDEX, ge=1.0)
    ao_min: float = Field(default=AO_MIN, ge=0.0, le=1.0)
    ao_band: float = Field(default=AO_BAND, gt=0.0)
    specular_weight: float = Field(default=SPECULAR_WEIGHT, ge=0.0)


class RedirectOptions(BaseModel):
    """Compositing settings."""

    mode: RedirectMode = Field(default=RedirectMode.FULL)
    seam_sigma: float = Field(default=SEAM_SIGMA_PX, gt=0.0, description="Alpha blur sigma (px).")
    seam_band: float = Field(default=SEAM_BAND_PX, ge=0.0, description="Half-width of the blur band (px).")
    select_reflection_map: bool = Field(default=True)


class DebugOptions(BaseModel):
    """Optional debug dumps written next to the outputs."""

    dump_flow: bool = False
    dump_depth: bool = False
    dump_render: bool = False


class SynthOptions(BaseModel):
    """Frame size and base parameters for `eyewarp synth`."""

    width: int = Field(default=256, gt=0)
    height: int = Field(default=192, gt=0)
    params: dict[str, Any] = Field(default_factory=dict, description="ParameterVector field overrides.")
    reflection_map: int | None = Field(
        default=None, ge=0, le=4, description="Specular map id; None renders without reflections."
    )


class RunConfig(BaseModel):
    """
    Top-level configuration for a fit/redirect/synth run.

    Instantiate directly or use one of the factory class methods:
      RunConfig.from_dict(data)
      RunConfig.from_yaml(path)
      RunConfig.from_env()
    """

    assets: Path = Field(..., description="Model asset directory.")
    frames: str | None = Field(default=None, description="Input frame glob, e.g. 'frames/*.png'.")
    landmarks: Path | None = None
    targets: Path | None = Field(default=None, description="Gaze-target script.")
    output: Path = Field(default=Path("out"))
    params: Path | None = Field(default=None, description="Per-frame Φ* file; defaults to output/phi.jsonl.")
    camera: CameraConfig = Field(default_factory=CameraConfig)
    weights: EnergyWeights = Field(default_factory=EnergyWeights)
    fit: FitConfig = Field(default_factory=FitConfig)
    render: RenderOptions = Field(default_factory=RenderOptions)
    redirect: RedirectOptions = Field(default_factory=RedirectOptions)
    debug: DebugOptions = Field(default_factory=DebugOptions)
    synth: SynthOptions = Field(default_factory=SynthOptions)

    @property
    def params_path(self) -> Path:
        return self.params if self.params is not None else self.output / "phi.jsonl"

    def check_paths(self, *names: str) -> None:
        """Raise ConfigError unless every named path field exists."""
        for name in names:
            value = getattr(self, name)
            if value is None:
                raise ConfigError(f"config field '{name}' is required for this command")
            if isinstance(value, Path) and not value.exists():
                raise ConfigError(f"config field '{name}' points to a missing path: {value}")

    # ------------------------------------------------------------------
    # Factory methods
    # ------------------------------------------------------------------

    @classmethod
    def from_dict(cls, data: dict[str, Any], *, base_dir: Path | None = None, **kwargs: Any) -> RunConfig:
        """Build config from a plain dictionary; relative paths resolve against *base_dir*."""
        merged = {**data, **kwargs}
        if base_dir is not None:
            for key in ("assets", "landmarks", "targets", "output", "params"):
                if merged.get(key) is not None:
                    merged[key] = str(base_dir / Path(merged[key]).expanduser())
            if merged.get("frames") and not os.path.isabs(merged["frames"]):
                merged["frames"] = str(base_dir / merged["frames"])
        try:
            return cls.model_validate(merged)
        except ValidationError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_yaml(cls, path: str | Path, **kwargs: Any) -> RunConfig:
        """
        Build config from a YAML file.

        Environment variable interpolation is supported:
          assets: "${EYEWARP_ASSETS}"
        """
        try:
            import yaml
        except ImportError as exc:
            raise ImportError(
                "PyYAML is required for from_yaml(). Install it with: pip install pyyaml"
            ) from exc

        path = Path(path)
        try:
            raw = path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc

        def _replace(match: re.Match[str]) -> str:
            var = match.group(1)
            value = os.environ.get(var)
            if value is None:
                raise ConfigError(f"Environment variable '{var}' referenced in '{path}' is not set.")
            return value

        raw = re.sub(r"\$\{([^}]+)\}", _replace, raw)
        try:
            data = yaml.safe_load(raw) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"invalid YAML in {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"{path} must contain a mapping at the top level")
        return cls.from_dict(data, base_dir=path.resolve().parent, **kwargs)

    @classmethod
    def from_env(cls, **kwargs: Any) -> RunConfig:
        """
        Build a minimal config from environment variables.

          EYEWARP_ASSETS    → assets
          EYEWARP_FRAMES    → frames
          EYEWARP_LANDMARKS → landmarks
          EYEWARP_OUTPUT    → output
        """
        data: dict[str, Any] = {}
        for var, key in (
            ("EYEWARP_ASSETS", "assets"),
            ("EYEWARP_FRAMES", "frames"),
            ("EYEWARP_LANDMARKS", "landmarks"),
            ("EYEWARP_OUTPUT", "output"),
        ):
            value = os.environ.get(var)
            if value:
                data[key] = value
        data.update(kwargs)
        return cls.from_dict(data)


class RuntimeSettings(BaseSettings):
    """Process-level overrides read from EYEWARP_* environment variables."""

    model_config = SettingsConfigDict(env_prefix="EYEWARP_", extra="ignore")

    threads: int = Field(default_factory=lambda: os.cpu_count() or 1, ge=1)
    log_level: str = Field(default="INFO")

    @field_validator("log_level")
    @classmethod
    def _level(cls, v: str) -> str:
        v = v.upper()
        if v not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"unknown log level '{v}'")
        return v
