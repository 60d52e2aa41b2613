# eyewarp/model/params.py
"""
The parameter vector Φ = {β, τ, θ, ι}.

Flat order (50 scalars)
-----------------------
  beta_face[16]  beta_iris
  tau_face[8]    tau_iris[3]   tau_tint[3]
  theta_R[3]     theta_T[3]    theta_iod
  theta_p        theta_y       theta_v      theta_lid
  iota_amb[3]    iota_dir[3]   iota_rot[2]

Illumination has 8 scalars (ambient RGB, directional RGB, light pitch/yaw),
so the vector has 50 entries rather than the 51 a 9-scalar illumination
count would give.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from ..constants import (
    DEFAULT_AMBIENT,
    DEFAULT_DIRECTIONAL,
    DEFAULT_DISTANCE_MM,
    DEFAULT_IOD_MM,
    DEFAULT_IRIS_COLOR,
    DEFAULT_SCLERA_TINT,
    EYELID_GUARD_RAD,
    GAZE_LIMIT_RAD,
    IOD_RANGE_MM,
    IRIS_SCALE_RANGE,
    N_SHAPE_MODES,
    N_TEXTURE_MODES,
)
from ..exceptions import InvalidParameters

PARAM_LAYOUT: tuple[tuple[str, int], ...] = (
    ("beta_face", N_SHAPE_MODES),
    ("beta_iris", 1),
    ("tau_face", N_TEXTURE_MODES),
    ("tau_iris", 3),
    ("tau_tint", 3),
    ("theta_R", 3),
    ("theta_T", 3),
    ("theta_iod", 1),
    ("theta_p", 1),
    ("theta_y", 1),
    ("theta_v", 1),
    ("theta_lid", 1),
    ("iota_amb", 3),
    ("iota_dir", 3),
    ("iota_rot", 2),
)


def _slices() -> dict[str, slice]:
    out: dict[str, slice] = {}
    start = 0
    for name, size in PARAM_LAYOUT:
        out[name] = slice(start, start + size)
        start += size
    return out


FIELD_SLICES: dict[str, slice] = _slices()
PARAM_COUNT: int = sum(size for _, size in PARAM_LAYOUT)

GAZE_FIELDS: tuple[str, ...] = ("theta_p", "theta_y", "theta_v", "theta_lid")
VIDEO_MASK: tuple[str, ...] = (
    "theta_R",
    "theta_T",
    "theta_iod",
    "theta_p",
    "theta_y",
    "theta_v",
    "theta_lid",
)
"""Fields optimised on frames after the first (identity and lighting frozen)."""


def flat_names() -> list[str]:
    """Human-readable name of every flat index, e.g. ``theta_T[2]``."""
    names: list[str] = []
    for name, size in PARAM_LAYOUT:
        names.extend([name] if size == 1 else [f"{name}[{i}]" for i in range(size)])
    return names


def mask_indices(fields: Iterable[str] | None) -> np.ndarray:
    """Flat indices covered by *fields* (None means every parameter), ascending."""
    if fields is None:
        return np.arange(PARAM_COUNT)
    idx: list[int] = []
    for name in fields:
        if name not in FIELD_SLICES:
            raise InvalidParameters(f"unknown parameter field '{name}'")
        s = FIELD_SLICES[name]
        idx.extend(range(s.start, s.stop))
    if not idx:
        raise InvalidParameters("parameter mask is empty")
    return np.array(sorted(set(idx)), dtype=np.intp)


def _bounds() -> tuple[np.ndarray, np.ndarray]:
    lo = np.full(PARAM_COUNT, -np.inf)
    hi = np.full(PARAM_COUNT, np.inf)
    eps = 1e-3
    lo[FIELD_SLICES["beta_iris"]] = IRIS_SCALE_RANGE[0] + eps
    hi[FIELD_SLICES["beta_iris"]] = IRIS_SCALE_RANGE[1] - eps
    for name in ("tau_iris", "tau_tint"):
        lo[FIELD_SLICES[name]] = 0.0
        hi[FIELD_SLICES[name]] = 1.0
    lo[FIELD_SLICES["theta_iod"]] = IOD_RANGE_MM[0]
    hi[FIELD_SLICES["theta_iod"]] = IOD_RANGE_MM[1]
    for name in ("theta_p", "theta_y", "theta_v"):
        lo[FIELD_SLICES[name]] = -GAZE_LIMIT_RAD
        hi[FIELD_SLICES[name]] = GAZE_LIMIT_RAD
    lo[FIELD_SLICES["theta_lid"]] = -EYELID_GUARD_RAD
    hi[FIELD_SLICES["theta_lid"]] = EYELID_GUARD_RAD
    for name in ("iota_amb", "iota_dir"):
        lo[FIELD_SLICES[name]] = 0.0
    for arr in (lo, hi):
        arr.setflags(write=False)
    return lo, hi


LOWER_BOUNDS, UPPER_BOUNDS = _bounds()


Vec = tuple[float, ...]


def _check_len(value: Vec, n: int, name: str) -> Vec:
    if len(value) != n:
        raise ValueError(f"{name} needs {n} values, got {len(value)}")
    if not all(math.isfinite(v) for v in value):
        raise ValueError(f"{name} must be finite")
    return value


class ParameterVector(BaseModel):
    """
    Immutable model parameters Φ.

    Angles are radians, lengths millimetres. Use ``to_array()`` /
    ``from_array()`` for the flat solver representation and ``replace()``
    for validated field updates.
    """

    model_config = ConfigDict(frozen=True)

    beta_face: Vec = Field(default=(0.0,) * N_SHAPE_MODES, description="Shape PCA coefficients (1.0 = one stddev).")
    beta_iris: float = Field(default=1.0, gt=0.0, description="Iris size scale.")
    tau_face: Vec = Field(default=(0.0,) * N_TEXTURE_MODES, description="Texture PCA coefficients.")
    tau_iris: Vec = Field(default=(DEFAULT_IRIS_COLOR,) * 3, description="Iris RGB multiplier in [0,1].")
    tau_tint: Vec = Field(default=(DEFAULT_SCLERA_TINT,) * 3, description="Sclera RGB tint in [0,1].")
    theta_R: Vec = Field(default=(0.0, 0.0, 0.0), description="Global rotation, extrinsic xyz Euler angles.")
    theta_T: Vec = Field(default=(0.0, 0.0, -DEFAULT_DISTANCE_MM), description="Global translation (mm).")
    theta_iod: float = Field(default=DEFAULT_IOD_MM, gt=0.0, description="Interocular distance (mm).")
    theta_p: float = Field(default=0.0, description="Gaze pitch, positive looks up.")
    theta_y: float = Field(default=0.0, description="Gaze yaw, positive looks towards +x.")
    theta_v: float = Field(default=0.0, description="Vergence: yaw_left - yaw_right.")
    theta_lid: float = Field(default=0.0, description="Eyelid pitch.")
    iota_amb: Vec = Field(default=(DEFAULT_AMBIENT,) * 3, description="Ambient RGB intensity.")
    iota_dir: Vec = Field(default=(DEFAULT_DIRECTIONAL,) * 3, description="Directional RGB intensity.")
    iota_rot: Vec = Field(default=(0.0, 0.0), description="Light direction pitch/yaw.")

    @field_validator("beta_face")
    @classmethod
    def _beta_face(cls, v: Vec) -> Vec:
        return _check_len(v, N_SHAPE_MODES, "beta_face")

    @field_validator("tau_face")
    @classmethod
    def _tau_face(cls, v: Vec) -> Vec:
        return _check_len(v, N_TEXTURE_MODES, "tau_face")

    @field_validator("tau_iris", "tau_tint")
    @classmethod
    def _unit_color(cls, v: Vec) -> Vec:
        _check_len(v, 3, "color")
        if any(c < 0.0 or c > 1.0 for c in v):
            raise ValueError(f"color multipliers must lie in [0,1], got {v}")
        return v

    @field_validator("theta_R", "theta_T")
    @classmethod
    def _three(cls, v: Vec) -> Vec:
        return _check_len(v, 3, "pose")

    @field_validator("iota_amb", "iota_dir")
    @classmethod
    def _intensity(cls, v: Vec) -> Vec:
        _check_len(v, 3, "intensity")
        if any(c < 0.0 for c in v):
            raise ValueError(f"light intensities must be >= 0, got {v}")
        return v

    @field_validator("iota_rot")
    @classmethod
    def _two(cls, v: Vec) -> Vec:
        return _check_len(v, 2, "iota_rot")

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    @classmethod
    def create(cls, **fields: Any) -> ParameterVector:
        """Validated construction that raises InvalidParameters instead of ValidationError."""
        try:
            return cls.model_validate(fields)
        except ValidationError as exc:
            raise InvalidParameters(str(exc)) from exc

    @classmethod
    def from_array(cls, values: Sequence[float] | np.ndarray) -> ParameterVector:
        arr = np.asarray(values, dtype=np.float64)
        if arr.shape != (PARAM_COUNT,):
            raise InvalidParameters(f"expected {PARAM_COUNT} parameters, got shape {arr.shape}")
        data: dict[str, Any] = {}
        for name, size in PARAM_LAYOUT:
            chunk = arr[FIELD_SLICES[name]]
            data[name] = float(chunk[0]) if size == 1 else tuple(float(x) for x in chunk)
        return cls.create(**data)

    def to_array(self) -> np.ndarray:
        out = np.empty(PARAM_COUNT, dtype=np.float64)
        for name, _ in PARAM_LAYOUT:
            out[FIELD_SLICES[name]] = getattr(self, name)
        return out

    def replace(self, **updates: Any) -> ParameterVector:
        """Copy with *updates* applied and re-validated."""
        return self.create(**{**self.model_dump(), **updates})

    # ------------------------------------------------------------------
    # Convenience views
    # ------------------------------------------------------------------

    @property
    def eye_yaws(self) -> tuple[float, float]:
        """(left, right) eyeball yaw under the symmetric vergence split."""
        return self.theta_y + 0.5 * self.theta_v, self.theta_y - 0.5 * self.theta_v

    def differing_fields(self, other: ParameterVector) -> list[str]:
        return [name for name, _ in PARAM_LAYOUT if getattr(self, name) != getattr(other, name)]

