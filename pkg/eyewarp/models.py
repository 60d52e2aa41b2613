# eyewarp/models.py
"""
Pydantic v2 records shared across eyewarp.

These cross module boundaries (energy → solver → pipeline) and are what the
pipeline serializes to JSON lines.
"""

from __future__ import annotations

import math
from enum import Enum
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .model.params import ParameterVector


class RedirectMode(str, Enum):
    """Which parts of the redirection pipeline are enabled."""

    NONE = "none"
    EYEBALLS = "eyeballs"
    FULL = "full"


class EnergyBreakdown(BaseModel):
    """The four energy terms at one parameter vector; total is their sum."""

    model_config = ConfigDict(frozen=True)

    e_img: float = Field(..., ge=0.0)
    e_ldmks: float = Field(..., ge=0.0)
    e_stats: float = Field(..., ge=0.0)
    e_pose: float = Field(..., ge=0.0)
    foreground: int = Field(..., ge=0, description="Foreground pixel count |P|.")

    @property
    def total(self) -> float:
        return self.e_img + self.e_ldmks + self.e_stats + self.e_pose

    @property
    def data(self) -> float:
        return self.e_img + self.e_ldmks

    def summary(self) -> dict[str, float]:
        return {
            "e_img": self.e_img,
            "e_ldmks": self.e_ldmks,
            "e_stats": self.e_stats,
            "e_pose": self.e_pose,
            "total": self.total,
        }


class TraceEntry(BaseModel):
    """One accepted (or initial) Gauss-Newton iterate."""

    iteration: int = Field(..., ge=0)
    energy: EnergyBreakdown
    params: ParameterVector
    step_norm: float = Field(default=0.0, ge=0.0)
    eta: float = Field(default=0.0, ge=0.0)
    damping: float = Field(default=0.0, ge=0.0)
    rejected_steps: int = Field(default=0, ge=0)


class FitTrace(BaseModel):
    """Per-iteration history of one fit; entry 0 is the initial point."""

    entries: list[TraceEntry] = Field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def energies(self) -> list[float]:
        return [e.energy.total for e in self.entries]

    @property
    def iterations(self) -> int:
        """Accepted iterations (entries after the initial point)."""
        return max(len(self.entries) - 1, 0)

    def best(self) -> TraceEntry:
        return min(self.entries, key=lambda e: e.energy.total)

    def to_records(self, frame: int | None = None) -> list[dict[str, Any]]:
        """Flat per-iteration dicts for JSON-lines logs and plotting."""
        rows: list[dict[str, Any]] = []
        for e in self.entries:
            row: dict[str, Any] = {} if frame is None else {"frame": frame}
            row.update(
                iteration=e.iteration, eta=e.eta, damping=e.damping, step_norm=e.step_norm, rejected=e.rejected_steps
            )
            row.update(e.energy.summary())
            rows.append(row)
        return rows


class FrameRecord(BaseModel):
    """Per-frame output of a fit or redirect run."""

    frame: int = Field(..., ge=0)
    params: ParameterVector
    energy: EnergyBreakdown | None = None
    iterations: int = Field(default=0, ge=0)
    fit_ms: float = Field(default=0.0, ge=0.0)
    redirect_ms: float = Field(default=0.0, ge=0.0)
    skipped: bool = Field(default=False, description="No landmarks; params carried forward.")
    reflection_map: int | None = None


class RedirectRequest(BaseModel):
    """A new gaze for one frame: a camera-space 3D target or explicit angles."""

    model_config = ConfigDict(frozen=True)

    target: tuple[float, float, float] | None = Field(default=None, description="Gaze target (mm).")
    pitch: float | None = None
    yaw: float | None = None
    vergence: float | None = None

    @field_validator("target")
    @classmethod
    def _finite_target(cls, v: tuple[float, float, float] | None) -> tuple[float, float, float] | None:
        if v is not None and not all(math.isfinite(x) for x in v):
            raise ValueError("gaze target must be finite")
        return v

    @model_validator(mode="after")
    def _exactly_one(self) -> RedirectRequest:
        angles = (self.pitch, self.yaw, self.vergence)
        has_angles = all(a is not None for a in angles)
        if any(a is not None for a in angles) and not has_angles:
            raise ValueError("pitch, yaw and vergence must be given together")
        if (self.target is None) == (not has_angles):
            raise ValueError("exactly one of target or (pitch, yaw, vergence) is required")
        return self

    @classmethod
    def at(cls, x: float, y: float, z: float) -> RedirectRequest:
        return cls(target=(x, y, z))

    @classmethod
    def angles(cls, pitch: float, yaw: float, vergence: float = 0.0) -> RedirectRequest:
        return cls(pitch=pitch, yaw=yaw, vergence=vergence)
