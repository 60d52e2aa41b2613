# eyewarp/render/camera.py
"""
Pinhole camera looking down −Z.

Image origin is the top-left corner with y down; pixel (col, row) is
sampled at its center (col + 0.5, row + 0.5).
"""

from __future__ import annotations

import logging

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..constants import FOCAL_PER_WIDTH, NEAR_PLANE_MM
from ..exceptions import BehindCameraError

logger = logging.getLogger(__name__)


class Camera(BaseModel):
    """Intrinsics in pixels plus the image size."""

    model_config = ConfigDict(frozen=True)

    fx: float = Field(..., gt=0.0, description="Focal length along x (px).")
    fy: float = Field(..., gt=0.0, description="Focal length along y (px).")
    cx: float = Field(..., description="Principal point x (px).")
    cy: float = Field(..., description="Principal point y (px).")
    width: int = Field(..., ge=0, description="Image width (px).")
    height: int = Field(..., ge=0, description="Image height (px).")

    @model_validator(mode="after")
    def _warn_principal_point(self) -> Camera:
        if not (0.0 <= self.cx <= self.width and 0.0 <= self.cy <= self.height):
            logger.warning(
                "principal point (%.1f, %.1f) lies outside the %dx%d image",
                self.cx,
                self.cy,
                self.width,
                self.height,
            )
        return self

    @property
    def shape(self) -> tuple[int, int]:
        return self.height, self.width

    def project(self, points: np.ndarray) -> np.ndarray:
        """Project camera-space points (..., 3) to pixel coordinates (..., 2)."""
        return project(points, self)

    def pixel_rays(self) -> np.ndarray:
        """Unit view directions through every pixel center, shape (H, W, 3)."""
        cols = (np.arange(self.width) + 0.5 - self.cx) / self.fx
        rows = (np.arange(self.height) + 0.5 - self.cy) / self.fy
        gx, gy = np.meshgrid(cols, rows)
        rays = np.stack([gx, gy, -np.ones_like(gx)], axis=-1)
        return rays / np.linalg.norm(rays, axis=-1, keepdims=True)

    def scaled(self, factor: float) -> Camera:
        """Same field of view at *factor* times the resolution."""
        return Camera(
            fx=self.fx * factor,
            fy=self.fy * factor,
            cx=self.cx * factor,
            cy=self.cy * factor,
            width=round(self.width * factor),
            height=round(self.height * factor),
        )


def default_camera(width: int, height: int) -> Camera:
    """Camera framing the default eye region at the default distance."""
    f = FOCAL_PER_WIDTH * width
    return Camera(fx=f, fy=f, cx=width / 2.0, cy=height / 2.0, width=width, height=height)


def project(points: np.ndarray, camera: Camera) -> np.ndarray:
    """
    Pinhole projection u = cx + fx·x/(−z), v = cy + fy·y/(−z).

    Raises BehindCameraError if any point has z >= −NEAR_PLANE_MM.
    """
    pts = np.asarray(points, dtype=np.float64)
    depth = -pts[..., 2]
    if np.any(depth <= NEAR_PLANE_MM):
        raise BehindCameraError(
            f"{int(np.count_nonzero(depth <= NEAR_PLANE_MM))} point(s) at or behind the camera plane"
        )
    u = camera.cx + camera.fx * pts[..., 0] / depth
    v = camera.cy + camera.fy * pts[..., 1] / depth
    return np.stack([u, v], axis=-1)
