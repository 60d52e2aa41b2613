# eyewarp/energy/terms.py
"""
The four energy terms and the observation they compare against.

All terms are non-negative. The image and landmark terms are normalized by
the foreground pixel count |P| of the render being compared.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from ..constants import LAMBDA_GEO, LAMBDA_LDMKS, LAMBDA_POSE, LAMBDA_TEX, N_LANDMARKS, ROBUST_T
from ..exceptions import EmptyForegroundError, InputError
from ..model.assets import EyeRegionModel
from ..model.params import ParameterVector
from ..model.scene import face_vertices
from ..render.camera import Camera, project
from ..render.raster import Raster


@dataclass(frozen=True, eq=False)
class Observation:
    """An observed frame: RGB image in [0, 1] and 25 tracked landmarks (px)."""

    image: np.ndarray
    landmarks: np.ndarray
    landmarks_3d: np.ndarray | None = None

    def __post_init__(self) -> None:
        image = np.asarray(self.image, dtype=np.float64)
        if image.ndim != 3 or image.shape[2] != 3:
            raise InputError(f"observed image must be (H, W, 3), got {image.shape}")
        lm = np.asarray(self.landmarks, dtype=np.float64)
        if lm.shape != (N_LANDMARKS, 2) or not np.all(np.isfinite(lm)):
            raise InputError(f"expected {N_LANDMARKS} finite 2D landmarks, got shape {lm.shape}")
        object.__setattr__(self, "image", image)
        object.__setattr__(self, "landmarks", lm)
        if self.landmarks_3d is not None:
            lm3 = np.asarray(self.landmarks_3d, dtype=np.float64)
            if lm3.shape != (N_LANDMARKS, 3) or not np.all(np.isfinite(lm3)):
                raise InputError(f"expected {N_LANDMARKS} finite 3D landmarks, got shape {lm3.shape}")
            object.__setattr__(self, "landmarks_3d", lm3)

    @property
    def shape(self) -> tuple[int, int]:
        return self.image.shape[0], self.image.shape[1]


def robust(errors: np.ndarray, robust_t: float = ROBUST_T) -> np.ndarray:
    """ρ(e) = min(√T, e)."""
    return np.minimum(np.sqrt(robust_t), errors)


def pixel_errors(observed: np.ndarray, raster: Raster, pixels: np.ndarray | None = None) -> np.ndarray:
    """Euclidean RGB difference at flat pixel indices (default: the foreground)."""
    if observed.shape != raster.color.shape:
        raise InputError(f"observed image {observed.shape} does not match render {raster.color.shape}")
    if pixels is None:
        pixels = np.flatnonzero(raster.mask)
    diff = raster.color.reshape(-1, 3)[pixels] - observed.reshape(-1, 3)[pixels]
    return np.sqrt(np.einsum("ij,ij->i", diff, diff))


def e_img(
    observed: np.ndarray,
    raster: Raster,
    *,
    robust_t: float = ROBUST_T,
    weight: float = 1.0,
) -> tuple[float, np.ndarray]:
    """
    Robust mean squared photometric error over the foreground.

    Returns the term and the per-pixel robust residuals ρ(e) in flat
    foreground order.
    """
    pixels = np.flatnonzero(raster.mask)
    if len(pixels) == 0:
        raise EmptyForegroundError("render has no foreground pixels; the model is off-screen")
    rho = robust(pixel_errors(observed, raster, pixels), robust_t)
    return float(weight * np.mean(rho * rho)), rho


def synth_landmarks(params: ParameterVector, model: EyeRegionModel, camera: Camera) -> np.ndarray:
    """Weighted combinations of projected face vertices, (25, 2) px."""
    return np.asarray(model.landmark_map @ project(face_vertices(params, model), camera))


def e_ldmks(
    observed: np.ndarray,
    synthesized: np.ndarray,
    foreground: int,
    weight: float = LAMBDA_LDMKS,
) -> float:
    if foreground <= 0:
        raise EmptyForegroundError("landmark term needs a non-empty foreground")
    d = np.asarray(observed, dtype=np.float64) - np.asarray(synthesized, dtype=np.float64)
    return float(weight * np.sum(d * d) / foreground)


def e_stats(
    beta_face: Sequence[float] | np.ndarray,
    tau_face: Sequence[float] | np.ndarray,
    lambda_geo: float = LAMBDA_GEO,
    lambda_tex: float = LAMBDA_TEX,
) -> float:
    beta = np.asarray(beta_face, dtype=np.float64)
    tau = np.asarray(tau_face, dtype=np.float64)
    return float(lambda_geo * beta @ beta + lambda_tex * tau @ tau)


def e_pose(theta_lid: float, theta_p: float, lambda_pose: float = LAMBDA_POSE) -> float:
    return float(lambda_pose * (theta_lid - theta_p) ** 2)
