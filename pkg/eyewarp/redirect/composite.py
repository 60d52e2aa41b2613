# eyewarp/redirect/composite.py
"""
Eyeball compositing with a blurred seam.

The compositing alpha is the eyeball mask of the destination render (the
depth test already clips it by the posed eyelids). Within ``band`` pixels
inside the mask boundary alpha is replaced by its Gaussian blur, so the
seam feathers into the eyeballs and pixels off the mask keep the warped
value bit-exactly.
"""

from __future__ import annotations

import numpy as np
from scipy.ndimage import distance_transform_edt, gaussian_filter

from ..config import RenderOptions
from ..constants import N_REFLECTION_MAPS, ROBUST_T, SEAM_BAND_PX, SEAM_SIGMA_PX
from ..energy.terms import pixel_errors, robust
from ..model.assets import EyeRegionModel
from ..model.params import ParameterVector
from ..model.scene import EYE_PARTS, pose_scene
from ..render.camera import Camera
from ..render.raster import Raster
from ..render.renderer import part_mask, render


def seam_band(mask: np.ndarray, band: float = SEAM_BAND_PX) -> np.ndarray:
    """Pixels within *band* px of the mask boundary, on either side."""
    if not mask.any() or mask.all():
        return np.zeros_like(mask, dtype=bool)
    outside = distance_transform_edt(~mask)
    inside = distance_transform_edt(mask)
    return (mask & (inside <= band)) | (~mask & (outside <= band))


def seam_alpha(mask: np.ndarray, *, sigma: float = SEAM_SIGMA_PX, band: float = SEAM_BAND_PX) -> np.ndarray:
    """
    Hard mask alpha, Gaussian-blurred inside the seam band; values in [0, 1].

    The blur feathers inward only: alpha is exactly 0 outside *mask*.
    """
    hard = mask.astype(np.float64)
    if band <= 0.0 or not mask.any():
        return hard
    blurred = np.clip(gaussian_filter(hard, sigma=sigma, mode="nearest"), 0.0, 1.0)
    return np.where(mask & seam_band(mask, band), blurred, hard)


def composite(
    warped: np.ndarray,
    raster: Raster,
    *,
    sigma: float = SEAM_SIGMA_PX,
    band: float = SEAM_BAND_PX,
) -> np.ndarray:
    """Blend the eyeball pixels of *raster* over *warped*; other pixels are copied."""
    eyes = part_mask(raster, EYE_PARTS)
    if not eyes.any():
        return np.array(warped, dtype=np.float64)
    alpha = seam_alpha(eyes, sigma=sigma, band=band)[..., None]
    blended = (1.0 - alpha) * warped + alpha * raster.color
    return np.where(alpha == 0.0, warped, np.where(alpha == 1.0, raster.color, blended))


def select_reflection_map(
    observed: np.ndarray,
    params: ParameterVector,
    model: EyeRegionModel,
    camera: Camera,
    *,
    render_options: RenderOptions | None = None,
    robust_t: float = ROBUST_T,
) -> int:
    """
    The reflection map whose render best matches *observed* on eyeball pixels.

    Ties go to the lowest id; with no visible eyeball pixels the answer is 0.
    """
    best_id, best_err = 0, np.inf
    for map_id in range(N_REFLECTION_MAPS):
        raster = render(pose_scene(params, model, reflection_map=map_id), camera, options=render_options)
        pixels = np.flatnonzero(part_mask(raster, EYE_PARTS))
        if len(pixels) == 0:
            return 0
        rho = robust(pixel_errors(observed, raster, pixels), robust_t)
        err = float(np.mean(rho * rho))
        if err < best_err:
            best_id, best_err = map_id, err
    return best_id
