# eyewarp/redirect/redirector.py
"""
Gaze redirection of one frame:

  repose → eyelid_flow → warp → select_reflection_map → composite

``RedirectMode`` switches parts off for ablations: NONE returns the input,
EYEBALLS re-renders the eyeballs with the eyelids held at their fitted pose,
FULL also warps the eyelids.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass

import numpy as np

from ..config import RedirectOptions, RenderOptions
from ..constants import EYELID_GUARD_RAD
from ..model.assets import EyeRegionModel
from ..model.params import ParameterVector
from ..model.posing import global_rotation, solve_gaze_angles
from ..model.scene import pose_scene
from ..models import RedirectMode, RedirectRequest
from ..render.camera import Camera
from ..render.renderer import FlowField, render
from .composite import composite, select_reflection_map
from .flow import eyelid_flow
from .warp import warp

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RedirectResult:
    image: np.ndarray
    params: ParameterVector
    reflection_map: int | None
    flow: FlowField | None
    elapsed_ms: float


def repose(params: ParameterVector, request: RedirectRequest, model: EyeRegionModel) -> ParameterVector:
    """
    Φ′: new pitch, yaw and vergence, with the lid following the pitch change.

    Only theta_p, theta_y, theta_v and theta_lid differ from *params*.
    Raises GazeTargetError for a target inside an eyeball.
    """
    if request.target is not None:
        half = 0.5 * params.theta_iod
        angles = solve_gaze_angles(
            request.target,
            np.array([[-half, 0.0, 0.0], [half, 0.0, 0.0]]),
            global_rotation(params.theta_R),
            np.asarray(params.theta_T, dtype=np.float64),
            model.eyeball.sclera_radius,
        )
        pitch, yaw, vergence = angles.pitch, angles.yaw, angles.vergence
    else:
        assert request.pitch is not None and request.yaw is not None and request.vergence is not None
        pitch, yaw, vergence = request.pitch, request.yaw, request.vergence
    if (pitch, yaw, vergence) == (params.theta_p, params.theta_y, params.theta_v):
        return params
    lid = params.theta_lid + (pitch - params.theta_p)
    if abs(lid) > EYELID_GUARD_RAD:
        logger.warning("eyelid pitch %.1f° clipped to the guard range", np.degrees(lid))
        lid = float(np.clip(lid, -EYELID_GUARD_RAD, EYELID_GUARD_RAD))
    return params.replace(theta_p=pitch, theta_y=yaw, theta_v=vergence, theta_lid=lid)


def redirect_frame(
    image: np.ndarray,
    params: ParameterVector,
    request: RedirectRequest,
    model: EyeRegionModel,
    camera: Camera,
    *,
    options: RedirectOptions | None = None,
    render_options: RenderOptions | None = None,
) -> RedirectResult:
    """Redirect the gaze in *image*, fitted with *params*, as *request* asks."""
    opts = options or RedirectOptions()
    start = time.perf_counter()
    observed = np.asarray(image, dtype=np.float64)
    target = repose(params, request, model)

    if opts.mode is RedirectMode.NONE:
        out = observed.copy()
        return RedirectResult(out, target, None, None, (time.perf_counter() - start) * 1e3)

    flow: FlowField | None = None
    if opts.mode is RedirectMode.FULL:
        flow = eyelid_flow(params, target, model, camera, render_options=render_options)
        base = warp(observed, flow)
        shown = target
    else:
        base = observed
        shown = target.replace(theta_lid=params.theta_lid)

    map_id = (
        select_reflection_map(observed, params, model, camera, render_options=render_options)
        if opts.select_reflection_map
        else 0
    )
    raster = render(pose_scene(shown, model, reflection_map=map_id), camera, options=render_options)
    out = composite(base, raster, sigma=opts.seam_sigma, band=opts.seam_band)
    elapsed = (time.perf_counter() - start) * 1e3
    logger.debug("redirected frame in %.1f ms (map %d, mode %s)", elapsed, map_id, opts.mode.value)
    return RedirectResult(out, target, map_id, flow, elapsed)
