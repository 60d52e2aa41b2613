# eyewarp/testkit/selftest.py
"""
Oracle suite behind ``eyewarp selftest``.

Every check compares an optimized code path against an independent
reference on a small synthetic scene and returns a CheckResult; a check
that raises is reported as failed with the error text.
"""

from __future__ import annotations

import logging
import math
import time
from collections.abc import Callable

import numpy as np
from pydantic import BaseModel, Field
from scipy.ndimage import binary_erosion
from scipy.spatial.transform import Rotation

from ..config import EnergyWeights, RedirectOptions, RenderOptions
from ..constants import N_REFLECTION_MAPS
from ..energy.objective import Objective
from ..energy.terms import Observation, synth_landmarks
from ..exceptions import EyeWarpError
from ..model.assets import EyeRegionModel
from ..model.params import FIELD_SLICES, ParameterVector
from ..model.scene import EYE_PARTS, pose_scene
from ..models import RedirectRequest
from ..redirect.composite import seam_band, select_reflection_map
from ..redirect.flow import eyelid_flow
from ..redirect.redirector import redirect_frame, repose
from ..render.camera import Camera, default_camera
from ..render.renderer import part_mask, render
from ..render.subdivision import build_loop_stencils
from ..solver.initialize import kabsch, rest_landmarks
from ..solver.jacobian import jacobian
from .oracles import (
    FLOW_TOLERANCE_PX,
    PRIOR_GRADIENT_TOLERANCE,
    ROTATION_TOLERANCE,
    icosahedron,
    oracle_depth,
    oracle_fd,
    oracle_flow,
    oracle_loop,
)
from .synthetic import SyntheticModelSpec, build_model

logger = logging.getLogger(__name__)

LOOP_TOLERANCE = 1e-12
DEPTH_TOLERANCE = 1e-9


class CheckResult(BaseModel):
    name: str
    passed: bool
    detail: str = ""
    elapsed_ms: float = Field(default=0.0, ge=0.0)


Check = Callable[[EyeRegionModel, Camera], tuple[bool, str]]


def _loop_error(vertices: np.ndarray, faces: np.ndarray) -> float:
    stencils = build_loop_stencils(faces, len(vertices))
    refined = stencils.apply(vertices)
    moved, edge_points = oracle_loop(vertices, faces)
    n = len(vertices)
    err = float(np.abs(refined[:n] - moved).max())
    for e, (lo, hi) in enumerate(stencils.edges.tolist()):
        err = max(err, float(np.abs(refined[n + e] - edge_points[(lo, hi)]).max()))
    return err


def check_loop(model: EyeRegionModel, camera: Camera) -> tuple[bool, str]:
    v, f = icosahedron()
    closed = _loop_error(v, f)
    open_ = _loop_error(model.mu_geo, model.topology)
    return max(closed, open_) <= LOOP_TOLERANCE, f"max deviation {max(closed, open_):.2e}"


def check_depth(model: EyeRegionModel, camera: Camera) -> tuple[bool, str]:
    scene = pose_scene(ParameterVector(), model)
    raster = render(scene, camera, options=RenderOptions(subdivide=False))
    reference = oracle_depth([(m.vertices, m.faces) for m in scene.meshes], camera)
    covered = np.isfinite(raster.depth)
    if np.any(covered & ~np.isfinite(reference)):
        return False, "rendered coverage outside every triangle"
    rel = np.abs(raster.depth[covered] - reference[covered]) / reference[covered]
    worst = float(rel.max()) if rel.size else 0.0
    return worst <= DEPTH_TOLERANCE, f"{int(covered.sum())} px, max relative error {worst:.2e}"


def check_flow(model: EyeRegionModel, camera: Camera) -> tuple[bool, str]:
    source = ParameterVector()
    destination = repose(source, RedirectRequest.angles(math.radians(10.0), math.radians(15.0)), model)
    field = eyelid_flow(source, destination, model, camera, render_options=RenderOptions(subdivide=False))
    interior = binary_erosion(field.coverage, structure=np.ones((3, 3), dtype=bool))
    pixels = np.flatnonzero(interior)
    values, covered = oracle_flow(source, destination, model, camera, pixels)
    if not covered.all():
        return False, f"{int((~covered).sum())} interior pixel(s) not covered by the oracle"
    worst = float(np.abs(field.flow.reshape(-1, 2)[pixels] - values).max()) if len(pixels) else 0.0
    return worst <= FLOW_TOLERANCE_PX, f"{len(pixels)} px, max deviation {worst:.2e} px"


def check_prior_gradient(model: EyeRegionModel, camera: Camera) -> tuple[bool, str]:
    params = ParameterVector.create(beta_face=(0.5,) + (0.0,) * 15, theta_lid=0.1)
    raster = render(pose_scene(params, model), camera)
    observation = Observation(raster.color, synth_landmarks(params, model, camera))
    objective = Objective(model, observation, camera, weights=EnergyWeights(image=0.0, ldmks=0.0))
    reference = objective.evaluate(params)
    worst = 0.0
    for k in (FIELD_SLICES["beta_face"].start, FIELD_SLICES["theta_lid"].start, FIELD_SLICES["theta_p"].start):
        column = jacobian(objective, reference, np.array([k]), np.array([1e-3]))[:, 0]
        analytic = 2.0 * float(reference.residuals @ column)
        worst = max(worst, abs(oracle_fd(objective, params, k) - analytic))
    return worst <= PRIOR_GRADIENT_TOLERANCE, f"max gradient deviation {worst:.2e}"


def check_kabsch(model: EyeRegionModel, camera: Camera) -> tuple[bool, str]:
    rest = rest_landmarks(model)
    rotation = Rotation.from_euler("xyz", [0.2, -0.3, 0.1]).as_matrix()
    observed = rest @ rotation.T + np.array([3.0, -2.0, -480.0])
    result = kabsch(rest, observed)
    err = float(np.abs(result.rotation - rotation).max())
    return err <= ROTATION_TOLERANCE and not result.degenerate, f"rotation error {err:.2e}"


def check_identity_locality(model: EyeRegionModel, camera: Camera) -> tuple[bool, str]:
    params = ParameterVector()
    image = render(pose_scene(params, model, reflection_map=0), camera).color
    request = RedirectRequest.angles(params.theta_p, params.theta_y, params.theta_v)
    options = RedirectOptions()
    out = redirect_frame(image, params, request, model, camera, options=options).image
    raster = render(pose_scene(params, model, reflection_map=0), camera)
    band = seam_band(part_mask(raster, EYE_PARTS), options.seam_band)
    worst = float(np.abs(out - image)[~band].max())
    return worst <= 1e-12, f"max change outside the seam band {worst:.2e}"


def check_reflection_maps(model: EyeRegionModel, camera: Camera) -> tuple[bool, str]:
    params = ParameterVector()
    hits = 0
    for k in range(N_REFLECTION_MAPS):
        observed = render(pose_scene(params, model, reflection_map=k), camera).color
        hits += select_reflection_map(observed, params, model, camera) == k
    return hits == N_REFLECTION_MAPS, f"{hits}/{N_REFLECTION_MAPS} maps recovered"


CHECKS: dict[str, Check] = {
    "loop_subdivision": check_loop,
    "depth_buffer": check_depth,
    "eyelid_flow": check_flow,
    "prior_gradient": check_prior_gradient,
    "kabsch": check_kabsch,
    "identity_locality": check_identity_locality,
    "reflection_maps": check_reflection_maps,
}


def run_selftest(
    model: EyeRegionModel | None = None,
    camera: Camera | None = None,
    *,
    only: list[str] | None = None,
) -> list[CheckResult]:
    """Run the oracle checks (all, or those named in *only*) and report each."""
    model = model or build_model(SyntheticModelSpec(texture_size=64))
    camera = camera or default_camera(64, 48)
    results: list[CheckResult] = []
    for name, check in CHECKS.items():
        if only is not None and name not in only:
            continue
        start = time.perf_counter()
        try:
            passed, detail = check(model, camera)
        except EyeWarpError as exc:
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        elapsed = (time.perf_counter() - start) * 1e3
        level = logging.INFO if passed else logging.ERROR
        logger.log(level, "selftest %s: %s (%s)", name, "ok" if passed else "FAILED", detail)
        results.append(CheckResult(name=name, passed=passed, detail=detail, elapsed_ms=elapsed))
    return results
