# eyewarp/redirect/flow.py
"""
Model-derived eyelid flow.

Per-vertex image-space motion o_i = Π(Θ′(v_i)) − Π(Θ*(v_i)) is attached to
the destination-pose face meshes and rasterized, so every output pixel
holds the displacement back to its source sample (backward warp).
"""

from __future__ import annotations

import numpy as np

from ..config import RenderOptions
from ..exceptions import EmptyForegroundError
from ..model.assets import EyeRegionModel
from ..model.params import ParameterVector
from ..model.scene import face_vertices, pose_scene
from ..render.camera import Camera, project
from ..render.renderer import FlowField, render_attributes

FLOW_ATTRIBUTE = "flow"


def vertex_flow(
    source: ParameterVector,
    destination: ParameterVector,
    model: EyeRegionModel,
    camera: Camera,
) -> np.ndarray:
    """Image-space motion of every unsubdivided face vertex, (458, 2) px."""
    if source == destination:
        return np.zeros((2 * model.n_vertices, 2))
    before = project(face_vertices(source, model), camera)
    after = project(face_vertices(destination, model), camera)
    return after - before


def eyelid_flow(
    source: ParameterVector,
    destination: ParameterVector,
    model: EyeRegionModel,
    camera: Camera,
    *,
    render_options: RenderOptions | None = None,
) -> FlowField:
    """
    Dense flow over the destination geometry, refined as *render_options* refine a render.

    Raises EmptyForegroundError when no face pixel is visible and
    BehindCameraError when a face vertex is behind the camera in either pose.
    """
    flow = vertex_flow(source, destination, model, camera)
    scene = pose_scene(destination, model).with_face_attribute(FLOW_ATTRIBUTE, flow)
    field = render_attributes(scene, camera, FLOW_ATTRIBUTE, options=render_options)
    if not field.coverage.any():
        raise EmptyForegroundError("face parts are off-screen in the destination pose")
    return field
