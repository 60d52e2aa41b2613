# eyewarp/model/scene.py
"""
Scene assembly: turn Φ into four posed camera-space meshes.

Part order is fixed: face-left, face-right, eye-left, eye-right. Face
vertex indices 0..228 belong to the left part and 229..457 to the right
part; landmark and flow code rely on this order.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import IntEnum
from typing import TYPE_CHECKING

import numpy as np

from .assets import EyeRegionModel
from .eyeball import build_eyeball
from .params import ParameterVector
from .posing import (
    GazeAngles,
    eye_rotation,
    eyelid_pose,
    global_rotation,
    mirror_x,
    solve_gaze_angles,
)

if TYPE_CHECKING:
    from ..render.subdivision import LoopStencils


class PartId(IntEnum):
    BACKGROUND = 0
    FACE_LEFT = 1
    FACE_RIGHT = 2
    EYE_LEFT = 3
    EYE_RIGHT = 4

    @property
    def is_face(self) -> bool:
        return self in (PartId.FACE_LEFT, PartId.FACE_RIGHT)

    @property
    def is_eye(self) -> bool:
        return self in (PartId.EYE_LEFT, PartId.EYE_RIGHT)


FACE_PARTS = (PartId.FACE_LEFT, PartId.FACE_RIGHT)
EYE_PARTS = (PartId.EYE_LEFT, PartId.EYE_RIGHT)


@dataclass(frozen=True, eq=False)
class Mesh:
    """A camera-space triangle mesh with per-vertex attributes."""

    part: PartId
    vertices: np.ndarray
    faces: np.ndarray
    uv: np.ndarray
    texture: np.ndarray | None = None
    stencils: LoopStencils | None = None
    local: np.ndarray | None = None
    attributes: dict[str, np.ndarray] = field(default_factory=dict)

    def with_attribute(self, name: str, values: np.ndarray) -> Mesh:
        return Mesh(
            part=self.part,
            vertices=self.vertices,
            faces=self.faces,
            uv=self.uv,
            texture=self.texture,
            stencils=self.stencils,
            local=self.local,
            attributes={**self.attributes, name: np.asarray(values, dtype=np.float64)},
        )


@dataclass(frozen=True, eq=False)
class EyeballPose:
    """Where an eyeball sits and what surrounds it, for shading."""

    part: PartId
    center: np.ndarray
    rotation: np.ndarray
    iris_scale: float
    cornea_radius: float
    cornea_offset: float
    iris_plane_z: float
    limbus_radius: float
    lid_upper: np.ndarray
    lid_lower: np.ndarray

    def to_local(self, points: np.ndarray) -> np.ndarray:
        return (np.asarray(points) - self.center) @ self.rotation

    def gaze(self) -> np.ndarray:
        return self.rotation[:, 2].copy()


@dataclass(frozen=True)
class Light:
    ambient: np.ndarray
    directional: np.ndarray
    direction: np.ndarray

    @classmethod
    def from_params(cls, params: ParameterVector) -> Light:
        pitch, yaw = params.iota_rot
        direction = np.array([np.cos(pitch) * np.sin(yaw), -np.sin(pitch), np.cos(pitch) * np.cos(yaw)])
        return cls(
            ambient=np.asarray(params.iota_amb, dtype=np.float64),
            directional=np.asarray(params.iota_dir, dtype=np.float64),
            direction=direction,
        )


@dataclass(frozen=True, eq=False)
class Scene:
    """Posed meshes plus lighting; immutable during a render."""

    meshes: tuple[Mesh, ...]
    light: Light
    eyeballs: tuple[EyeballPose, ...] = ()
    reflection_map: int | None = None
    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))
    eye_centers_model: np.ndarray = field(default_factory=lambda: np.zeros((2, 3)))
    sclera_radius: float = 0.0

    def mesh(self, part: PartId) -> Mesh:
        for m in self.meshes:
            if m.part == part:
                return m
        raise KeyError(part)

    def face_vertices(self) -> np.ndarray:
        """Unsubdivided camera-space face vertices, left part first (458, 3)."""
        return np.concatenate([self.mesh(p).vertices for p in FACE_PARTS])

    def with_reflection_map(self, map_id: int | None) -> Scene:
        return Scene(
            meshes=self.meshes,
            light=self.light,
            eyeballs=self.eyeballs,
            reflection_map=map_id,
            rotation=self.rotation,
            translation=self.translation,
            eye_centers_model=self.eye_centers_model,
            sclera_radius=self.sclera_radius,
        )

    def with_face_attribute(self, name: str, values: np.ndarray) -> Scene:
        """Attach a per-vertex attribute (458, k) to the two face parts."""
        values = np.asarray(values, dtype=np.float64)
        meshes: list[Mesh] = []
        for m in self.meshes:
            if m.part == PartId.FACE_LEFT:
                m = m.with_attribute(name, values[: len(m.vertices)])
            elif m.part == PartId.FACE_RIGHT:
                m = m.with_attribute(name, values[len(values) - len(m.vertices) :])
            meshes.append(m)
        return Scene(
            meshes=tuple(meshes),
            light=self.light,
            eyeballs=self.eyeballs,
            reflection_map=self.reflection_map,
            rotation=self.rotation,
            translation=self.translation,
            eye_centers_model=self.eye_centers_model,
            sclera_radius=self.sclera_radius,
        )


def face_parts_model(params: ParameterVector, model: EyeRegionModel) -> tuple[np.ndarray, np.ndarray]:
    """(left, right) face-part vertices in the model frame."""
    base = eyelid_pose(model.shape_sample(params.beta_face), params.theta_lid, model)
    half = 0.5 * params.theta_iod
    right = base + np.array([half, 0.0, 0.0])
    left = mirror_x(base) - np.array([half, 0.0, 0.0])
    return left, right


def pose_scene(
    params: ParameterVector,
    model: EyeRegionModel,
    *,
    reflection_map: int | None = None,
) -> Scene:
    """Posed camera-space scene for *params*."""
    rot = global_rotation(params.theta_R)
    trans = np.asarray(params.theta_T, dtype=np.float64)

    def to_camera(points: np.ndarray) -> np.ndarray:
        return points @ rot.T + trans

    left, right = face_parts_model(params, model)
    texture = model.texture_sample(params.tau_face)
    face_left = Mesh(
        part=PartId.FACE_LEFT,
        vertices=to_camera(left),
        faces=np.ascontiguousarray(model.topology[:, [0, 2, 1]]),
        uv=model.uv,
        texture=texture,
        stencils=model.stencils.flipped(),
    )
    face_right = Mesh(
        part=PartId.FACE_RIGHT,
        vertices=to_camera(right),
        faces=model.topology,
        uv=model.uv,
        texture=texture,
        stencils=model.stencils,
    )

    eyeball = build_eyeball(model, params.beta_iris, params.tau_iris, params.tau_tint)
    half = 0.5 * params.theta_iod
    centers_model = np.array([[-half, 0.0, 0.0], [half, 0.0, 0.0]])
    yaw_left, yaw_right = params.eye_yaws
    meshes = [face_left, face_right]
    poses: list[EyeballPose] = []
    for part, center, yaw, face in (
        (PartId.EYE_LEFT, centers_model[0], yaw_left, face_left),
        (PartId.EYE_RIGHT, centers_model[1], yaw_right, face_right),
    ):
        r_local = rot @ eye_rotation(params.theta_p, yaw)
        c_cam = to_camera(center)
        meshes.append(
            Mesh(
                part=part,
                vertices=eyeball.vertices @ r_local.T + c_cam,
                faces=eyeball.faces,
                uv=eyeball.uv,
                texture=eyeball.texture,
                local=eyeball.vertices,
            )
        )
        poses.append(
            EyeballPose(
                part=part,
                center=c_cam,
                rotation=r_local,
                iris_scale=eyeball.iris_scale,
                cornea_radius=eyeball.asset.cornea_radius,
                cornea_offset=eyeball.asset.cornea_offset,
                iris_plane_z=eyeball.asset.iris_plane_z,
                limbus_radius=eyeball.asset.limbus_radius,
                lid_upper=face.vertices[model.lid_margin_upper],
                lid_lower=face.vertices[model.lid_margin_lower],
            )
        )
    return Scene(
        meshes=tuple(meshes),
        light=Light.from_params(params),
        eyeballs=tuple(poses),
        reflection_map=reflection_map,
        rotation=rot,
        translation=trans,
        eye_centers_model=centers_model,
        sclera_radius=eyeball.asset.sclera_radius,
    )


def gaze_from_target(target: Sequence[float] | np.ndarray, scene: Scene) -> GazeAngles:
    """(pitch, yaw, vergence, lid) aiming both eyeballs of *scene* at a camera-space target."""
    return solve_gaze_angles(
        target,
        scene.eye_centers_model,
        scene.rotation,
        scene.translation,
        scene.sclera_radius,
    )


def face_vertices(params: ParameterVector, model: EyeRegionModel) -> np.ndarray:
    """Camera-space unsubdivided face vertices (458, 3) without building eyeballs."""
    rot = global_rotation(params.theta_R)
    left, right = face_parts_model(params, model)
    return np.concatenate([left, right]) @ rot.T + np.asarray(params.theta_T, dtype=np.float64)


def landmarks_3d(params: ParameterVector, model: EyeRegionModel) -> np.ndarray:
    """Camera-space 3D landmarks (25, 3)."""
    return np.asarray(model.landmark_map @ face_vertices(params, model))
