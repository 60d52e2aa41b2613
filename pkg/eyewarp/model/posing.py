# eyewarp/model/posing.py
"""
Posing helpers: global transform, eyeball rotation, procedural eyelids and
gaze-target inversion.

Model frame: x right, y down, z towards the camera; the eyeball centers sit
at (±iod/2, 0, 0), the left part at negative x. An eyeball with pitch p and
yaw y is rotated by Rx(p)·Ry(y), so its optical axis is
(sin y, −sin p·cos y, cos p·cos y): positive pitch looks up, positive yaw
looks towards +x.
"""

from __future__ import annotations

from collections.abc import Sequence
from typing import NamedTuple

import numpy as np
from scipy.spatial.transform import Rotation

from ..constants import EYELID_GUARD_RAD
from ..exceptions import GazeTargetError, GuardRangeError
from .assets import EyeRegionModel


class GazeAngles(NamedTuple):
    pitch: float
    yaw: float
    vergence: float
    lid: float


def global_rotation(theta_R: Sequence[float]) -> np.ndarray:
    """3x3 rotation from extrinsic xyz Euler angles."""
    return Rotation.from_euler("xyz", np.asarray(theta_R, dtype=np.float64)).as_matrix()


def eye_rotation(pitch: float, yaw: float) -> np.ndarray:
    """Rx(pitch)·Ry(yaw)."""
    cp, sp = np.cos(pitch), np.sin(pitch)
    cy, sy = np.cos(yaw), np.sin(yaw)
    rx = np.array([[1.0, 0.0, 0.0], [0.0, cp, -sp], [0.0, sp, cp]])
    ry = np.array([[cy, 0.0, sy], [0.0, 1.0, 0.0], [-sy, 0.0, cy]])
    return rx @ ry


def gaze_direction(pitch: float, yaw: float) -> np.ndarray:
    return np.array([np.sin(yaw), -np.sin(pitch) * np.cos(yaw), np.cos(pitch) * np.cos(yaw)])


def mirror_x(vertices: np.ndarray) -> np.ndarray:
    out = np.array(vertices, dtype=np.float64)
    out[..., 0] = -out[..., 0]
    return out


def eyelid_pose(vertices: np.ndarray, theta_lid: float, model: EyeRegionModel) -> np.ndarray:
    """
    Rotate eyelid vertices about the eye-corner axis.

    Each vertex i turns by weight_i · theta_lid about the line through the
    medial and lateral corner vertices, oriented medial → lateral (≈ +x), so
    positive angles lift the upper lid. Weights are asset-defined.
    """
    if abs(theta_lid) > EYELID_GUARD_RAD:
        raise GuardRangeError("theta_lid", theta_lid, -EYELID_GUARD_RAD, EYELID_GUARD_RAD)
    verts = np.asarray(vertices, dtype=np.float64)
    if theta_lid == 0.0:
        return verts.copy()
    lateral, medial = model.corners
    pivot = verts[medial]
    axis = verts[lateral] - pivot
    axis = axis / np.linalg.norm(axis)
    weights = model.eyelid_weights
    moving = weights > 0
    out = verts.copy()
    rot = Rotation.from_rotvec(np.outer(weights[moving] * theta_lid, axis))
    out[moving] = rot.apply(verts[moving] - pivot) + pivot
    return out


def solve_gaze_angles(
    target: Sequence[float] | np.ndarray,
    eye_centers_model: np.ndarray,
    rotation: np.ndarray,
    translation: np.ndarray,
    sclera_radius: float,
) -> GazeAngles:
    """
    Pitch, yaw, vergence and lid angles that aim both eyes at *target*.

    *target* is a camera-space point (mm); *eye_centers_model* holds the
    (left, right) eyeball centers in the model frame and (rotation,
    translation) the global transform. Pitch is shared exactly by both eyes
    because their centers differ only along x; theta_lid follows pitch.
    """
    g = np.asarray(target, dtype=np.float64)
    g_model = rotation.T @ (g - translation)
    d = g_model[None, :] - eye_centers_model
    dist = np.linalg.norm(d, axis=1)
    if np.any(dist <= sclera_radius):
        raise GazeTargetError(f"gaze target {g.tolist()} lies inside an eyeball")
    pitch = float(np.arctan2(-d[0, 1], d[0, 2]))
    yaws = np.arctan2(d[:, 0], np.hypot(d[:, 1], d[:, 2]))
    yaw_left, yaw_right = float(yaws[0]), float(yaws[1])
    return GazeAngles(
        pitch=pitch,
        yaw=0.5 * (yaw_left + yaw_right),
        vergence=yaw_left - yaw_right,
        lid=pitch,
    )
