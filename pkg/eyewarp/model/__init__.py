# eyewarp/model/__init__.py
from .assets import EyeballAsset, EyeRegionModel
from .eyeball import EyeballMesh, build_eyeball, polar_uv, tessellate_eyeball
from .params import (
    FIELD_SLICES,
    GAZE_FIELDS,
    PARAM_COUNT,
    PARAM_LAYOUT,
    VIDEO_MASK,
    ParameterVector,
    flat_names,
    mask_indices,
)
from .posing import GazeAngles, eye_rotation, eyelid_pose, gaze_direction, global_rotation
from .scene import (
    EYE_PARTS,
    FACE_PARTS,
    EyeballPose,
    Light,
    Mesh,
    PartId,
    Scene,
    face_vertices,
    gaze_from_target,
    landmarks_3d,
    pose_scene,
)

__all__ = [
    "EyeballAsset",
    "EyeRegionModel",
    "EyeballMesh",
    "build_eyeball",
    "polar_uv",
    "tessellate_eyeball",
    "FIELD_SLICES",
    "GAZE_FIELDS",
    "PARAM_COUNT",
    "PARAM_LAYOUT",
    "VIDEO_MASK",
    "ParameterVector",
    "flat_names",
    "mask_indices",
    "GazeAngles",
    "eye_rotation",
    "eyelid_pose",
    "gaze_direction",
    "global_rotation",
    "EYE_PARTS",
    "FACE_PARTS",
    "EyeballPose",
    "Light",
    "Mesh",
    "PartId",
    "Scene",
    "face_vertices",
    "gaze_from_target",
    "landmarks_3d",
    "pose_scene",
]
