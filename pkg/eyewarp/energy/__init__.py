# eyewarp/energy/__init__.py
from .objective import Evaluation, Objective, residuals
from .terms import Observation, e_img, e_ldmks, e_pose, e_stats, robust, synth_landmarks

__all__ = [
    "Evaluation",
    "Objective",
    "residuals",
    "Observation",
    "e_img",
    "e_ldmks",
    "e_pose",
    "e_stats",
    "robust",
    "synth_landmarks",
]
