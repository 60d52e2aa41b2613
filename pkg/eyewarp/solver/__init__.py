# eyewarp/solver/__init__.py
from .gauss_newton import FitResult, fit, gauss_newton_step
from .initialize import Initialization, KabschResult, initialize, kabsch, rest_landmarks
from .jacobian import jacobian

__all__ = [
    "FitResult",
    "fit",
    "gauss_newton_step",
    "Initialization",
    "KabschResult",
    "initialize",
    "kabsch",
    "rest_landmarks",
    "jacobian",
]
