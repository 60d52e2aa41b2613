# eyewarp/solver/initialize.py
"""
Initial Φ from 3D landmarks: translation at the landmark mean, rotation by
Kabsch alignment of the rest-pose model landmarks onto the observed ones.
"""

from __future__ import annotations

import logging
from typing import NamedTuple

import numpy as np
from scipy.spatial.transform import Rotation

from ..energy.terms import Observation
from ..exceptions import InputError
from ..model.assets import EyeRegionModel
from ..model.params import ParameterVector
from ..model.scene import landmarks_3d

logger = logging.getLogger(__name__)

_RANK_TOL = 1e-9


class KabschResult(NamedTuple):
    rotation: np.ndarray
    translation: np.ndarray
    degenerate: bool


class Initialization(NamedTuple):
    params: ParameterVector
    degenerate: bool
    rmsd: float


def kabsch(source: np.ndarray, target: np.ndarray) -> KabschResult:
    """
    Proper rotation R and translation t minimizing Σ‖R·a + t − b‖².

    A covariance of rank < 3 is reported as degenerate and yields the
    identity rotation.
    """
    a = np.asarray(source, dtype=np.float64)
    b = np.asarray(target, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 2 or a.shape[1] != 3:
        raise ValueError(f"point sets must both be (N, 3), got {a.shape} and {b.shape}")
    ca = a.mean(axis=0)
    cb = b.mean(axis=0)
    h = (a - ca).T @ (b - cb)
    u, s, vt = np.linalg.svd(h)
    rank = int(np.sum(s > _RANK_TOL * s[0])) if s[0] > 0 else 0
    if rank < 3:
        return KabschResult(rotation=np.eye(3), translation=cb - ca, degenerate=True)
    v = vt.T
    d = np.sign(np.linalg.det(v @ u.T))
    r = v @ np.diag([1.0, 1.0, d]) @ u.T
    return KabschResult(rotation=r, translation=cb - r @ ca, degenerate=False)


def rest_landmarks(model: EyeRegionModel) -> np.ndarray:
    """Model landmarks at the identity pose with the asset's anthropometric defaults."""
    rest = ParameterVector.create(
        theta_T=(0.0, 0.0, 0.0),
        theta_iod=model.default_iod,
        beta_iris=model.default_beta_iris,
    )
    return landmarks_3d(rest, model)


def initialize(observation: Observation, model: EyeRegionModel) -> Initialization:
    """Φ_init for the first frame of a sequence."""
    if observation.landmarks_3d is None:
        raise InputError("initialization needs 3D landmark estimates")
    observed = observation.landmarks_3d
    rest = rest_landmarks(model)
    fit = kabsch(rest, observed)
    if fit.degenerate:
        logger.warning("degenerate landmark configuration; using the identity rotation")
    euler = Rotation.from_matrix(fit.rotation).as_euler("xyz")
    mean = observed.mean(axis=0)
    aligned = rest @ fit.rotation.T + fit.translation
    rmsd = float(np.sqrt(np.mean(np.sum((aligned - observed) ** 2, axis=1))))
    params = ParameterVector.create(
        theta_R=tuple(float(x) for x in euler),
        theta_T=tuple(float(x) for x in mean),
        theta_iod=model.default_iod,
        beta_iris=model.default_beta_iris,
    )
    logger.debug("initialized at T=%s R=%s (rmsd %.3f mm)", mean.round(2), np.degrees(euler).round(2), rmsd)
    return Initialization(params=params, degenerate=fit.degenerate, rmsd=rmsd)
