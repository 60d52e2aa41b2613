# eyewarp/energy/objective.py
"""
Residual vector r(Φ) with ‖r‖² = E(Φ).

Row layout:
  |P| pixel rows      √(w_img/|P|) · ρ(e_p)
  25 landmark rows    √(λ_ldmks/|P|) · ‖l_i − l′_i‖
  16 shape rows       √λ_geo · β_i
  8 texture rows      √λ_tex · τ_i
  1 pose row          √λ_pose · (θ_lid − θ_p)

For Jacobians the objective is linearized at a reference evaluation: the
pixel rows stay the reference foreground P(Φ) with its normalization, and a
reference pixel left uncovered by a perturbed render keeps its reference
residual.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..config import EnergyWeights, RenderOptions
from ..constants import N_LANDMARKS
from ..exceptions import EmptyForegroundError
from ..model.assets import EyeRegionModel
from ..model.params import ParameterVector
from ..model.scene import Scene, pose_scene
from ..models import EnergyBreakdown
from ..render.camera import Camera
from ..render.raster import Raster
from ..render.renderer import render
from .terms import Observation, pixel_errors, robust, synth_landmarks

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Evaluation:
    """Everything computed at one Φ."""

    params: ParameterVector
    raster: Raster
    pixels: np.ndarray
    residuals: np.ndarray
    landmarks: np.ndarray
    energy: EnergyBreakdown

    @property
    def foreground(self) -> int:
        return len(self.pixels)


class Objective:
    """
    E(Φ) for one observation.

    Holds the model, observation, camera and weights; every method is a pure
    function of its arguments, so one Objective may be evaluated from several
    threads at once.
    """

    def __init__(
        self,
        model: EyeRegionModel,
        observation: Observation,
        camera: Camera,
        *,
        weights: EnergyWeights | None = None,
        render_options: RenderOptions | None = None,
        reflection_map: int | None = None,
    ) -> None:
        if observation.shape != camera.shape:
            raise ValueError(f"observation {observation.shape} does not match camera {camera.shape}")
        self.model = model
        self.observation = observation
        self.camera = camera
        self.weights = weights or EnergyWeights()
        self.render_options = render_options or RenderOptions()
        self.reflection_map = reflection_map

    def scene(self, params: ParameterVector) -> Scene:
        return pose_scene(params, self.model, reflection_map=self.reflection_map)

    def render(self, params: ParameterVector) -> Raster:
        return render(self.scene(params), self.camera, options=self.render_options)

    # ------------------------------------------------------------------
    # Residual blocks
    # ------------------------------------------------------------------

    def _prior_rows(self, params: ParameterVector) -> np.ndarray:
        w = self.weights
        return np.concatenate(
            [
                np.sqrt(w.geo) * np.asarray(params.beta_face),
                np.sqrt(w.tex) * np.asarray(params.tau_face),
                [np.sqrt(w.pose) * (params.theta_lid - params.theta_p)],
            ]
        )

    def _landmark_rows(self, params: ParameterVector, foreground: int) -> tuple[np.ndarray, np.ndarray]:
        synth = synth_landmarks(params, self.model, self.camera)
        dist = np.linalg.norm(self.observation.landmarks - synth, axis=1)
        return np.sqrt(self.weights.ldmks / foreground) * dist, synth

    def _pixel_rows(self, raster: Raster, pixels: np.ndarray, foreground: int) -> np.ndarray:
        rho = robust(pixel_errors(self.observation.image, raster, pixels), self.weights.robust_t)
        return np.sqrt(self.weights.image / foreground) * rho

    def _breakdown(self, r: np.ndarray, foreground: int) -> EnergyBreakdown:
        n_img = foreground
        n_stats = len(self.model.sigma_geo) + len(self.model.sigma_tex)
        sq = r * r
        return EnergyBreakdown(
            e_img=float(sq[:n_img].sum()),
            e_ldmks=float(sq[n_img : n_img + N_LANDMARKS].sum()),
            e_stats=float(sq[n_img + N_LANDMARKS : n_img + N_LANDMARKS + n_stats].sum()),
            e_pose=float(sq[-1]),
            foreground=foreground,
        )

    # ------------------------------------------------------------------
    # Public API
    # ------------------------------------------------------------------

    def evaluate(self, params: ParameterVector) -> Evaluation:
        """Render at *params* and assemble r and the energy breakdown."""
        raster = self.render(params)
        pixels = np.flatnonzero(raster.mask)
        n = len(pixels)
        if n == 0:
            raise EmptyForegroundError("render has no foreground pixels; the model is off-screen")
        img = self._pixel_rows(raster, pixels, n)
        ldmk, synth = self._landmark_rows(params, n)
        r = np.concatenate([img, ldmk, self._prior_rows(params)])
        return Evaluation(
            params=params,
            raster=raster,
            pixels=pixels,
            residuals=r,
            landmarks=synth,
            energy=self._breakdown(r, n),
        )

    def residuals_at(self, params: ParameterVector, reference: Evaluation) -> np.ndarray:
        """r(Φ) linearized on the rows and normalization of *reference*."""
        raster = self.render(params)
        n = reference.foreground
        img = self._pixel_rows(raster, reference.pixels, n)
        lost = raster.mask.reshape(-1)[reference.pixels] == 0
        if lost.any():
            img = np.where(lost, reference.residuals[:n], img)
        ldmk, _ = self._landmark_rows(params, n)
        return np.concatenate([img, ldmk, self._prior_rows(params)])

    def energy(self, params: ParameterVector) -> EnergyBreakdown:
        return self.evaluate(params).energy


def residuals(
    params: ParameterVector,
    observation: Observation,
    camera: Camera,
    model: EyeRegionModel,
    weights: EnergyWeights | None = None,
    *,
    render_options: RenderOptions | None = None,
) -> np.ndarray:
    """Convenience wrapper: r(Φ) for a single evaluation."""
    objective = Objective(model, observation, camera, weights=weights, render_options=render_options)
    return objective.evaluate(params).residuals
