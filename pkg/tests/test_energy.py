# tests/test_energy.py
"""
Unit tests for the energy terms and the residual Objective.

Tests verify the robust clamp, the prior terms, observation validation, a
zero residual at the rendering parameters, and the residual row layout with
‖r‖² = E.
"""

from __future__ import annotations

import numpy as np
import pytest

from eyewarp.config import EnergyWeights, RenderOptions
from eyewarp.energy.objective import Objective, residuals
from eyewarp.energy.terms import Observation, e_img, e_ldmks, e_pose, e_stats, robust, synth_landmarks
from eyewarp.exceptions import EmptyForegroundError, InputError
from eyewarp.model.params import ParameterVector
from eyewarp.model.scene import pose_scene
from eyewarp.render.raster import Raster
from eyewarp.render.renderer import render

FAST = RenderOptions(subdivide=False)


def make_observation(model, camera, truth: ParameterVector) -> Observation:
    image = render(pose_scene(truth, model), camera, options=FAST).color
    return Observation(image, synth_landmarks(truth, model, camera))


def make_objective(model, camera, truth=None, **weights) -> Objective:
    truth = truth or ParameterVector()
    return Objective(
        model,
        make_observation(model, camera, truth),
        camera,
        weights=EnergyWeights(**weights),
        render_options=FAST,
    )


class TestTerms:
    def test_robust_clamps_at_root_t(self):
        np.testing.assert_allclose(robust(np.array([0.1, 0.5, 2.0]), 0.09), [0.1, 0.3, 0.3])

    def test_pose_prior(self):
        assert e_pose(0.2, 0.1, 0.1) == pytest.approx(0.001)
        assert e_pose(0.3, 0.3) == 0.0

    def test_stats_prior(self):
        assert e_stats(np.ones(16), np.ones(8), 0.01, 0.01) == pytest.approx(0.24)

    def test_image_term_clamps_saturated_pixels(self):
        color = np.full((4, 4, 3), 0.5)
        mask = np.zeros((4, 4), dtype=np.uint8)
        mask[:2] = 1
        raster = Raster(color=color, mask=mask, depth=np.where(mask > 0, 1.0, np.inf))
        observed = color.copy()
        observed[0, :3] += 0.4  # |d| ≈ 0.69 > √0.09
        observed[0, 3, 0] += 0.1
        observed[1, :, 0] -= 0.1
        observed[3] = 0.0  # background
        value, rho = e_img(observed, raster, robust_t=0.09)
        assert len(rho) == 8
        np.testing.assert_allclose(rho[:3], 0.3)
        assert value == pytest.approx((3 * 0.09 + 5 * 0.01) / 8)

    def test_image_term_below_clamp(self):
        color = np.full((3, 3, 3), 0.4)
        raster = Raster(color=color, mask=np.ones((3, 3), dtype=np.uint8), depth=np.ones((3, 3)))
        value, _ = e_img(color + np.array([0.1, 0.2, 0.0]), raster)
        assert value == pytest.approx(0.05)

    def test_image_term_needs_foreground(self):
        raster = Raster(color=np.zeros((2, 2, 3)), mask=np.zeros((2, 2), dtype=np.uint8), depth=np.full((2, 2), np.inf))
        with pytest.raises(EmptyForegroundError):
            e_img(np.zeros((2, 2, 3)), raster)

    def test_landmarks_normalized_by_foreground(self):
        obs = np.zeros((25, 2))
        syn = np.ones((25, 2))
        assert e_ldmks(obs, syn, 100, 20.0) == pytest.approx(20.0 * 50 / 100)

    def test_landmarks_need_foreground(self):
        with pytest.raises(EmptyForegroundError):
            e_ldmks(np.zeros((25, 2)), np.zeros((25, 2)), 0)


class TestObservation:
    def test_grey_image_rejected(self):
        with pytest.raises(InputError):
            Observation(np.zeros((4, 4)), np.zeros((25, 2)))

    def test_landmark_count(self):
        with pytest.raises(InputError):
            Observation(np.zeros((4, 4, 3)), np.zeros((24, 2)))

    def test_non_finite_landmarks(self):
        lm = np.zeros((25, 2))
        lm[3, 1] = np.nan
        with pytest.raises(InputError):
            Observation(np.zeros((4, 4, 3)), lm)

    def test_bad_3d_landmarks(self):
        with pytest.raises(InputError):
            Observation(np.zeros((4, 4, 3)), np.zeros((25, 2)), np.zeros((25, 2)))


class TestObjective:
    def test_zero_at_truth(self, model, camera):
        objective = make_objective(model, camera)
        evaluation = objective.evaluate(ParameterVector())
        assert evaluation.energy.total == 0.0
        assert evaluation.foreground > 0

    def test_row_layout(self, model, camera):
        objective = make_objective(model, camera)
        p = ParameterVector.create(theta_p=0.05, beta_face=(0.5,) + (0.0,) * 15)
        evaluation = objective.evaluate(p)
        r = evaluation.residuals
        assert len(r) == evaluation.foreground + 25 + 16 + 8 + 1
        assert float(r @ r) == pytest.approx(evaluation.energy.total)
        # first shape row, last pose row
        assert r[evaluation.foreground + 25] == pytest.approx(np.sqrt(0.01) * 0.5)
        assert r[-1] == pytest.approx(np.sqrt(0.1) * (0.0 - 0.05))

    def test_perturbation_costs_energy(self, model, camera):
        objective = make_objective(model, camera)
        energy = objective.energy(ParameterVector.create(theta_p=0.1))
        assert energy.e_img > 0
        assert energy.e_ldmks == 0
        assert energy.e_pose == pytest.approx(0.1 * 0.01)

    def test_image_weight_zero_drops_photometric_term(self, model, camera):
        objective = make_objective(model, camera, image=0.0)
        assert objective.energy(ParameterVector.create(theta_p=0.1)).e_img == 0.0

    def test_residuals_at_reference_match(self, model, camera):
        objective = make_objective(model, camera)
        reference = objective.evaluate(ParameterVector.create(theta_y=0.05))
        np.testing.assert_array_equal(objective.residuals_at(reference.params, reference), reference.residuals)

    def test_linearized_rows_keep_reference_length(self, model, camera):
        objective = make_objective(model, camera)
        reference = objective.evaluate(ParameterVector())
        moved = objective.residuals_at(ParameterVector.create(theta_T=(3.0, 0.0, -500.0)), reference)
        assert moved.shape == reference.residuals.shape

    def test_convenience_wrapper(self, model, camera):
        obs = make_observation(model, camera, ParameterVector())
        r = residuals(ParameterVector(), obs, camera, model, render_options=FAST)
        assert not np.any(r)

    def test_off_screen_model(self, model, camera):
        objective = make_objective(model, camera)
        with pytest.raises(EmptyForegroundError):
            objective.evaluate(ParameterVector.create(theta_T=(5000.0, 0.0, -500.0)))

    def test_camera_mismatch(self, model, camera):
        obs = Observation(np.zeros((10, 10, 3)), np.zeros((25, 2)))
        with pytest.raises(ValueError):
            Objective(model, obs, camera)
