# tests/test_redirect.py
"""
Unit tests for gaze redirection.

Tests verify reposing rules, vertex and dense eyelid flow, the backward
warp, inward seam compositing that copies every pixel off the eyeballs, and
the NONE / EYEBALLS / FULL modes of redirect_frame().
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from eyewarp.config import RedirectOptions, RenderOptions
from eyewarp.constants import EYELID_GUARD_RAD
from eyewarp.exceptions import GazeTargetError
from eyewarp.model.params import ParameterVector
from eyewarp.model.scene import EYE_PARTS, pose_scene
from eyewarp.models import RedirectMode, RedirectRequest
from eyewarp.redirect.composite import composite, seam_alpha, seam_band
from eyewarp.redirect.flow import eyelid_flow, vertex_flow
from eyewarp.redirect.redirector import redirect_frame, repose
from eyewarp.redirect.warp import warp
from eyewarp.render.raster import Raster
from eyewarp.render.renderer import FlowField, part_mask, render

FAST = RenderOptions(subdivide=False)


def make_disc(h: int = 40, w: int = 40, r: float = 8.0) -> np.ndarray:
    yy, xx = np.mgrid[:h, :w]
    return (yy - h / 2) ** 2 + (xx - w / 2) ** 2 <= r * r


def make_frame(model, camera, params: ParameterVector) -> np.ndarray:
    return render(pose_scene(params, model, reflection_map=0), camera, options=FAST).color


class TestRepose:
    def test_identity_request_returns_same_object(self, model, params):
        request = RedirectRequest.angles(params.theta_p, params.theta_y, params.theta_v)
        assert repose(params, request, model) is params

    def test_lid_follows_pitch_change(self, model):
        params = ParameterVector.create(theta_p=0.05, theta_lid=0.02)
        moved = repose(params, RedirectRequest.angles(0.15, 0.1), model)
        assert moved.theta_p == 0.15
        assert moved.theta_lid == pytest.approx(0.12)
        assert set(params.differing_fields(moved)) <= {"theta_p", "theta_y", "theta_v", "theta_lid"}

    def test_lid_clipped_to_guard(self, model):
        params = ParameterVector.create(theta_lid=0.5)
        moved = repose(params, RedirectRequest.angles(0.5, 0.0), model)
        assert moved.theta_lid == pytest.approx(EYELID_GUARD_RAD)

    def test_target_request(self, model, params):
        moved = repose(params, RedirectRequest.at(0.0, -50.0, 0.0), model)
        assert moved.theta_p > 0
        assert moved.theta_lid == pytest.approx(moved.theta_p)
        assert set(params.differing_fields(moved)) <= {"theta_p", "theta_y", "theta_v", "theta_lid"}

    def test_target_inside_eyeball(self, model, params):
        half = 0.5 * params.theta_iod
        with pytest.raises(GazeTargetError):
            repose(params, RedirectRequest.at(half, 0.0, params.theta_T[2]), model)


class TestFlow:
    def test_no_motion_for_same_pose(self, model, camera, params):
        assert not np.any(vertex_flow(params, params, model, camera))
        assert eyelid_flow(params, params, model, camera).is_zero()

    def test_only_lid_vertices_move(self, model, camera, params):
        moved = repose(params, RedirectRequest.angles(math.radians(10.0), 0.0), model)
        flow = vertex_flow(params, moved, model, camera)
        weights = np.concatenate([model.eyelid_weights, model.eyelid_weights])
        assert not np.any(flow[weights == 0])
        assert np.abs(flow[weights > 0.5]).max() > 0.01

    def test_upward_gaze_lifts_upper_lid(self, model, camera, params):
        moved = repose(params, RedirectRequest.angles(math.radians(10.0), 0.0), model)
        flow = vertex_flow(params, moved, model, camera)
        upper = model.lid_margin_upper[1:-1]
        assert np.all(flow[upper, 1] < 0)

    def test_dense_flow_lives_on_face(self, model, camera, params):
        moved = repose(params, RedirectRequest.angles(math.radians(10.0), math.radians(15.0)), model)
        field = eyelid_flow(params, moved, model, camera)
        assert field.flow.shape == (48, 64, 2)
        assert not np.any(field.flow[~field.coverage])
        assert not field.is_zero()


class TestWarp:
    def test_zero_flow_is_exact_copy(self):
        image = np.random.default_rng(0).uniform(size=(12, 16, 3))
        field = FlowField.zeros(12, 16)
        out = warp(image, field)
        assert out is not image
        np.testing.assert_array_equal(out, image)

    def test_integer_shift(self):
        image = np.random.default_rng(1).integers(0, 256, size=(8, 10, 3)) / 256.0
        flow = np.zeros((8, 10, 2))
        flow[..., 0] = 1.0
        out = warp(image, FlowField(flow=flow, coverage=np.ones((8, 10), dtype=bool)))
        np.testing.assert_array_equal(out[:, 1:], image[:, :-1])
        np.testing.assert_array_equal(out[:, 0], image[:, 0])

    def test_uncovered_pixels_untouched(self):
        image = np.random.default_rng(2).uniform(size=(8, 10, 3))
        flow = np.full((8, 10, 2), 2.5)
        coverage = np.zeros((8, 10), dtype=bool)
        coverage[:4] = True
        out = warp(image, FlowField(flow=flow, coverage=coverage))
        np.testing.assert_array_equal(out[4:], image[4:])

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            warp(np.zeros((4, 4, 3)), FlowField.zeros(5, 5))


class TestComposite:
    def test_band_straddles_boundary(self):
        mask = make_disc()
        band = seam_band(mask, 2.0)
        assert band[20, 20 + 8] and band[20, 20 + 9]
        assert not band[20, 20] and not band[0, 0]

    def test_band_empty_for_trivial_masks(self):
        assert not seam_band(np.zeros((5, 5), dtype=bool)).any()
        assert not seam_band(np.ones((5, 5), dtype=bool)).any()

    def test_alpha_range_and_plateaus(self):
        alpha = seam_alpha(make_disc(), sigma=1.0, band=2.0)
        assert alpha.min() >= 0.0 and alpha.max() <= 1.0
        assert alpha[20, 20] == 1.0
        assert alpha[0, 0] == 0.0
        assert 0.0 < alpha[20, 28] < 1.0

    def test_zero_band_is_hard_mask(self):
        mask = make_disc()
        np.testing.assert_array_equal(seam_alpha(mask, band=0.0), mask.astype(float))

    def test_alpha_is_zero_off_the_mask(self):
        mask = make_disc()
        alpha = seam_alpha(mask, sigma=1.0, band=2.0)
        assert not alpha[~mask].any()
        assert alpha[mask].min() > 0.0

    def test_pixels_off_the_eyes_are_copied(self):
        rng = np.random.default_rng(4)
        base = rng.uniform(size=(40, 40, 3))
        mask = make_disc()
        raster = Raster(
            color=rng.uniform(size=(40, 40, 3)),
            mask=np.where(mask, int(EYE_PARTS[0]), 0).astype(np.uint8),
            depth=np.where(mask, 1.0, np.inf),
        )
        out = composite(base, raster, sigma=1.0, band=2.0)
        np.testing.assert_array_equal(out[~mask], base[~mask])
        lo = np.minimum(base, raster.color) - 1e-12
        hi = np.maximum(base, raster.color) + 1e-12
        assert np.all((out >= lo) & (out <= hi))

    def test_no_eyes_keeps_base(self):
        base = np.random.default_rng(3).uniform(size=(6, 6, 3))
        raster = Raster(color=np.ones((6, 6, 3)), mask=np.zeros((6, 6), dtype=np.uint8), depth=np.full((6, 6), np.inf))
        np.testing.assert_array_equal(composite(base, raster), base)


class TestRedirectFrame:
    def test_none_mode_copies_input(self, model, camera, params):
        image = make_frame(model, camera, params)
        result = redirect_frame(
            image, params, RedirectRequest.angles(0.1, 0.1), model, camera,
            options=RedirectOptions(mode=RedirectMode.NONE),
        )  # fmt: skip
        np.testing.assert_array_equal(result.image, image)
        assert result.image is not image
        assert result.flow is None and result.reflection_map is None
        assert result.params.theta_p == 0.1

    def test_identity_changes_only_the_seam(self, model, camera, params):
        image = make_frame(model, camera, params)
        request = RedirectRequest.angles(params.theta_p, params.theta_y, params.theta_v)
        result = redirect_frame(image, params, request, model, camera, render_options=FAST)
        assert result.reflection_map == 0
        raster = render(pose_scene(params, model), camera, options=FAST)
        band = seam_band(part_mask(raster, EYE_PARTS), RedirectOptions().seam_band)
        np.testing.assert_allclose(result.image[~band], image[~band], atol=1e-12)

    def test_eyeballs_mode_keeps_lids(self, model, camera, params):
        image = make_frame(model, camera, params)
        options = RedirectOptions(mode=RedirectMode.EYEBALLS, select_reflection_map=False)
        result = redirect_frame(
            image, params, RedirectRequest.angles(0.1, 0.0), model, camera,
            options=options, render_options=FAST,
        )  # fmt: skip
        assert result.flow is None
        assert result.params.theta_lid == pytest.approx(0.1)
        shown = render(pose_scene(result.params.replace(theta_lid=0.0), model), camera, options=FAST)
        eyes = part_mask(shown, EYE_PARTS)
        np.testing.assert_array_equal(result.image[~eyes], image[~eyes])

    def test_pure_yaw_full_matches_eyeballs(self, model, camera, params):
        image = make_frame(model, camera, params)
        request = RedirectRequest.angles(params.theta_p, math.radians(12.0))
        out = {
            mode: redirect_frame(
                image, params, request, model, camera,
                options=RedirectOptions(mode=mode, select_reflection_map=False), render_options=FAST,
            )  # fmt: skip
            for mode in (RedirectMode.EYEBALLS, RedirectMode.FULL)
        }
        assert out[RedirectMode.FULL].flow.is_zero()
        np.testing.assert_array_equal(out[RedirectMode.FULL].image, out[RedirectMode.EYEBALLS].image)

    def test_full_mode_moves_eyes_and_lids(self, model, camera, params):
        image = make_frame(model, camera, params)
        options = RedirectOptions(select_reflection_map=False)
        result = redirect_frame(
            image, params, RedirectRequest.angles(math.radians(10.0), math.radians(10.0)), model, camera,
            options=options, render_options=FAST,
        )  # fmt: skip
        assert result.flow is not None and not result.flow.is_zero()
        assert result.image.shape == image.shape
        assert result.image.min() >= -1e-6 and result.image.max() <= 1.0 + 1e-6
        assert np.abs(result.image - image).max() > 0.01
        assert result.elapsed_ms > 0
