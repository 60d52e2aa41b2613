# tests/test_rasterizer.py
"""
Unit tests for the rasterizer, z-buffer resolve and the scene renderer.

Tests verify coverage under the fill rule, nearest-wins and tie-breaking,
agreement with the brute-force depth oracle, and the Raster / FlowField
contracts of render() and render_attributes().
"""

from __future__ import annotations

import numpy as np
import pytest

from eyewarp.config import RenderOptions
from eyewarp.exceptions import BehindCameraError, EmptyImageError, MissingAttributeError
from eyewarp.model.scene import PartId, pose_scene
from eyewarp.render.camera import Camera, project
from eyewarp.render.raster import interpolate, rasterize, resolve
from eyewarp.render.renderer import part_mask, render, render_attributes
from eyewarp.testkit.oracles import oracle_depth


@pytest.fixture
def square_camera() -> Camera:
    # screen x = 16 + x at z = -100
    return Camera(fx=100.0, fy=100.0, cx=16.0, cy=16.0, width=32, height=32)


def make_quad(lo: float, hi: float, z: float) -> tuple[np.ndarray, np.ndarray]:
    s = -z / 100.0
    verts = np.array([[lo, lo, z], [hi, lo, z], [hi, hi, z], [lo, hi, z]]) * np.array([s, s, 1.0])
    faces = np.array([[0, 1, 2], [0, 2, 3]])
    return verts, faces


def make_triangle(z: float) -> tuple[np.ndarray, np.ndarray]:
    s = -z / 100.0
    verts = np.array([[-10.0, -10.0, z], [10.0, -10.0, z], [0.0, 10.0, z]]) * np.array([s, s, 1.0])
    return verts, np.array([[0, 1, 2]])


class TestProjection:
    def test_centre_projects_to_principal_point(self, square_camera):
        np.testing.assert_allclose(project(np.array([0.0, 0.0, -100.0]), square_camera), [16.0, 16.0])

    def test_behind_camera(self, square_camera):
        with pytest.raises(BehindCameraError):
            project(np.array([[0.0, 0.0, 5.0]]), square_camera)

    def test_pixel_rays_are_unit(self, camera):
        rays = camera.pixel_rays()
        assert rays.shape == (48, 64, 3)
        np.testing.assert_allclose(np.linalg.norm(rays, axis=-1), 1.0)
        assert np.all(rays[..., 2] < 0)

    def test_scaled_keeps_field_of_view(self, camera):
        big = camera.scaled(2.0)
        assert big.shape == (96, 128)
        assert big.fx / big.width == pytest.approx(camera.fx / camera.width)


class TestRasterize:
    def test_shared_edge_covered_once(self, square_camera):
        verts, faces = make_quad(-12.0, -4.0, -100.0)
        frags = rasterize(verts, faces, square_camera)
        assert len(frags) == 64
        assert len(np.unique(frags.pixel)) == 64
        cols, rows = frags.pixel % 32, frags.pixel // 32
        assert cols.min() == 4 and cols.max() == 11
        assert rows.min() == 4 and rows.max() == 11

    def test_winding_does_not_matter(self, square_camera):
        verts, faces = make_quad(-12.0, -4.0, -100.0)
        a = rasterize(verts, faces, square_camera)
        b = rasterize(verts, faces[:, ::-1], square_camera)
        assert sorted(a.pixel) == sorted(b.pixel)

    def test_barycentrics_reproduce_positions(self, square_camera):
        verts, faces = make_triangle(-150.0)
        frags = rasterize(verts, faces, square_camera)
        assert len(frags) > 0
        np.testing.assert_allclose(frags.bary.sum(axis=1), 1.0)
        points = interpolate(verts, faces, frags.face, frags.bary)
        np.testing.assert_allclose(-points[:, 2], frags.depth)

    def test_behind_camera_skipped(self, square_camera):
        verts, faces = make_triangle(-100.0)
        verts[0, 2] = 10.0
        assert len(rasterize(verts, faces, square_camera)) == 0

    def test_empty_inputs(self, square_camera):
        assert len(rasterize(np.zeros((0, 3)), np.zeros((0, 3), dtype=int), square_camera)) == 0


class TestResolve:
    def test_nearest_wins_in_either_order(self, square_camera):
        near = rasterize(*make_triangle(-100.0), square_camera)
        far = rasterize(*make_triangle(-200.0), square_camera)
        for order, near_index in (([near, far], 0), ([far, near], 1)):
            hits = resolve(order)
            assert np.all(hits.source == near_index)
            np.testing.assert_allclose(hits.depth, 100.0)

    def test_depth_tie_goes_to_earlier_mesh(self, square_camera):
        frags = rasterize(*make_triangle(-100.0), square_camera)
        hits = resolve([frags, frags])
        assert np.all(hits.source == 0)
        assert len(hits.pixel) == len(np.unique(frags.pixel))

    def test_resolve_nothing(self):
        assert len(resolve([]).pixel) == 0


class TestRender:
    def test_depth_matches_oracle(self, model, camera, params):
        scene = pose_scene(params, model)
        raster = render(scene, camera, options=RenderOptions(subdivide=False))
        reference = oracle_depth([(m.vertices, m.faces) for m in scene.meshes], camera)
        covered = np.isfinite(raster.depth)
        assert covered.any()
        assert not np.any(covered & ~np.isfinite(reference))
        np.testing.assert_allclose(raster.depth[covered], reference[covered], rtol=1e-9)

    def test_raster_contract(self, model, camera, params):
        raster = render(pose_scene(params, model), camera)
        assert raster.color.shape == (48, 64, 3)
        assert raster.color.min() >= 0.0 and raster.color.max() <= 1.0
        parts = set(np.unique(raster.mask)) - {0}
        assert parts == {int(p) for p in PartId if p != PartId.BACKGROUND}
        assert np.all(np.isinf(raster.depth[raster.mask == 0]))
        assert np.all(raster.depth[raster.mask != 0] > 0)
        assert np.all(raster.color[raster.mask == 0] == 0)

    def test_part_mask(self, model, camera, params):
        raster = render(pose_scene(params, model), camera)
        eyes = part_mask(raster, (PartId.EYE_LEFT, PartId.EYE_RIGHT))
        assert eyes.any()
        assert not np.any(eyes & (raster.mask == int(PartId.FACE_LEFT)))

    def test_render_is_deterministic(self, model, camera, params):
        scene = pose_scene(params, model, reflection_map=1)
        a = render(scene, camera)
        b = render(scene, camera)
        np.testing.assert_array_equal(a.color, b.color)
        np.testing.assert_array_equal(a.mask, b.mask)

    def test_empty_image(self, model, params):
        empty = Camera(fx=1.0, fy=1.0, cx=0.0, cy=0.0, width=0, height=0)
        with pytest.raises(EmptyImageError):
            render(pose_scene(params, model), empty)


class TestRenderAttributes:
    def test_constant_attribute(self, model, camera, params):
        scene = pose_scene(params, model).with_face_attribute("flow", np.ones((458, 2)))
        field = render_attributes(scene, camera)
        assert field.coverage.any()
        np.testing.assert_allclose(field.flow[field.coverage], 1.0)
        assert np.all(field.flow[~field.coverage] == 0)

    @pytest.mark.parametrize("subdivide", [True, False])
    def test_coverage_matches_render(self, model, camera, params, subdivide):
        options = RenderOptions(subdivide=subdivide)
        scene = pose_scene(params, model).with_face_attribute("flow", np.ones((458, 2)))
        field = render_attributes(scene, camera, options=options)
        raster = render(scene, camera, options=options)
        np.testing.assert_array_equal(field.coverage, part_mask(raster, (PartId.FACE_LEFT, PartId.FACE_RIGHT)))
        assert not np.any(field.coverage & part_mask(raster, (PartId.EYE_LEFT, PartId.EYE_RIGHT)))

    def test_default_refinement_matches_render(self, model, camera, params):
        scene = pose_scene(params, model).with_face_attribute("flow", np.ones((458, 2)))
        np.testing.assert_array_equal(
            render_attributes(scene, camera).coverage,
            part_mask(render(scene, camera), (PartId.FACE_LEFT, PartId.FACE_RIGHT)),
        )

    def test_missing_attribute(self, model, camera, params):
        with pytest.raises(MissingAttributeError):
            render_attributes(pose_scene(params, model), camera, "flow")
