# tests/test_assets.py
"""
Unit tests for the asset directory format and its validation.

Tests verify save/load round trips, deterministic generation, and the
AssetFormatError raised for missing or inconsistent files.
"""

from __future__ import annotations

import dataclasses
import shutil

import numpy as np
import pytest
import yaml

from eyewarp.exceptions import AssetFormatError, InputError
from eyewarp.model.assets import MANIFEST_NAME, EyeRegionModel
from eyewarp.model.params import ParameterVector
from eyewarp.model.scene import landmarks_3d
from eyewarp.testkit.synthetic import SyntheticModelSpec, build_model, generate_model


def make_copy(asset_dir, tmp_path):
    target = tmp_path / "asset"
    shutil.copytree(asset_dir, target)
    return target


def edit_manifest(root, **updates):
    path = root / MANIFEST_NAME
    manifest = yaml.safe_load(path.read_text())
    manifest.update(updates)
    path.write_text(yaml.safe_dump(manifest, sort_keys=False))


class TestRoundTrip:
    def test_load_matches_build(self, model, synthetic_spec):
        built = build_model(synthetic_spec)
        np.testing.assert_allclose(model.mu_geo, built.mu_geo, rtol=1e-6, atol=1e-5)
        np.testing.assert_allclose(model.U, built.U, atol=1e-6)
        np.testing.assert_allclose(model.sigma_geo, built.sigma_geo, rtol=1e-6)
        np.testing.assert_array_equal(model.topology, built.topology)
        np.testing.assert_array_equal(model.lid_margin_upper, built.lid_margin_upper)
        assert model.corners == built.corners
        assert model.texture_size == built.texture_size

    def test_textures_survive_16_bit_encoding(self, model, synthetic_spec):
        built = build_model(synthetic_spec)
        np.testing.assert_allclose(model.mu_tex, built.mu_tex, atol=1.0 / 65535 + 1e-9)

    def test_landmark_map_shape(self, model):
        assert model.landmark_map.shape == (25, 458)
        np.testing.assert_allclose(np.asarray(model.landmark_map.sum(axis=1)).ravel(), 1.0, atol=1e-14)

    def test_loaded_landmarks_follow_translation(self, model):
        rest = ParameterVector()
        moved = rest.replace(theta_T=(rest.theta_T[0] + 7.0, rest.theta_T[1] - 3.0, rest.theta_T[2] - 20.0))
        shift = landmarks_3d(moved, model) - landmarks_3d(rest, model)
        np.testing.assert_allclose(shift, np.broadcast_to([7.0, -3.0, -20.0], shift.shape), atol=1e-9)

    def test_loaded_arrays_are_read_only(self, model):
        with pytest.raises(ValueError):
            model.mu_geo[0, 0] = 1.0

    def test_same_seed_gives_identical_bytes(self, tmp_path):
        spec = SyntheticModelSpec(seed=11, texture_size=32)
        a = generate_model(spec, tmp_path / "a")
        b = generate_model(spec, tmp_path / "b")
        names = sorted(p.name for p in a.iterdir())
        assert names == sorted(p.name for p in b.iterdir())
        for name in names:
            assert (a / name).read_bytes() == (b / name).read_bytes(), name

    def test_different_seeds_differ(self):
        a = build_model(SyntheticModelSpec(seed=1, texture_size=16))
        b = build_model(SyntheticModelSpec(seed=2, texture_size=16))
        assert not np.allclose(a.U, b.U)


class TestValidation:
    def test_missing_manifest(self, tmp_path):
        with pytest.raises(AssetFormatError) as info:
            EyeRegionModel.load(tmp_path)
        assert isinstance(info.value, InputError)
        assert info.value.exit_code == 1

    def test_wrong_schema_version(self, asset_dir, tmp_path):
        root = make_copy(asset_dir, tmp_path)
        edit_manifest(root, schema_version=999)
        with pytest.raises(AssetFormatError):
            EyeRegionModel.load(root)

    def test_missing_section(self, asset_dir, tmp_path):
        root = make_copy(asset_dir, tmp_path)
        path = root / MANIFEST_NAME
        manifest = yaml.safe_load(path.read_text())
        del manifest["eyelid"]
        path.write_text(yaml.safe_dump(manifest))
        with pytest.raises(AssetFormatError):
            EyeRegionModel.load(root)

    def test_truncated_array(self, asset_dir, tmp_path):
        root = make_copy(asset_dir, tmp_path)
        target = root / "mu_geo.f32"
        target.write_bytes(target.read_bytes()[:-4])
        with pytest.raises(AssetFormatError):
            EyeRegionModel.load(root)

    def test_missing_array_file(self, asset_dir, tmp_path):
        root = make_copy(asset_dir, tmp_path)
        (root / "topology.u32").unlink()
        with pytest.raises(AssetFormatError):
            EyeRegionModel.load(root)

    def test_non_unit_shape_basis(self):
        built = build_model(SyntheticModelSpec(seed=0, texture_size=16))
        with pytest.raises(AssetFormatError):
            dataclasses.replace(built, U=built.U * 2.0)

    def test_zero_sigma(self):
        built = build_model(SyntheticModelSpec(seed=0, texture_size=16))
        sigma = built.sigma_geo.copy()
        sigma[3] = 0.0
        with pytest.raises(AssetFormatError):
            dataclasses.replace(built, sigma_geo=sigma)
