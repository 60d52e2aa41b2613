# tests/test_config.py
"""
Unit tests for RunConfig and its sub-configs.

Tests verify path resolution in from_dict, ${VAR} interpolation in
from_yaml, from_env, validation errors surfacing as ConfigError, camera
defaults derived from the frame size, and EYEWARP_* runtime settings.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from eyewarp.config import CameraConfig, FitConfig, RunConfig, RuntimeSettings, StepSizes
from eyewarp.constants import FOCAL_PER_WIDTH, STEP_MM
from eyewarp.exceptions import ConfigError
from eyewarp.model.params import FIELD_SLICES, PARAM_COUNT
from eyewarp.models import RedirectMode


def make_yaml(tmp_path: Path, text: str) -> Path:
    path = tmp_path / "run.yaml"
    path.write_text(text)
    return path


class TestFromDict:
    def test_defaults(self):
        config = RunConfig.from_dict({"assets": "model"})
        assert config.assets == Path("model")
        assert config.output == Path("out")
        assert config.params_path == Path("out") / "phi.jsonl"
        assert config.redirect.mode == RedirectMode.FULL

    def test_relative_paths_resolve_against_base_dir(self, tmp_path):
        config = RunConfig.from_dict(
            {"assets": "model", "frames": "in/*.png", "output": "/abs/out"}, base_dir=tmp_path
        )
        assert config.assets == tmp_path / "model"
        assert config.frames == str(tmp_path / "in/*.png")
        assert config.output == Path("/abs/out")

    def test_kwargs_override(self):
        config = RunConfig.from_dict({"assets": "a"}, output="elsewhere")
        assert config.output == Path("elsewhere")

    def test_missing_assets(self):
        with pytest.raises(ConfigError):
            RunConfig.from_dict({})

    def test_unknown_mask_field(self):
        with pytest.raises(ConfigError):
            RunConfig.from_dict({"assets": "a", "fit": {"mask": ["theta_nope"]}})

    def test_negative_weight(self):
        with pytest.raises(ConfigError):
            RunConfig.from_dict({"assets": "a", "weights": {"ldmks": -1.0}})

    def test_explicit_params_path(self):
        config = RunConfig.from_dict({"assets": "a", "params": "fits.jsonl"})
        assert config.params_path == Path("fits.jsonl")


class TestCheckPaths:
    def test_missing_field(self, tmp_path):
        config = RunConfig.from_dict({"assets": str(tmp_path)})
        with pytest.raises(ConfigError, match="landmarks"):
            config.check_paths("assets", "landmarks")

    def test_missing_path(self, tmp_path):
        config = RunConfig.from_dict({"assets": str(tmp_path / "nowhere")})
        with pytest.raises(ConfigError, match="missing path"):
            config.check_paths("assets")

    def test_existing_paths(self, tmp_path):
        RunConfig.from_dict({"assets": str(tmp_path)}).check_paths("assets")


class TestFromYaml:
    def test_env_interpolation(self, tmp_path, monkeypatch):
        monkeypatch.setenv("EYEWARP_TEST_ASSETS", str(tmp_path / "model"))
        path = make_yaml(
            tmp_path,
            'assets: "${EYEWARP_TEST_ASSETS}"\n'
            "output: results\n"
            "redirect:\n"
            "  mode: eyeballs\n"
            "fit:\n"
            "  max_iterations: 5\n",
        )
        config = RunConfig.from_yaml(path)
        assert config.assets == tmp_path / "model"
        assert config.output == tmp_path.resolve() / "results"
        assert config.redirect.mode == RedirectMode.EYEBALLS
        assert config.fit.max_iterations == 5

    def test_unset_env_var(self, tmp_path, monkeypatch):
        monkeypatch.delenv("EYEWARP_TEST_UNSET", raising=False)
        path = make_yaml(tmp_path, 'assets: "${EYEWARP_TEST_UNSET}"\n')
        with pytest.raises(ConfigError, match="EYEWARP_TEST_UNSET"):
            RunConfig.from_yaml(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            RunConfig.from_yaml(tmp_path / "absent.yaml")

    def test_top_level_must_be_mapping(self, tmp_path):
        with pytest.raises(ConfigError):
            RunConfig.from_yaml(make_yaml(tmp_path, "- just\n- a list\n"))

    def test_invalid_yaml(self, tmp_path):
        with pytest.raises(ConfigError):
            RunConfig.from_yaml(make_yaml(tmp_path, "assets: [unclosed\n"))


class TestFromEnv:
    def test_reads_variables(self, monkeypatch):
        monkeypatch.setenv("EYEWARP_ASSETS", "/data/model")
        monkeypatch.setenv("EYEWARP_OUTPUT", "/data/out")
        monkeypatch.delenv("EYEWARP_FRAMES", raising=False)
        monkeypatch.delenv("EYEWARP_LANDMARKS", raising=False)
        config = RunConfig.from_env()
        assert config.assets == Path("/data/model")
        assert config.output == Path("/data/out")
        assert config.frames is None


class TestSubConfigs:
    def test_camera_defaults_from_size(self):
        camera = CameraConfig().for_size(64, 48)
        assert camera.fx == camera.fy == pytest.approx(FOCAL_PER_WIDTH * 64)
        assert (camera.cx, camera.cy) == (32.0, 24.0)
        assert camera.shape == (48, 64)

    def test_camera_overrides(self):
        camera = CameraConfig(fx=100.0, cx=10.0).for_size(64, 48)
        assert camera.fy == 100.0
        assert camera.cx == 10.0 and camera.cy == 24.0

    def test_step_sizes_cover_every_parameter(self):
        steps = StepSizes().as_array()
        assert steps.shape == (PARAM_COUNT,)
        assert np.all(steps > 0)
        np.testing.assert_array_equal(steps[FIELD_SLICES["theta_T"]], STEP_MM)

    def test_fit_config_bounds(self):
        with pytest.raises(ValueError):
            FitConfig(max_iterations=0)
        with pytest.raises(ValueError):
            FitConfig(eta_initial=1.5)


class TestRuntimeSettings:
    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("EYEWARP_THREADS", "3")
        monkeypatch.setenv("EYEWARP_LOG_LEVEL", "debug")
        settings = RuntimeSettings()
        assert settings.threads == 3
        assert settings.log_level == "DEBUG"

    def test_bad_log_level(self, monkeypatch):
        monkeypatch.setenv("EYEWARP_LOG_LEVEL", "chatty")
        with pytest.raises(ValueError):
            RuntimeSettings()
