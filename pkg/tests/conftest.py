# tests/conftest.py
"""
Shared pytest fixtures for eyewarp tests.
"""

from __future__ import annotations

import pytest

from eyewarp.model.assets import EyeRegionModel
from eyewarp.model.params import ParameterVector
from eyewarp.render.camera import Camera, default_camera
from eyewarp.testkit.synthetic import SyntheticModelSpec, generate_model


@pytest.fixture(scope="session")
def synthetic_spec() -> SyntheticModelSpec:
    return SyntheticModelSpec(seed=7, texture_size=64)


@pytest.fixture(scope="session")
def asset_dir(tmp_path_factory, synthetic_spec):
    """A synthetic asset written once per session."""
    return generate_model(synthetic_spec, tmp_path_factory.mktemp("asset"))


@pytest.fixture(scope="session")
def model(asset_dir) -> EyeRegionModel:
    return EyeRegionModel.load(asset_dir)


@pytest.fixture(scope="session")
def camera() -> Camera:
    return default_camera(64, 48)


@pytest.fixture
def params() -> ParameterVector:
    return ParameterVector()
