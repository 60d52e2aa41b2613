# eyewarp/render/envmaps.py
"""
Five procedural low-frequency environment maps for corneal reflections.

Maps are equirectangular RGB arrays: column ↔ longitude atan2(x, z) in
[−π, π), row ↔ latitude asin(−y) from +π/2 (top) to −π/2, in camera space
(y down). Ids: 0 window, 1 ring light, 2 outdoor sky, 3 indoor warm, 4 dark.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.ndimage import gaussian_filter, map_coordinates

from ..constants import N_REFLECTION_MAPS, REFLECTION_MAP_SHAPE
from ..exceptions import InvalidReflectionMap

MAP_NAMES: tuple[str, ...] = ("window", "ring_light", "outdoor_sky", "indoor_warm", "dark")


def _grid(shape: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
    h, w = shape
    lon = (np.arange(w) + 0.5) / w * 2.0 * np.pi - np.pi
    lat = np.pi / 2.0 - (np.arange(h) + 0.5) / h * np.pi
    return np.meshgrid(lon, lat)


def _window(lon: np.ndarray, lat: np.ndarray) -> np.ndarray:
    out = np.empty(lon.shape + (3,))
    out[:] = (0.08, 0.08, 0.1)
    pane = (np.abs(lon - 0.35) < 0.45) & (lat > -0.1) & (lat < 0.6)
    bars = (np.abs(lon - 0.35) < 0.03) | (np.abs(lat - 0.25) < 0.03)
    out[pane & ~bars] = (0.95, 0.97, 1.0)
    return out


def _ring_light(lon: np.ndarray, lat: np.ndarray) -> np.ndarray:
    radius = np.hypot(lon, lat)
    ring = np.exp(-(((radius - 0.35) / 0.08) ** 2))
    out = np.empty(lon.shape + (3,))
    out[:] = (0.15, 0.14, 0.13)
    return out + ring[..., None] * np.array([0.85, 0.85, 0.85])


def _sky(lon: np.ndarray, lat: np.ndarray) -> np.ndarray:
    up = np.clip(np.sin(lat), 0.0, 1.0)[..., None]
    ground = np.array([0.25, 0.22, 0.15])
    horizon = np.array([0.75, 0.82, 0.9])
    zenith = np.array([0.35, 0.55, 0.95])
    sky = horizon + (zenith - horizon) * up
    return np.where((lat > 0)[..., None], sky, ground + 0.1 * np.cos(lon)[..., None])


def _indoor(lon: np.ndarray, lat: np.ndarray) -> np.ndarray:
    lamp = np.exp(-((lon + 0.6) ** 2 + (lat - 0.5) ** 2) / 0.08)
    base = np.array([0.45, 0.33, 0.2]) * (0.6 + 0.4 * np.cos(lat)[..., None])
    return base + lamp[..., None] * np.array([0.5, 0.45, 0.3])


@lru_cache(maxsize=None)
def reflection_map(map_id: int, shape: tuple[int, int] = REFLECTION_MAP_SHAPE) -> np.ndarray:
    """The equirectangular map *map_id*; cached and read-only."""
    if not 0 <= map_id < N_REFLECTION_MAPS:
        raise InvalidReflectionMap(f"reflection map id must be in 0..{N_REFLECTION_MAPS - 1}, got {map_id}")
    lon, lat = _grid(shape)
    if map_id == 4:
        env = np.zeros(lon.shape + (3,))
    else:
        env = (_window, _ring_light, _sky, _indoor)[map_id](lon, lat)
        env = gaussian_filter(env, sigma=(1.0, 1.0, 0.0), mode=("nearest", "wrap", "nearest"))
    env = np.clip(env, 0.0, 1.0)
    env.setflags(write=False)
    return env


def lookup(env: np.ndarray, directions: np.ndarray) -> np.ndarray:
    """Bilinear lookup of unit camera-space *directions* (N, 3)."""
    h, w = env.shape[:2]
    d = np.asarray(directions, dtype=np.float64)
    lon = np.arctan2(d[:, 0], d[:, 2])
    lat = np.arcsin(np.clip(-d[:, 1], -1.0, 1.0))
    col = (lon + np.pi) / (2.0 * np.pi) * w - 0.5
    row = (np.pi / 2.0 - lat) / np.pi * h - 0.5
    coords = np.stack([row, col])
    return np.stack(
        [map_coordinates(env[..., c], coords, order=1, mode="nearest") for c in range(3)],
        axis=-1,
    )
