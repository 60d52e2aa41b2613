# eyewarp/render/shading.py
"""
Shading helpers: texture lookup, Lambertian lighting, corneal refraction,
eyelid ambient occlusion and reflection-map specular.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import map_coordinates

from ..constants import AO_BAND, AO_MIN, AO_MIN_POINTS, LIMBUS_RHO, SPECULAR_WEIGHT
from ..exceptions import RenderError
from ..model.eyeball import polar_uv
from ..model.scene import EyeballPose, Light
from .envmaps import lookup, reflection_map


def sample_texture(texture: np.ndarray, uv: np.ndarray) -> np.ndarray:
    """Bilinear, clamp-to-edge lookup of an (S, S, 3) texture at uv (N, 2)."""
    h, w = texture.shape[:2]
    uv = np.asarray(uv, dtype=np.float64)
    coords = np.stack([uv[:, 1] * h - 0.5, uv[:, 0] * w - 0.5])
    return np.stack(
        [map_coordinates(texture[..., c], coords, order=1, mode="nearest") for c in range(texture.shape[2])],
        axis=-1,
    )


def lambert(texel: np.ndarray, normals: np.ndarray, light: Light) -> np.ndarray:
    """texel · (ambient + directional · max(0, n·l))."""
    ndotl = np.clip(normals @ light.direction, 0.0, None)
    return texel * (light.ambient + light.directional * ndotl[:, None])


def vertex_normals(vertices: np.ndarray, faces: np.ndarray) -> np.ndarray:
    """Area-weighted unit vertex normals."""
    p = vertices[faces]
    fn = np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
    normals = np.zeros_like(vertices)
    for corner in range(3):
        np.add.at(normals, faces[:, corner], fn)
    length = np.linalg.norm(normals, axis=1, keepdims=True)
    return normals / np.where(length > 0, length, 1.0)


# ---------------------------------------------------------------------------
# Corneal refraction
# ---------------------------------------------------------------------------


def refract(directions: np.ndarray, normals: np.ndarray, ior: float, ior_outside: float = 1.0) -> np.ndarray:
    """
    Snell refraction of unit *directions* at surfaces with unit outward *normals*.

    Raises RenderError on total internal reflection.
    """
    d = np.asarray(directions, dtype=np.float64)
    n = np.asarray(normals, dtype=np.float64)
    eta = ior_outside / ior
    cos_i = -np.einsum("ij,ij->i", n, d)
    k = 1.0 - eta * eta * (1.0 - cos_i * cos_i)
    if np.any(k < 0.0):
        raise RenderError("total internal reflection at the corneal surface")
    return eta * d + (eta * cos_i - np.sqrt(k))[:, None] * n


def reflect(directions: np.ndarray, normals: np.ndarray) -> np.ndarray:
    """Mirror reflection r = d − 2 (d·n) n."""
    d = np.asarray(directions, dtype=np.float64)
    n = np.asarray(normals, dtype=np.float64)
    return d - 2.0 * np.einsum("ij,ij->i", d, n)[:, None] * n


@dataclass(frozen=True)
class CornealSample:
    """Per-ray results of refract_corneal(); invalid rays miss the cornea."""

    valid: np.ndarray
    hit: np.ndarray
    normal: np.ndarray
    refracted: np.ndarray
    iris_point: np.ndarray
    uv: np.ndarray


def refract_corneal(
    origins: np.ndarray,
    directions: np.ndarray,
    *,
    cornea_offset: float,
    cornea_radius: float,
    iris_plane_z: float,
    limbus_radius: float,
    iris_scale: float = 1.0,
    ior: float = 1.376,
) -> CornealSample:
    """
    Trace eyeball-local view rays through the cornea onto the iris plane.

    The ray is intersected with the cornea sphere, refracted once, and
    intersected with the plane z = iris_plane_z. The iris texel is addressed
    radially so that the (scaled) limbus maps to the limbus uv radius.
    """
    o = np.asarray(origins, dtype=np.float64)
    d = np.asarray(directions, dtype=np.float64)
    center = np.array([0.0, 0.0, cornea_offset])
    oc = o - center
    b = np.einsum("ij,ij->i", oc, d)
    c = np.einsum("ij,ij->i", oc, oc) - cornea_radius**2
    disc = b * b - c
    t_hit = -b - np.sqrt(np.maximum(disc, 0.0))
    valid = (disc >= 0.0) & (t_hit > 0.0)
    hit = o + t_hit[:, None] * d
    normal = (hit - center) / cornea_radius
    refracted = np.zeros_like(d)
    if valid.any():
        refracted[valid] = refract(d[valid], normal[valid], ior)
    tz = refracted[:, 2]
    valid &= tz < 0.0
    s = np.where(valid, (iris_plane_z - hit[:, 2]) / np.where(tz < 0.0, tz, -1.0), 0.0)
    iris_point = hit + s[:, None] * refracted
    radius = np.hypot(iris_point[:, 0], iris_point[:, 1])
    psi = np.arctan2(iris_point[:, 1], iris_point[:, 0])
    rho = radius / (limbus_radius * iris_scale) * LIMBUS_RHO
    uv = np.stack([0.5 + rho * np.cos(psi), 0.5 + rho * np.sin(psi)], axis=-1)
    return CornealSample(valid=valid, hit=hit, normal=normal, refracted=refracted, iris_point=iris_point, uv=uv)


# ---------------------------------------------------------------------------
# Eyelid ambient occlusion
# ---------------------------------------------------------------------------


def fit_lid_polynomial(points_uv: np.ndarray) -> np.ndarray | None:
    """Least-squares cubic v = P(u); None when fewer than AO_MIN_POINTS points."""
    pts = np.asarray(points_uv, dtype=np.float64)
    if len(pts) < AO_MIN_POINTS:
        return None
    return np.polyfit(pts[:, 0], pts[:, 1], 3)


def lid_uv(eye: EyeballPose, points: np.ndarray) -> np.ndarray:
    """Camera-space lid points projected to the eyeball's polar uv."""
    return polar_uv(eye.to_local(points))


def ao_from_polynomials(
    uv: np.ndarray,
    upper: np.ndarray | None,
    lower: np.ndarray | None,
    *,
    ao_min: float = AO_MIN,
    band: float = AO_BAND,
) -> np.ndarray:
    """
    Occlusion multiplier in [ao_min, 1] from the uv distance below the upper
    lid curve and above the lower one.
    """
    u, v = uv[:, 0], uv[:, 1]
    dist = np.full(len(uv), np.inf)
    if upper is not None:
        dist = np.minimum(dist, v - np.polyval(upper, u))
    if lower is not None:
        dist = np.minimum(dist, np.polyval(lower, u) - v)
    return ao_min + (1.0 - ao_min) * np.clip(dist / band, 0.0, 1.0)


def eyelid_ao_factor(
    eye: EyeballPose,
    uv: np.ndarray,
    *,
    ao_min: float = AO_MIN,
    band: float = AO_BAND,
) -> np.ndarray:
    """Per-sample occlusion for eyeball surface samples at polar *uv*."""
    upper = fit_lid_polynomial(lid_uv(eye, eye.lid_upper))
    lower = fit_lid_polynomial(lid_uv(eye, eye.lid_lower))
    return ao_from_polynomials(uv, upper, lower, ao_min=ao_min, band=band)


# ---------------------------------------------------------------------------
# Reflection maps
# ---------------------------------------------------------------------------


def apply_reflection_map(
    view_dirs: np.ndarray,
    normals: np.ndarray,
    map_id: int,
    *,
    weight: float = SPECULAR_WEIGHT,
) -> np.ndarray:
    """Specular color delta from the reflected view vector looked up in map *map_id*."""
    env = reflection_map(map_id)
    return weight * lookup(env, reflect(view_dirs, normals))
