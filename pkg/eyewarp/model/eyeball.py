# eyewarp/model/eyeball.py
"""
Eyeball geometry: a sclera sphere with a smaller cornea sphere cap.

Local frame: eyeball center at the origin, optical axis +z. The cornea
sphere is centered at (0, 0, cornea_offset); the two spheres meet in the
limbus circle of radius limbus_radius on the iris plane z = iris_plane_z.

Texture coordinates are an azimuthal map of the polar angle φ from the
optical axis, uv = 0.5 + (φ/π)(cos ψ, sin ψ); the iris occupies
φ/π < LIMBUS_RHO.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from ..constants import (
    CORNEA_RADIUS,
    EYEBALL_SEGMENTS,
    IRIS_SCALE_RANGE,
    LIMBUS_RADIUS,
    SCLERA_RADIUS,
)
from ..exceptions import GuardRangeError, InvalidParameters
from .assets import EyeballAsset, EyeRegionModel

CORNEA_RINGS = 4
SCLERA_RING_STEP_DEG = 15.0


@dataclass(frozen=True, eq=False)
class EyeballMesh:
    """One eyeball instance in its local frame with its tinted texture."""

    vertices: np.ndarray
    faces: np.ndarray
    uv: np.ndarray
    texture: np.ndarray
    iris_scale: float
    asset: EyeballAsset


def polar_uv(directions: np.ndarray) -> np.ndarray:
    """Eyeball uv of local-frame directions (..., 3)."""
    d = np.asarray(directions, dtype=np.float64)
    r = np.linalg.norm(d, axis=-1)
    phi = np.arccos(np.clip(d[..., 2] / np.maximum(r, 1e-300), -1.0, 1.0))
    psi = np.arctan2(d[..., 1], d[..., 0])
    rho = phi / np.pi
    return np.stack([0.5 + rho * np.cos(psi), 0.5 + rho * np.sin(psi)], axis=-1)


def tessellate_eyeball(
    segments: int = EYEBALL_SEGMENTS,
    *,
    sclera_radius: float = SCLERA_RADIUS,
    cornea_radius: float = CORNEA_RADIUS,
    limbus_radius: float = LIMBUS_RADIUS,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Rest tessellation: (vertices, faces, uv, iris_boundary).

    Rings run from the cornea apex through the limbus (the iris boundary) to
    the back pole; faces are wound outward.
    """
    offset = np.sqrt(sclera_radius**2 - limbus_radius**2) - np.sqrt(cornea_radius**2 - limbus_radius**2)
    psi = 2.0 * np.pi * np.arange(segments) / segments
    gamma_limbus = np.arcsin(limbus_radius / cornea_radius)

    rings: list[np.ndarray] = []
    for i in range(1, CORNEA_RINGS + 1):
        g = gamma_limbus * i / CORNEA_RINGS
        rings.append(
            np.stack(
                [
                    cornea_radius * np.sin(g) * np.cos(psi),
                    cornea_radius * np.sin(g) * np.sin(psi),
                    np.full(segments, offset + cornea_radius * np.cos(g)),
                ],
                axis=1,
            )
        )
    limbus_phi = np.degrees(np.arcsin(limbus_radius / sclera_radius))
    for phi_deg in np.arange(limbus_phi + SCLERA_RING_STEP_DEG, 180.0 - 1e-9, SCLERA_RING_STEP_DEG):
        phi = np.radians(phi_deg)
        rings.append(
            np.stack(
                [
                    sclera_radius * np.sin(phi) * np.cos(psi),
                    sclera_radius * np.sin(phi) * np.sin(psi),
                    np.full(segments, sclera_radius * np.cos(phi)),
                ],
                axis=1,
            )
        )
    apex = np.array([[0.0, 0.0, offset + cornea_radius]])
    pole = np.array([[0.0, 0.0, -sclera_radius]])
    vertices = np.concatenate([apex, *rings, pole])
    pole_id = len(vertices) - 1

    def ring_ids(k: int) -> np.ndarray:
        return 1 + k * segments + np.arange(segments)

    nxt = np.roll(np.arange(segments), -1)
    faces: list[np.ndarray] = []
    first = ring_ids(0)
    faces.append(np.stack([np.zeros(segments, dtype=np.int64), first, first[nxt]], axis=1))
    for k in range(len(rings) - 1):
        a, b = ring_ids(k), ring_ids(k + 1)
        faces.append(np.stack([a, b, b[nxt]], axis=1))
        faces.append(np.stack([a, b[nxt], a[nxt]], axis=1))
    last = ring_ids(len(rings) - 1)
    faces.append(np.stack([last, np.full(segments, pole_id), last[nxt]], axis=1))
    tris = np.concatenate(faces).astype(np.int64)

    # wind outward
    p = vertices[tris]
    normal = np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
    inward = np.einsum("ij,ij->i", normal, p.mean(axis=1)) < 0
    tris[inward] = tris[inward][:, [0, 2, 1]]

    uv = polar_uv(vertices)
    iris_boundary = ring_ids(CORNEA_RINGS - 1)
    return vertices, tris, uv, iris_boundary


def build_eyeball(
    model: EyeRegionModel,
    beta_iris: float,
    tau_iris: Sequence[float],
    tau_tint: Sequence[float],
) -> EyeballMesh:
    """
    Instance the eyeball: scale the iris boundary about the pupil axis by
    *beta_iris*, multiply iris texels by *tau_iris* and sclera texels by
    *tau_tint*.
    """
    lo, hi = IRIS_SCALE_RANGE
    if not lo < beta_iris < hi:
        raise GuardRangeError("beta_iris", beta_iris, lo, hi)
    iris = np.asarray(tau_iris, dtype=np.float64)
    tint = np.asarray(tau_tint, dtype=np.float64)
    if iris.shape != (3,) or tint.shape != (3,):
        raise InvalidParameters("tau_iris and tau_tint need three components each")

    asset = model.eyeball
    vertices = np.array(asset.vertices, dtype=np.float64)
    if beta_iris != 1.0:
        ring = asset.iris_boundary
        vertices[ring, :2] *= beta_iris

    texture = np.asarray(asset.texture)
    if np.any(iris != 1.0) or np.any(tint != 1.0):
        mask = asset.iris_mask[..., None]
        texture = texture * (mask * iris + (1.0 - mask) * tint)
    return EyeballMesh(
        vertices=vertices,
        faces=asset.faces,
        uv=asset.uv,
        texture=texture,
        iris_scale=float(beta_iris),
        asset=asset,
    )

