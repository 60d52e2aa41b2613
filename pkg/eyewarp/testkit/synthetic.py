# eyewarp/testkit/synthetic.py
"""
Seeded synthetic eye-region asset.

The face part is a parametric lid/orbit surface around an eyeball centred at
the origin: 11 rings of 20 vertices from the lid margin outwards plus a
9-vertex brow cap above the outer ring, 229 vertices and 418 triangles in
all. Ring k, column j sits at angle t_j = 2πj/20 (j = 0 lateral corner,
j = 5 top, j = 10 medial corner, j = 15 bottom). Deformation bases are
random smooth fields made orthonormal by QR.
"""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np
from pydantic import BaseModel, Field

from ..constants import (
    DEFAULT_IOD_MM,
    DEFAULT_TEXTURE_SIZE,
    EYEBALL_SEGMENTS,
    LANDMARK_SEMANTICS,
    LIMBUS_RHO,
    N_FACE_VERTICES,
    N_SHAPE_MODES,
    N_TEXTURE_MODES,
)
from ..model.assets import EyeballAsset, EyeRegionModel
from ..model.eyeball import tessellate_eyeball

logger = logging.getLogger(__name__)

RINGS = 11
COLUMNS = 20
CAP = 9
MARGIN_RADIUS = 13.3
CORNER_ANGLE = np.radians(75.0)
UPPER_LID_ELEVATION = np.radians(22.0)
LOWER_LID_ELEVATION = np.radians(18.0)
LATERAL_CORNER = 0
MEDIAL_CORNER = COLUMNS // 2


class SyntheticModelSpec(BaseModel):
    """Generator settings; equal specs give byte-identical assets."""

    seed: int = Field(default=0, ge=0)
    texture_size: int = Field(default=DEFAULT_TEXTURE_SIZE, ge=16, le=4096)
    eyeball_segments: int = Field(default=EYEBALL_SEGMENTS, ge=8)
    shape_amplitude: float = Field(default=1.0, gt=0.0, description="Scale of σ_geo.")
    texture_amplitude: float = Field(default=1.0, gt=0.0, description="Scale of σ_tex.")
    length_scale: float = Field(default=8.0, gt=0.0, description="Smoothness of shape modes (mm).")


# ---------------------------------------------------------------------------
# Geometry
# ---------------------------------------------------------------------------


def _smoothstep(x: np.ndarray) -> np.ndarray:
    x = np.clip(x, 0.0, 1.0)
    return x * x * (3.0 - 2.0 * x)


def _skin_z(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return MARGIN_RADIUS * np.sqrt(np.maximum(1.0 - (x / 30.0) ** 2 - (y / 26.0) ** 2, 0.04))


def ring_index(k: int, j: int) -> int:
    return k * COLUMNS + j % COLUMNS


def cap_index(j: int) -> int:
    """Brow cap vertex above outer-ring column j (1 ≤ j ≤ 9)."""
    return RINGS * COLUMNS + j - 1


def face_geometry() -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Rest (vertices, faces, uv, ring parameter s) of the right face part."""
    t = 2.0 * np.pi * np.arange(COLUMNS) / COLUMNS
    upper = np.sin(t) > 0
    a = CORNER_ANGLE * np.cos(t)
    e = -np.where(upper, UPPER_LID_ELEVATION, LOWER_LID_ELEVATION) * np.sin(t)
    margin = np.stack(
        [
            MARGIN_RADIUS * np.sin(a) * np.cos(e),
            MARGIN_RADIUS * np.sin(e),
            MARGIN_RADIUS * np.cos(a) * np.cos(e),
        ],
        axis=1,
    )
    outer_xy = np.stack([24.0 * np.cos(t), -np.where(upper, 22.0, 14.0) * np.sin(t)], axis=1)

    verts = np.empty((N_FACE_VERTICES, 3))
    ring_s = np.zeros(N_FACE_VERTICES)
    for k in range(RINGS):
        s = k / (RINGS - 1)
        xy = (1.0 - s) * margin[:, :2] + s * outer_xy
        w = _smoothstep(np.full(COLUMNS, min(s / 0.35, 1.0)))
        z = (1.0 - w) * margin[:, 2] + w * _skin_z(xy[:, 0], xy[:, 1])
        sl = slice(k * COLUMNS, (k + 1) * COLUMNS)
        verts[sl, :2] = xy
        verts[sl, 2] = z
        ring_s[sl] = s
    for j in range(1, CAP + 1):
        x, y = outer_xy[j]
        y = y - 5.0 * np.sin(t[j])
        verts[cap_index(j)] = (x, y, _skin_z(np.array(x), np.array(y)))
        ring_s[cap_index(j)] = 1.2

    tris: list[tuple[int, int, int]] = []
    for k in range(RINGS - 1):
        for j in range(COLUMNS):
            a0, b0 = ring_index(k, j), ring_index(k, j + 1)
            c0, d0 = ring_index(k + 1, j + 1), ring_index(k + 1, j)
            tris += [(a0, b0, c0), (a0, c0, d0)]
    outer = RINGS - 1
    tris.append((ring_index(outer, 0), ring_index(outer, 1), cap_index(1)))
    for j in range(1, CAP):
        a0, b0 = ring_index(outer, j), ring_index(outer, j + 1)
        tris += [(a0, b0, cap_index(j + 1)), (a0, cap_index(j + 1), cap_index(j))]
    tris.append((ring_index(outer, CAP), ring_index(outer, CAP + 1), cap_index(CAP)))
    faces = np.array(tris, dtype=np.int64)

    p = verts[faces]
    nz = np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])[:, 2]
    if np.count_nonzero(nz > 0) < len(faces) / 2:
        faces = faces[:, [0, 2, 1]]

    uv = np.stack([0.5 + verts[:, 0] / 56.0, 0.55 + verts[:, 1] / 60.0], axis=1)
    return verts, np.ascontiguousarray(faces), uv, ring_s


def eyelid_weights(verts: np.ndarray, ring_s: np.ndarray) -> np.ndarray:
    """Falloff from the margin times a 0.8 + 0.2 sin t upper/lower bias."""
    t = np.arctan2(-verts[:, 1], verts[:, 0])
    falloff = 0.5 * (1.0 + np.cos(np.pi * np.minimum(ring_s / 0.6, 1.0)))
    return np.clip(falloff * (0.8 + 0.2 * np.sin(t)), 0.0, 1.0)


def landmark_triples() -> np.ndarray:
    """(landmark, vertex, weight) rows in the LANDMARK_SEMANTICS order."""
    n = N_FACE_VERTICES
    outer = RINGS - 1
    rows: list[tuple[int, int, float]] = []
    lm = 0
    for part in (0, n):
        for j in (1, 3, 5, 7, 9):
            rows += [(lm, part + cap_index(j), 0.6), (lm, part + ring_index(outer, j), 0.4)]
            lm += 1
    for j in (10, 11, 12):
        rows += [(lm, ring_index(8, j), 0.5), (lm, n + ring_index(8, j), 0.5)]
        lm += 1
    for part in (0, n):
        for cols in ((0,), (3, 4), (6, 7), (10,), (13, 14), (16, 17)):
            for j in cols:
                rows.append((lm, part + ring_index(0, j), 1.0 / len(cols)))
            lm += 1
    assert lm == len(LANDMARK_SEMANTICS)
    return np.array(rows, dtype=np.float64)


# ---------------------------------------------------------------------------
# Bases and textures
# ---------------------------------------------------------------------------


def _orthonormal(columns: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(columns)
    return q * np.sign(np.diag(r))


def shape_basis(verts: np.ndarray, rng: np.random.Generator, length_scale: float) -> np.ndarray:
    """(3·229, 16) orthonormal columns built from smooth radial-basis fields."""
    xy = verts[:, :2]
    cols = []
    for _ in range(N_SHAPE_MODES):
        centers = rng.uniform([-26.0, -28.0], [26.0, 16.0], size=(6, 2))
        weights = rng.normal(size=(6, 3)) * np.array([1.0, 1.0, 1.5])
        d2 = ((xy[:, None, :] - centers[None, :, :]) ** 2).sum(axis=-1)
        field = np.exp(-d2 / (2.0 * length_scale**2)) @ weights
        cols.append(field.reshape(-1))
    return _orthonormal(np.stack(cols, axis=1))


def _uv_grid(size: int) -> tuple[np.ndarray, np.ndarray]:
    c = (np.arange(size) + 0.5) / size
    return np.meshgrid(c, c)


def texture_basis(size: int, rng: np.random.Generator) -> np.ndarray:
    """(3·S², 8) orthonormal columns of low-frequency color fields."""
    u, v = _uv_grid(size)
    cols = []
    for _ in range(N_TEXTURE_MODES):
        field = np.zeros((size, size, 3))
        for _ in range(3):
            fu, fv = rng.integers(0, 4, size=2)
            phase = rng.uniform(0.0, 2.0 * np.pi)
            amp = rng.normal(size=3)
            field += np.cos(2.0 * np.pi * (fu * u + fv * v) + phase)[..., None] * amp
        cols.append(field.reshape(-1))
    return _orthonormal(np.stack(cols, axis=1))


def skin_texture(size: int, rng: np.random.Generator) -> np.ndarray:
    """Mean skin texture with a darker brow band above the orbit."""
    u, v = _uv_grid(size)
    skin = np.array([0.78, 0.6, 0.5])
    shade = 0.04 * np.cos(2.0 * np.pi * (u * rng.uniform(1, 3) + v * rng.uniform(1, 3)))
    tex = skin * (1.0 + shade)[..., None]
    x = (u - 0.5) * 56.0
    brow_y = -np.sqrt(np.maximum(1.0 - (x / 26.0) ** 2, 0.0)) * 25.0
    brow_v = 0.55 + brow_y / 60.0
    brow = np.exp(-(((v - brow_v) / 0.035) ** 2)) * (np.abs(x) < 24.0)
    tex = tex * (1.0 - brow[..., None]) + np.array([0.3, 0.22, 0.18]) * brow[..., None]
    crease_v = 0.55 - 8.5 / 60.0
    crease = 0.12 * np.exp(-(((v - crease_v) / 0.015) ** 2)) * (np.abs(x) < 14.0)
    tex = tex * (1.0 - crease[..., None])
    return np.clip(tex, 0.0, 1.0)


def eyeball_texture(size: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Polar eyeball texture (pupil, striated iris, sclera) and its iris mask."""
    u, v = _uv_grid(size)
    du, dv = u - 0.5, v - 0.5
    rho = np.hypot(du, dv)
    psi = np.arctan2(dv, du)
    iris_color = np.array([0.3, 0.45, 0.6]) * rng.uniform(0.8, 1.2, size=3)
    spokes = rng.integers(24, 48)
    stria = 0.8 + 0.2 * np.cos(spokes * psi + 3.0 * np.sin(5.0 * psi))
    limbal = 1.0 - 0.5 * _smoothstep((rho - 0.8 * LIMBUS_RHO) / (0.2 * LIMBUS_RHO))
    iris = iris_color * (stria * limbal)[..., None]
    pupil = rho < 0.35 * LIMBUS_RHO
    sclera = np.array([0.95, 0.93, 0.9]) * (1.0 - 0.15 * _smoothstep((rho - 0.3) / 0.2))[..., None]
    inside = rho < LIMBUS_RHO
    tex = np.where(inside[..., None], iris, sclera)
    tex = np.where(pupil[..., None], 0.04, tex)
    return np.clip(tex, 0.0, 1.0), inside.astype(np.float64)


# ---------------------------------------------------------------------------
# Public API
# ---------------------------------------------------------------------------


def build_model(spec: SyntheticModelSpec | None = None) -> EyeRegionModel:
    """In-memory synthetic EyeRegionModel for *spec*."""
    spec = spec or SyntheticModelSpec()
    rng = np.random.default_rng(spec.seed)
    verts, faces, uv, ring_s = face_geometry()
    decay = 0.8 ** np.arange(N_SHAPE_MODES)
    U = shape_basis(verts, rng, spec.length_scale)
    size = spec.texture_size
    V = texture_basis(size, rng)
    sigma_tex = 0.05 * np.sqrt(3.0 * size * size) * 0.8 ** np.arange(N_TEXTURE_MODES) * spec.texture_amplitude
    e_verts, e_faces, e_uv, iris_boundary = tessellate_eyeball(spec.eyeball_segments)
    e_tex, iris_mask = eyeball_texture(max(64, size // 2), rng)
    mu_tex = skin_texture(size, rng)

    upper = np.array([ring_index(0, j) for j in range(0, MEDIAL_CORNER + 1)])
    lower = np.array([ring_index(0, j) for j in range(MEDIAL_CORNER, COLUMNS + 1)])
    return EyeRegionModel(
        mu_geo=verts,
        U=U,
        sigma_geo=26.0 * decay * spec.shape_amplitude,
        mu_tex=mu_tex,
        V=V,
        sigma_tex=sigma_tex,
        topology=faces,
        uv=uv,
        landmark_triples=landmark_triples(),
        eyelid_weights=eyelid_weights(verts, ring_s),
        corners=(LATERAL_CORNER, MEDIAL_CORNER),
        lid_margin_upper=upper,
        lid_margin_lower=lower,
        eyeball=EyeballAsset(
            vertices=e_verts,
            faces=e_faces,
            uv=e_uv,
            iris_boundary=iris_boundary,
            texture=e_tex,
            iris_mask=iris_mask,
        ),
        default_iod=DEFAULT_IOD_MM,
        default_beta_iris=1.0,
    )


def generate_model(spec: SyntheticModelSpec, out_dir: str | Path) -> Path:
    """Write the synthetic asset for *spec* to *out_dir*."""
    model = build_model(spec)
    path = model.save(out_dir)
    logger.info("generated synthetic asset (seed %d, %dpx textures) at %s", spec.seed, spec.texture_size, path)
    return path
