# eyewarp/testkit/oracles.py
"""
Brute-force reference implementations.

Nothing here calls the rasterizer, the subdivision stencils or the Jacobian
code: each oracle re-derives its answer from the definitions, one pixel or
one vertex at a time, so a disagreement points at the optimized code path.
Tolerances used against them:

  flow / attribute values      1e-4 px
  depth                        1e-9 mm (relative)
  prior gradients              1e-6
  rotation recovery            1e-9
"""

from __future__ import annotations

import math
from collections import defaultdict
from collections.abc import Sequence

import numpy as np

from ..energy.objective import Objective
from ..model.assets import EyeRegionModel
from ..model.params import ParameterVector
from ..model.scene import PartId, pose_scene
from ..render.camera import Camera

FLOW_TOLERANCE_PX = 1e-4
PRIOR_GRADIENT_TOLERANCE = 1e-6
ROTATION_TOLERANCE = 1e-9


def _pinhole(points: np.ndarray, camera: Camera) -> np.ndarray:
    p = np.asarray(points, dtype=np.float64)
    w = -p[..., 2]
    return np.stack([camera.cx + camera.fx * p[..., 0] / w, camera.cy + camera.fy * p[..., 1] / w], axis=-1)


def _covering(
    screen: np.ndarray, w: np.ndarray, faces: np.ndarray, px: float, py: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(triangle ids, perspective-correct barycentrics, depths) of triangles covering (px, py)."""
    a, b, c = screen[faces[:, 0]], screen[faces[:, 1]], screen[faces[:, 2]]
    area = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
    ok = np.abs(area) > 1e-12
    safe = np.where(ok, area, 1.0)
    l0 = ((b[:, 0] - px) * (c[:, 1] - py) - (b[:, 1] - py) * (c[:, 0] - px)) / safe
    l1 = ((c[:, 0] - px) * (a[:, 1] - py) - (c[:, 1] - py) * (a[:, 0] - px)) / safe
    l2 = 1.0 - l0 - l1
    inside = ok & (l0 >= 0.0) & (l1 >= 0.0) & (l2 >= 0.0)
    ids = np.nonzero(inside)[0]
    lam = np.stack([l0[ids], l1[ids], l2[ids]], axis=1)
    inv = lam / w[faces[ids]]
    denom = inv.sum(axis=1)
    return ids, inv / denom[:, None], 1.0 / denom


def oracle_depth(meshes: Sequence[tuple[np.ndarray, np.ndarray]], camera: Camera) -> np.ndarray:
    """Per-pixel minimum depth over all covering triangles; +inf where uncovered."""
    height, width = camera.shape
    depth = np.full((height, width), np.inf)
    prepared = [
        (_pinhole(v, camera), -np.asarray(v, dtype=np.float64)[:, 2], np.asarray(f, dtype=np.int64))
        for v, f in meshes
    ]
    for row in range(height):
        for col in range(width):
            for screen, w, faces in prepared:
                _, _, d = _covering(screen, w, faces, col + 0.5, row + 0.5)
                if len(d):
                    depth[row, col] = min(depth[row, col], float(d.min()))
    return depth


def oracle_flow(
    source: ParameterVector,
    destination: ParameterVector,
    model: EyeRegionModel,
    camera: Camera,
    pixels: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Exact eyelid flow at the query *pixels* (flat indices).

    Returns (values (P, 2), covered (P,)). A pixel is covered when its
    nearest triangle, over all destination meshes, belongs to a face part.
    """
    src = pose_scene(source, model)
    dst = pose_scene(destination, model)
    meshes = []
    for part in (PartId.FACE_LEFT, PartId.FACE_RIGHT, PartId.EYE_LEFT, PartId.EYE_RIGHT):
        m = dst.mesh(part)
        motion = None
        if part.is_face:
            motion = _pinhole(m.vertices, camera) - _pinhole(src.mesh(part).vertices, camera)
        meshes.append((_pinhole(m.vertices, camera), -m.vertices[:, 2], np.asarray(m.faces), motion))

    pixels = np.asarray(pixels, dtype=np.int64)
    values = np.zeros((len(pixels), 2))
    covered = np.zeros(len(pixels), dtype=bool)
    for i, p in enumerate(pixels):
        row, col = divmod(int(p), camera.width)
        best = math.inf
        for screen, w, faces, motion in meshes:
            ids, bary, d = _covering(screen, w, faces, col + 0.5, row + 0.5)
            if len(d) == 0:
                continue
            j = int(np.argmin(d))
            if d[j] < best:
                best = float(d[j])
                covered[i] = motion is not None
                if motion is not None:
                    values[i] = bary[j] @ motion[faces[ids[j]]]
                else:
                    values[i] = 0.0
    return values, covered


def oracle_loop(vertices: np.ndarray, faces: np.ndarray) -> tuple[np.ndarray, dict[tuple[int, int], np.ndarray]]:
    """
    One Loop subdivision step from the textbook rules.

    Returns the repositioned original vertices and a map from each edge
    (lo, hi) to its new edge point.
    """
    verts = np.asarray(vertices, dtype=np.float64)
    opposite: dict[tuple[int, int], list[int]] = defaultdict(list)
    for a, b, c in np.asarray(faces).tolist():
        for u, v, o in ((a, b, c), (b, c, a), (c, a, b)):
            opposite[(min(u, v), max(u, v))].append(o)

    edge_points: dict[tuple[int, int], np.ndarray] = {}
    neighbours: dict[int, set[int]] = defaultdict(set)
    boundary_neighbours: dict[int, list[int]] = defaultdict(list)
    for (u, v), opp in opposite.items():
        neighbours[u].add(v)
        neighbours[v].add(u)
        if len(opp) == 1:
            edge_points[(u, v)] = 0.5 * (verts[u] + verts[v])
            boundary_neighbours[u].append(v)
            boundary_neighbours[v].append(u)
        else:
            edge_points[(u, v)] = 0.375 * (verts[u] + verts[v]) + 0.125 * (verts[opp[0]] + verts[opp[1]])

    out = verts.copy()
    for i in range(len(verts)):
        if i in boundary_neighbours:
            b0, b1 = boundary_neighbours[i]
            out[i] = 0.75 * verts[i] + 0.125 * (verts[b0] + verts[b1])
        elif neighbours[i]:
            k = len(neighbours[i])
            beta = (5.0 / 8.0 - (3.0 / 8.0 + 0.25 * math.cos(2.0 * math.pi / k)) ** 2) / k
            out[i] = (1.0 - k * beta) * verts[i] + beta * sum(verts[j] for j in neighbours[i])
    return out, edge_points


def oracle_fd(objective: Objective, params: ParameterVector, k: int, h: float = 1e-3) -> float:
    """dE/dΦ_k by Richardson extrapolation of central differences at h and h/2."""
    x = params.to_array()

    def energy_at(value: float) -> float:
        y = x.copy()
        y[k] = value
        return objective.energy(ParameterVector.from_array(y)).total

    def central(step: float) -> float:
        return (energy_at(x[k] + step) - energy_at(x[k] - step)) / (2.0 * step)

    return (4.0 * central(0.5 * h) - central(h)) / 3.0


def icosahedron() -> tuple[np.ndarray, np.ndarray]:
    """Unit icosahedron (12 vertices, 20 outward-wound faces)."""
    g = (1.0 + math.sqrt(5.0)) / 2.0
    v = np.array(
        [
            [-1, g, 0], [1, g, 0], [-1, -g, 0], [1, -g, 0],
            [0, -1, g], [0, 1, g], [0, -1, -g], [0, 1, -g],
            [g, 0, -1], [g, 0, 1], [-g, 0, -1], [-g, 0, 1],
        ],
        dtype=np.float64,
    )  # fmt: skip
    f = np.array(
        [
            [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
            [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
            [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
            [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
        ],
        dtype=np.int64,
    )  # fmt: skip
    return v / np.linalg.norm(v, axis=1, keepdims=True), f
