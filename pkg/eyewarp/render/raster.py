# eyewarp/render/raster.py
"""
Vectorised triangle rasterization and z-buffer resolve.

Each triangle's pixel bounding box is expanded into candidate samples,
tested with edge functions (top-left fill rule on shared edges) and kept
with screen-space and perspective-correct barycentrics. Fragments from
any number of meshes are resolved per pixel by (depth, mesh order,
triangle index), which makes the result independent of evaluation order.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from ..constants import NEAR_PLANE_MM, RASTER_CHUNK
from .camera import Camera


@dataclass(frozen=True)
class Fragments:
    """Covered samples of one mesh; bary is perspective-correct."""

    pixel: np.ndarray
    face: np.ndarray
    bary: np.ndarray
    depth: np.ndarray

    @classmethod
    def empty(cls) -> Fragments:
        return cls(
            pixel=np.empty(0, dtype=np.int64),
            face=np.empty(0, dtype=np.int64),
            bary=np.empty((0, 3)),
            depth=np.empty(0),
        )

    def __len__(self) -> int:
        return len(self.pixel)


@dataclass
class Raster:
    """
    Rendered output.

    ``mask`` holds PartId values (0 = background); ``depth`` is the positive
    distance −z in mm and +inf on background; attribute planes are zero on
    background.
    """

    color: np.ndarray
    mask: np.ndarray
    depth: np.ndarray
    attributes: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def foreground(self) -> np.ndarray:
        return self.mask != 0


def _edge(ax: np.ndarray, ay: np.ndarray, bx: np.ndarray, by: np.ndarray, px: np.ndarray, py: np.ndarray) -> np.ndarray:
    return (bx - ax) * (py - ay) - (by - ay) * (px - ax)


def _owns_edge(ax: np.ndarray, ay: np.ndarray, bx: np.ndarray, by: np.ndarray) -> np.ndarray:
    dx = bx - ax
    dy = by - ay
    return (dy < 0) | ((dy == 0) & (dx > 0))


def rasterize(vertices: np.ndarray, faces: np.ndarray, camera: Camera) -> Fragments:
    """
    Rasterize camera-space triangles.

    Triangles with a vertex at or behind the near plane, and screen-space
    degenerate triangles, are skipped. No backface culling.
    """
    verts = np.asarray(vertices, dtype=np.float64)
    tris = np.asarray(faces, dtype=np.int64)
    width, height = camera.width, camera.height
    if len(tris) == 0 or width == 0 or height == 0:
        return Fragments.empty()

    w = -verts[:, 2]
    front = w > NEAR_PLANE_MM
    safe_w = np.where(front, w, 1.0)
    sx = camera.cx + camera.fx * verts[:, 0] / safe_w
    sy = camera.cy + camera.fy * verts[:, 1] / safe_w

    keep = front[tris].all(axis=1)
    tri_ids = np.nonzero(keep)[0]
    t = tris[tri_ids]
    x0, x1, x2 = sx[t[:, 0]], sx[t[:, 1]], sx[t[:, 2]]
    y0, y1, y2 = sy[t[:, 0]], sy[t[:, 1]], sy[t[:, 2]]
    area = _edge(x0, y0, x1, y1, x2, y2)
    ok = np.abs(area) > 1e-12
    # orient every triangle to positive area
    flip = area < 0
    t = t.copy()
    t[flip] = t[flip][:, [0, 2, 1]]
    t, tri_ids, flip = t[ok], tri_ids[ok], flip[ok]
    if len(t) == 0:
        return Fragments.empty()
    x0, x1, x2 = sx[t[:, 0]], sx[t[:, 1]], sx[t[:, 2]]
    y0, y1, y2 = sy[t[:, 0]], sy[t[:, 1]], sy[t[:, 2]]
    area = _edge(x0, y0, x1, y1, x2, y2)

    c0 = np.clip(np.ceil(np.minimum(np.minimum(x0, x1), x2) - 0.5), 0, width).astype(np.int64)
    c1 = np.clip(np.floor(np.maximum(np.maximum(x0, x1), x2) - 0.5), -1, width - 1).astype(np.int64)
    r0 = np.clip(np.ceil(np.minimum(np.minimum(y0, y1), y2) - 0.5), 0, height).astype(np.int64)
    r1 = np.clip(np.floor(np.maximum(np.maximum(y0, y1), y2) - 0.5), -1, height - 1).astype(np.int64)
    ncols = np.maximum(c1 - c0 + 1, 0)
    nrows = np.maximum(r1 - r0 + 1, 0)
    counts = ncols * nrows

    own0 = _owns_edge(x1, y1, x2, y2)
    own1 = _owns_edge(x2, y2, x0, y0)
    own2 = _owns_edge(x0, y0, x1, y1)
    inv_w = 1.0 / w[t]

    pieces: list[Fragments] = []
    start = 0
    cum = np.cumsum(counts)
    while start < len(t):
        base = cum[start - 1] if start > 0 else 0
        stop = int(np.searchsorted(cum, base + RASTER_CHUNK, side="right"))
        stop = max(stop, start + 1)
        sel = np.arange(start, stop)
        start = stop
        n = counts[sel]
        if n.sum() == 0:
            continue
        k = np.repeat(sel, n)
        offsets = np.arange(int(n.sum())) - np.repeat(np.cumsum(n) - n, n)
        col = c0[k] + offsets % ncols[k]
        row = r0[k] + offsets // ncols[k]
        px = col + 0.5
        py = row + 0.5

        e0 = _edge(x1[k], y1[k], x2[k], y2[k], px, py)
        e1 = _edge(x2[k], y2[k], x0[k], y0[k], px, py)
        e2 = _edge(x0[k], y0[k], x1[k], y1[k], px, py)
        inside = (
            ((e0 > 0) | ((e0 == 0) & own0[k]))
            & ((e1 > 0) | ((e1 == 0) & own1[k]))
            & ((e2 > 0) | ((e2 == 0) & own2[k]))
        )
        if not inside.any():
            continue
        k, col, row = k[inside], col[inside], row[inside]
        b = np.stack([e0[inside], e1[inside], e2[inside]], axis=1) / area[k, None]
        bw = b * inv_w[k]
        denom = bw.sum(axis=1)
        bary = bw / denom[:, None]
        swapped = flip[k]
        bary[swapped] = bary[swapped][:, [0, 2, 1]]
        pieces.append(
            Fragments(
                pixel=row * width + col,
                face=tri_ids[k],
                bary=bary,
                depth=1.0 / denom,
            )
        )
    if not pieces:
        return Fragments.empty()
    return Fragments(
        pixel=np.concatenate([p.pixel for p in pieces]),
        face=np.concatenate([p.face for p in pieces]),
        bary=np.concatenate([p.bary for p in pieces]),
        depth=np.concatenate([p.depth for p in pieces]),
    )


@dataclass(frozen=True)
class Resolved:
    """Depth-test winners: one entry per covered pixel, ascending pixel index."""

    pixel: np.ndarray
    source: np.ndarray
    face: np.ndarray
    bary: np.ndarray
    depth: np.ndarray

    def select(self, source: int) -> Resolved:
        keep = self.source == source
        return Resolved(
            pixel=self.pixel[keep],
            source=self.source[keep],
            face=self.face[keep],
            bary=self.bary[keep],
            depth=self.depth[keep],
        )


def resolve(fragments: Sequence[Fragments]) -> Resolved:
    """
    Keep the nearest fragment per pixel across meshes.

    Ties in depth go to the earlier mesh, then the lower triangle index.
    """
    pixel = np.concatenate([f.pixel for f in fragments]) if fragments else np.empty(0, dtype=np.int64)
    if len(pixel) == 0:
        return Resolved(
            pixel=np.empty(0, dtype=np.int64),
            source=np.empty(0, dtype=np.int64),
            face=np.empty(0, dtype=np.int64),
            bary=np.empty((0, 3)),
            depth=np.empty(0),
        )
    source = np.concatenate([np.full(len(f), i, dtype=np.int64) for i, f in enumerate(fragments)])
    face = np.concatenate([f.face for f in fragments])
    bary = np.concatenate([f.bary for f in fragments])
    depth = np.concatenate([f.depth for f in fragments])
    order = np.lexsort((face, source, depth, pixel))
    sorted_pixel = pixel[order]
    first = np.ones(len(order), dtype=bool)
    first[1:] = sorted_pixel[1:] != sorted_pixel[:-1]
    win = order[first]
    return Resolved(pixel=pixel[win], source=source[win], face=face[win], bary=bary[win], depth=depth[win])


def interpolate(values: np.ndarray, faces: np.ndarray, face: np.ndarray, bary: np.ndarray) -> np.ndarray:
    """Barycentric interpolation of per-vertex *values* at resolved fragments."""
    corners = np.asarray(values)[np.asarray(faces)[face]]
    return np.einsum("nk,nk...->n...", bary, corners)
