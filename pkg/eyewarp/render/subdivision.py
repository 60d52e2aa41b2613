# eyewarp/render/subdivision.py
"""
One step of Loop subdivision expressed as a precomputed sparse stencil.

The stencil matrix maps the old vertex array (and any per-vertex attribute)
to the refined one: rows [0, n) are repositioned old vertices, rows
[n, n + n_edges) are new edge vertices, in the order of ``edges``.

Rules
-----
  interior edge    3/8 (a + b) + 1/8 (c + d)
  boundary edge    1/2 (a + b)
  interior vertex  (1 − kβ) v + β Σ neighbours,
                   β = (1/k)(5/8 − (3/8 + 1/4 cos(2π/k))²)
  boundary vertex  3/4 v + 1/8 (b0 + b1)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..exceptions import NonManifoldMeshError


@dataclass(frozen=True)
class LoopStencils:
    """Precomputed one-step Loop subdivision for a fixed topology."""

    matrix: sp.csr_matrix
    faces: np.ndarray
    edges: np.ndarray
    n_vertices: int

    def apply(self, values: np.ndarray) -> np.ndarray:
        """Refine a per-vertex array of shape (n_vertices, ...)."""
        flat = np.asarray(values, dtype=np.float64).reshape(self.n_vertices, -1)
        out = self.matrix @ flat
        return np.asarray(out).reshape((self.matrix.shape[0],) + np.shape(values)[1:])

    def flipped(self) -> LoopStencils:
        """Same stencils for the mesh with reversed winding."""
        return LoopStencils(
            matrix=self.matrix,
            faces=np.ascontiguousarray(self.faces[:, [0, 2, 1]]),
            edges=self.edges,
            n_vertices=self.n_vertices,
        )


def _loop_beta(k: np.ndarray) -> np.ndarray:
    return (1.0 / k) * (5.0 / 8.0 - (3.0 / 8.0 + 0.25 * np.cos(2.0 * np.pi / k)) ** 2)


def build_loop_stencils(faces: np.ndarray, n_vertices: int) -> LoopStencils:
    """
    Build the stencil matrix and refined connectivity for *faces*.

    Raises NonManifoldMeshError for edges shared by more than two faces and
    for vertices with other than zero or two boundary edges.
    """
    faces = np.asarray(faces, dtype=np.int64)
    if faces.ndim != 2 or faces.shape[1] != 3:
        raise NonManifoldMeshError(f"faces must have shape (F, 3), got {faces.shape}")
    if faces.size and (faces.min() < 0 or faces.max() >= n_vertices):
        raise NonManifoldMeshError("face index out of range")
    if np.any((faces[:, 0] == faces[:, 1]) | (faces[:, 1] == faces[:, 2]) | (faces[:, 0] == faces[:, 2])):
        raise NonManifoldMeshError("degenerate face with repeated vertex")

    n_faces = len(faces)
    # half-edges (a -> b) with the opposite corner c, one per face corner
    a = faces.reshape(-1)
    b = faces[:, [1, 2, 0]].reshape(-1)
    c = faces[:, [2, 0, 1]].reshape(-1)
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    keys = lo * n_vertices + hi
    edge_keys, half_to_edge, counts = np.unique(keys, return_inverse=True, return_counts=True)
    if np.any(counts > 2):
        raise NonManifoldMeshError(f"{int(np.count_nonzero(counts > 2))} edge(s) shared by more than two faces")
    edges = np.stack([edge_keys // n_vertices, edge_keys % n_vertices], axis=1)
    n_edges = len(edges)
    boundary = counts == 1

    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    vals: list[np.ndarray] = []

    # --- edge points ------------------------------------------------------
    e_ids = np.arange(n_edges)
    e_rows = n_vertices + e_ids
    w_end = np.where(boundary, 0.5, 3.0 / 8.0)
    rows += [e_rows, e_rows]
    cols += [edges[:, 0], edges[:, 1]]
    vals += [w_end, w_end]
    interior_half = ~boundary[half_to_edge]
    rows.append(n_vertices + half_to_edge[interior_half])
    cols.append(c[interior_half])
    vals.append(np.full(int(interior_half.sum()), 1.0 / 8.0))

    # --- vertex points ----------------------------------------------------
    nbr_a = np.concatenate([edges[:, 0], edges[:, 1]])
    nbr_b = np.concatenate([edges[:, 1], edges[:, 0]])
    nbr_boundary = np.concatenate([boundary, boundary])
    valence = np.bincount(nbr_a, minlength=n_vertices)
    n_boundary_edges = np.bincount(nbr_a[nbr_boundary], minlength=n_vertices)
    bad = (n_boundary_edges != 0) & (n_boundary_edges != 2)
    if np.any(bad):
        raise NonManifoldMeshError(f"{int(bad.sum())} non-manifold boundary vertex(es)")
    on_boundary = n_boundary_edges == 2
    used = valence > 0

    safe_k = np.maximum(valence, 1).astype(np.float64)
    beta = _loop_beta(safe_k)
    self_w = np.where(on_boundary, 0.75, 1.0 - valence * beta)
    self_w = np.where(used, self_w, 1.0)
    v_ids = np.arange(n_vertices)
    rows.append(v_ids)
    cols.append(v_ids)
    vals.append(self_w)

    interior_pairs = ~on_boundary[nbr_a]
    rows.append(nbr_a[interior_pairs])
    cols.append(nbr_b[interior_pairs])
    vals.append(beta[nbr_a[interior_pairs]])
    boundary_pairs = nbr_boundary & on_boundary[nbr_a]
    rows.append(nbr_a[boundary_pairs])
    cols.append(nbr_b[boundary_pairs])
    vals.append(np.full(int(boundary_pairs.sum()), 1.0 / 8.0))

    matrix = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n_vertices + n_edges, n_vertices),
    )

    # --- refined connectivity ----------------------------------------------
    e = (n_vertices + half_to_edge).reshape(n_faces, 3)  # e[:, 0] = ab, 1 = bc, 2 = ca
    new_faces = np.concatenate(
        [
            np.stack([faces[:, 0], e[:, 0], e[:, 2]], axis=1),
            np.stack([faces[:, 1], e[:, 1], e[:, 0]], axis=1),
            np.stack([faces[:, 2], e[:, 2], e[:, 1]], axis=1),
            np.stack([e[:, 0], e[:, 1], e[:, 2]], axis=1),
        ]
    )
    return LoopStencils(matrix=matrix, faces=new_faces, edges=edges, n_vertices=n_vertices)


def subdivide_once(vertices: np.ndarray, faces: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Refine (vertices, faces) by one Loop step."""
    stencils = build_loop_stencils(faces, len(vertices))
    return stencils.apply(vertices), stencils.faces
