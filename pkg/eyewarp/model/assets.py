# eyewarp/model/assets.py
"""
EyeRegionModel: the morphable eye-region model and its on-disk asset format.

Asset directory layout
----------------------
  manifest.yaml          schema version, array table, counts, landmark
                         semantics, eyeball constants, anthropometrics
  <name>.f32 / .u32      raw little-endian float32 / uint32 arrays listed in
                         the manifest ``arrays`` table with their shapes
  mu_tex.png             mean face texture, 16-bit RGB
  eyeball_texture.png    base eyeball texture, 16-bit RGB
  iris_mask.png          8-bit mask, 255 inside the iris (pupil included)

Loaded arrays are float64 (or int64 indices) and read-only, so a model can
be shared across threads.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import TYPE_CHECKING, Any

import cv2
import numpy as np
import scipy.sparse as sp
import yaml

from ..constants import (
    ASSET_SCHEMA_VERSION,
    CORNEA_OFFSET,
    CORNEA_RADIUS,
    DEFAULT_IOD_MM,
    IRIS_PLANE_Z,
    LANDMARK_SEMANTICS,
    LIMBUS_RADIUS,
    N_FACE_VERTICES,
    N_LANDMARKS,
    N_SHAPE_MODES,
    N_TEXTURE_MODES,
    SCLERA_RADIUS,
)
from ..exceptions import AssetFormatError, InvalidParameters

if TYPE_CHECKING:
    from ..render.subdivision import LoopStencils

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.yaml"

_DTYPES = {"float32": "<f4", "uint32": "<u4"}


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class EyeballAsset:
    """Eyeball geometry constants, rest tessellation and base texture."""

    vertices: np.ndarray
    faces: np.ndarray
    uv: np.ndarray
    iris_boundary: np.ndarray
    texture: np.ndarray
    iris_mask: np.ndarray
    sclera_radius: float = SCLERA_RADIUS
    cornea_radius: float = CORNEA_RADIUS
    limbus_radius: float = LIMBUS_RADIUS
    cornea_offset: float = CORNEA_OFFSET
    iris_plane_z: float = IRIS_PLANE_Z

    @property
    def sclera_mask(self) -> np.ndarray:
        return 1.0 - self.iris_mask


@dataclass(frozen=True, eq=False)
class EyeRegionModel:
    """
    PCA shape/texture model of one eye region plus the shared eyeball.

    Face-part vertices are expressed in the right part's local frame with the
    eyeball center at the origin; the left part is its mirror image.
    """

    mu_geo: np.ndarray
    U: np.ndarray
    sigma_geo: np.ndarray
    mu_tex: np.ndarray
    V: np.ndarray
    sigma_tex: np.ndarray
    topology: np.ndarray
    uv: np.ndarray
    landmark_triples: np.ndarray
    eyelid_weights: np.ndarray
    corners: tuple[int, int]
    lid_margin_upper: np.ndarray
    lid_margin_lower: np.ndarray
    eyeball: EyeballAsset
    default_iod: float = DEFAULT_IOD_MM
    default_beta_iris: float = 1.0
    landmark_semantics: tuple[str, ...] = LANDMARK_SEMANTICS
    stencils: LoopStencils = field(init=False, repr=False)
    landmark_map: sp.csr_matrix = field(init=False, repr=False)

    def __post_init__(self) -> None:
        from ..render.subdivision import build_loop_stencils

        self._validate()
        object.__setattr__(self, "stencils", build_loop_stencils(self.topology, self.n_vertices))
        triples = self.landmark_triples
        rows = triples[:, 0].astype(np.int64)
        # stored weights are float32; rows must sum to 1 in float64 for translation equivariance
        weights = triples[:, 2].astype(np.float64)
        weights /= np.bincount(rows, weights=weights, minlength=N_LANDMARKS)[rows]
        lmap = sp.csr_matrix(
            (weights, (rows, triples[:, 1].astype(np.int64))),
            shape=(N_LANDMARKS, 2 * self.n_vertices),
        )
        object.__setattr__(self, "landmark_map", lmap)

    # ------------------------------------------------------------------
    # Invariants
    # ------------------------------------------------------------------

    def _validate(self) -> None:
        n = self.n_vertices
        if n != N_FACE_VERTICES:
            raise AssetFormatError(f"face part must have {N_FACE_VERTICES} vertices, got {n}")
        if self.U.shape != (3 * n, N_SHAPE_MODES) or self.sigma_geo.shape != (N_SHAPE_MODES,):
            raise AssetFormatError(f"shape basis has shape {self.U.shape}")
        size = self.texture_size
        if self.mu_tex.shape != (size, size, 3):
            raise AssetFormatError(f"mean texture must be square RGB, got {self.mu_tex.shape}")
        if self.V.shape != (size * size * 3, N_TEXTURE_MODES) or self.sigma_tex.shape != (N_TEXTURE_MODES,):
            raise AssetFormatError(f"texture basis has shape {self.V.shape}")
        if np.any(self.sigma_geo <= 0) or np.any(self.sigma_tex <= 0):
            raise AssetFormatError("PCA standard deviations must be strictly positive")
        norms = np.linalg.norm(self.U, axis=0)
        if not np.allclose(norms, 1.0, atol=1e-4):
            raise AssetFormatError(f"shape basis columns must have unit norm, got {norms}")
        if self.topology.min() < 0 or self.topology.max() >= n:
            raise AssetFormatError("topology references a vertex outside the face part")
        if self.landmark_triples.ndim != 2 or self.landmark_triples.shape[1] != 3:
            raise AssetFormatError("landmark_map must be rows of (landmark, vertex, weight)")
        lm = self.landmark_triples[:, 0].astype(np.int64)
        vi = self.landmark_triples[:, 1].astype(np.int64)
        if lm.min() < 0 or lm.max() >= N_LANDMARKS or vi.min() < 0 or vi.max() >= 2 * n:
            raise AssetFormatError("landmark_map index out of range")
        sums = np.bincount(lm, weights=self.landmark_triples[:, 2], minlength=N_LANDMARKS)
        if not np.allclose(sums, 1.0, atol=1e-5):
            raise AssetFormatError(f"landmark_map rows must sum to 1, got {sums}")
        if self.eyelid_weights.shape != (n,) or np.any(self.eyelid_weights < 0) or np.any(self.eyelid_weights > 1):
            raise AssetFormatError("eyelid weights must be one value in [0,1] per vertex")
        if len(self.landmark_semantics) != N_LANDMARKS:
            raise AssetFormatError("landmark semantics must name 25 landmarks")

    # ------------------------------------------------------------------
    # Properties
    # ------------------------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return int(self.mu_geo.shape[0])

    @property
    def texture_size(self) -> int:
        return int(self.mu_tex.shape[0])

    # ------------------------------------------------------------------
    # Morphable sampling
    # ------------------------------------------------------------------

    def shape_sample(self, beta_face: Sequence[float] | np.ndarray) -> np.ndarray:
        """μ_geo + U diag(σ_geo) β_face, as a (229, 3) vertex array in mm."""
        beta = np.asarray(beta_face, dtype=np.float64)
        if beta.shape != (N_SHAPE_MODES,):
            raise InvalidParameters(f"beta_face needs {N_SHAPE_MODES} coefficients, got {beta.shape}")
        return self.mu_geo + (self.U @ (self.sigma_geo * beta)).reshape(-1, 3)

    def texture_sample(self, tau_face: Sequence[float] | np.ndarray, *, clamp: bool = True) -> np.ndarray:
        """
        μ_tex + V diag(σ_tex) τ_face as an (S, S, 3) texture.

        Clamped results are cached and returned read-only.
        """
        tau = np.asarray(tau_face, dtype=np.float64)
        if tau.shape != (N_TEXTURE_MODES,):
            raise InvalidParameters(f"tau_face needs {N_TEXTURE_MODES} coefficients, got {tau.shape}")
        if clamp:
            return _cached_texture(self, tuple(float(t) for t in tau))
        return self._texture(tau)

    def _texture(self, tau: np.ndarray) -> np.ndarray:
        if not np.any(tau):
            return self.mu_tex.copy()
        return self.mu_tex + (self.V @ (self.sigma_tex * tau)).reshape(self.mu_tex.shape)

    def project_shape(self, vertices: np.ndarray) -> np.ndarray:
        """Least-squares β_face reproducing *vertices* (inverse of shape_sample)."""
        basis = self.U * self.sigma_geo
        delta = (np.asarray(vertices, dtype=np.float64) - self.mu_geo).reshape(-1)
        return np.linalg.lstsq(basis, delta, rcond=None)[0]

    def project_texture(self, texture: np.ndarray) -> np.ndarray:
        """Least-squares τ_face reproducing an unclamped *texture*."""
        basis = self.V * self.sigma_tex
        delta = (np.asarray(texture, dtype=np.float64) - self.mu_tex).reshape(-1)
        return np.linalg.lstsq(basis, delta, rcond=None)[0]

    # ------------------------------------------------------------------
    # Persistence
    # ------------------------------------------------------------------

    def save(self, path: str | Path) -> Path:
        """Write the asset directory; identical models produce identical bytes."""
        root = Path(path)
        root.mkdir(parents=True, exist_ok=True)
        arrays: dict[str, dict[str, Any]] = {}

        def put(name: str, arr: np.ndarray, kind: str) -> None:
            ext = "f32" if kind == "float32" else "u32"
            data = np.ascontiguousarray(arr, dtype=_DTYPES[kind])
            (root / f"{name}.{ext}").write_bytes(data.tobytes())
            arrays[name] = {"file": f"{name}.{ext}", "dtype": kind, "shape": list(data.shape)}

        put("mu_geo", self.mu_geo, "float32")
        put("shape_basis", self.U, "float32")
        put("sigma_geo", self.sigma_geo, "float32")
        put("texture_basis", self.V, "float32")
        put("sigma_tex", self.sigma_tex, "float32")
        put("topology", self.topology, "uint32")
        put("face_uv", self.uv, "float32")
        put("eyelid_weights", self.eyelid_weights, "float32")
        put("landmark_map", self.landmark_triples, "float32")
        put("eyeball_vertices", self.eyeball.vertices, "float32")
        put("eyeball_faces", self.eyeball.faces, "uint32")
        put("eyeball_uv", self.eyeball.uv, "float32")
        put("iris_boundary", self.eyeball.iris_boundary, "uint32")
        _write_rgb16(root / "mu_tex.png", self.mu_tex)
        _write_rgb16(root / "eyeball_texture.png", self.eyeball.texture)
        cv2.imwrite(str(root / "iris_mask.png"), np.rint(self.eyeball.iris_mask * 255).astype(np.uint8))

        manifest = {
            "schema_version": ASSET_SCHEMA_VERSION,
            "n_vertices": self.n_vertices,
            "n_faces": int(len(self.topology)),
            "shape_modes": N_SHAPE_MODES,
            "texture_modes": N_TEXTURE_MODES,
            "texture_size": self.texture_size,
            "landmarks": list(self.landmark_semantics),
            "eyelid": {
                "corner_lateral": int(self.corners[0]),
                "corner_medial": int(self.corners[1]),
                "margin_upper": [int(i) for i in self.lid_margin_upper],
                "margin_lower": [int(i) for i in self.lid_margin_lower],
            },
            "eyeball": {
                "sclera_radius": self.eyeball.sclera_radius,
                "cornea_radius": self.eyeball.cornea_radius,
                "limbus_radius": self.eyeball.limbus_radius,
                "cornea_offset": self.eyeball.cornea_offset,
                "iris_plane_z": self.eyeball.iris_plane_z,
            },
            "anthropometrics": {"iod": self.default_iod, "beta_iris": self.default_beta_iris},
            "arrays": arrays,
        }
        with open(root / MANIFEST_NAME, "w") as f:
            yaml.safe_dump(manifest, f, sort_keys=False)
        logger.info("wrote eye-region asset to %s", root)
        return root

    @classmethod
    def load(cls, path: str | Path) -> EyeRegionModel:
        """Load and validate an asset directory."""
        root = Path(path)
        manifest_path = root / MANIFEST_NAME
        if not manifest_path.is_file():
            raise AssetFormatError("missing manifest", str(manifest_path))
        try:
            manifest = yaml.safe_load(manifest_path.read_text())
        except yaml.YAMLError as exc:
            raise AssetFormatError(f"unreadable manifest: {exc}", str(manifest_path)) from exc
        if not isinstance(manifest, dict) or manifest.get("schema_version") != ASSET_SCHEMA_VERSION:
            raise AssetFormatError(f"unsupported schema version (expected {ASSET_SCHEMA_VERSION})", str(manifest_path))

        try:
            table = manifest["arrays"]
            eyelid = manifest["eyelid"]
            eye = manifest["eyeball"]
            anthro = manifest["anthropometrics"]
        except KeyError as exc:
            raise AssetFormatError(f"manifest lacks section {exc}", str(manifest_path)) from exc

        def get(name: str) -> np.ndarray:
            entry = table.get(name)
            if entry is None:
                raise AssetFormatError(f"manifest lacks array '{name}'", str(manifest_path))
            file = root / entry["file"]
            if not file.is_file():
                raise AssetFormatError("missing array file", str(file))
            raw = np.frombuffer(file.read_bytes(), dtype=_DTYPES[entry["dtype"]])
            shape = tuple(int(s) for s in entry["shape"])
            if raw.size != int(np.prod(shape)):
                raise AssetFormatError(f"array size {raw.size} does not match shape {shape}", str(file))
            kind = np.float64 if entry["dtype"] == "float32" else np.int64
            return _frozen(raw.reshape(shape).astype(kind))

        eyeball = EyeballAsset(
            vertices=get("eyeball_vertices"),
            faces=get("eyeball_faces"),
            uv=get("eyeball_uv"),
            iris_boundary=get("iris_boundary"),
            texture=_read_rgb16(root / "eyeball_texture.png"),
            iris_mask=_read_mask(root / "iris_mask.png"),
            sclera_radius=float(eye["sclera_radius"]),
            cornea_radius=float(eye["cornea_radius"]),
            limbus_radius=float(eye["limbus_radius"]),
            cornea_offset=float(eye["cornea_offset"]),
            iris_plane_z=float(eye["iris_plane_z"]),
        )
        model = cls(
            mu_geo=get("mu_geo"),
            U=get("shape_basis"),
            sigma_geo=get("sigma_geo"),
            mu_tex=_read_rgb16(root / "mu_tex.png"),
            V=get("texture_basis"),
            sigma_tex=get("sigma_tex"),
            topology=get("topology"),
            uv=get("face_uv"),
            landmark_triples=get("landmark_map"),
            eyelid_weights=get("eyelid_weights"),
            corners=(int(eyelid["corner_lateral"]), int(eyelid["corner_medial"])),
            lid_margin_upper=_frozen(np.asarray(eyelid["margin_upper"], dtype=np.int64)),
            lid_margin_lower=_frozen(np.asarray(eyelid["margin_lower"], dtype=np.int64)),
            eyeball=eyeball,
            default_iod=float(anthro["iod"]),
            default_beta_iris=float(anthro["beta_iris"]),
            landmark_semantics=tuple(manifest.get("landmarks", ())),
        )
        if model.texture_size != int(manifest.get("texture_size", -1)):
            raise AssetFormatError("texture_size disagrees with mu_tex.png", str(manifest_path))
        logger.debug("loaded eye-region asset from %s", root)
        return model


@lru_cache(maxsize=16)
def _cached_texture(model: EyeRegionModel, tau: tuple[float, ...]) -> np.ndarray:
    tex = np.clip(model._texture(np.asarray(tau)), 0.0, 1.0)
    return _frozen(tex)


# ---------------------------------------------------------------------------
# Image helpers
# ---------------------------------------------------------------------------


def _write_rgb16(path: Path, image: np.ndarray) -> None:
    data = np.rint(np.clip(image, 0.0, 1.0) * 65535.0).astype(np.uint16)
    if not cv2.imwrite(str(path), cv2.cvtColor(data, cv2.COLOR_RGB2BGR)):
        raise AssetFormatError("could not write texture", str(path))


def _read_rgb16(path: Path) -> np.ndarray:
    data = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if data is None or data.ndim != 3 or data.dtype != np.uint16:
        raise AssetFormatError("texture must be a 16-bit RGB PNG", str(path))
    return _frozen(cv2.cvtColor(data, cv2.COLOR_BGR2RGB).astype(np.float64) / 65535.0)


def _read_mask(path: Path) -> np.ndarray:
    data = cv2.imread(str(path), cv2.IMREAD_GRAYSCALE)
    if data is None:
        raise AssetFormatError("unreadable mask", str(path))
    return _frozen((data > 127).astype(np.float64))
