# eyewarp/render/renderer.py
"""
Scene → Raster.

``render`` produces the shaded image, part mask and depth used by the
energy; ``render_attributes`` rasterizes per-vertex face attributes (the
eyelid flow) over the same refined geometry, with eyeballs as occluders.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from ..exceptions import EmptyImageError, MissingAttributeError
from ..model.eyeball import polar_uv
from ..model.scene import EyeballPose, Mesh, PartId, Scene
from .camera import Camera
from .raster import Raster, Resolved, interpolate, rasterize, resolve
from .shading import (
    apply_reflection_map,
    eyelid_ao_factor,
    lambert,
    refract_corneal,
    sample_texture,
    vertex_normals,
)

if TYPE_CHECKING:
    from ..config import RenderOptions

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FlowField:
    """Per-pixel attribute (H, W, k) with its coverage mask; zero off coverage."""

    flow: np.ndarray
    coverage: np.ndarray

    @classmethod
    def zeros(cls, height: int, width: int, channels: int = 2) -> FlowField:
        return cls(flow=np.zeros((height, width, channels)), coverage=np.zeros((height, width), dtype=bool))

    @property
    def shape(self) -> tuple[int, int]:
        return self.coverage.shape  # type: ignore[return-value]

    def is_zero(self) -> bool:
        return not np.any(self.flow)


@dataclass(frozen=True)
class _Geometry:
    mesh: Mesh
    vertices: np.ndarray
    faces: np.ndarray
    uv: np.ndarray
    attributes: dict[str, np.ndarray]


def _refine(mesh: Mesh, subdivide: bool) -> _Geometry:
    if subdivide and mesh.stencils is not None:
        st = mesh.stencils
        return _Geometry(
            mesh=mesh,
            vertices=st.apply(mesh.vertices),
            faces=st.faces,
            uv=st.apply(mesh.uv),
            attributes={k: st.apply(v) for k, v in mesh.attributes.items()},
        )
    return _Geometry(mesh=mesh, vertices=mesh.vertices, faces=mesh.faces, uv=mesh.uv, attributes=dict(mesh.attributes))


def _unit(v: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    return v / np.where(n > 0, n, 1.0)


def _shade_surface(geo: _Geometry, hits: Resolved, scene: Scene) -> np.ndarray:
    uv = interpolate(geo.uv, geo.faces, hits.face, hits.bary)
    texture = geo.mesh.texture
    texel = sample_texture(texture, uv) if texture is not None else np.ones((len(hits.face), 3))
    normals = _unit(interpolate(vertex_normals(geo.vertices, geo.faces), geo.faces, hits.face, hits.bary))
    return lambert(texel, normals, scene.light)


def _shade_eyeball(
    geo: _Geometry,
    hits: Resolved,
    scene: Scene,
    eye: EyeballPose,
    options: RenderOptions,
) -> np.ndarray:
    mesh = geo.mesh
    assert mesh.local is not None and mesh.texture is not None
    local = interpolate(mesh.local, geo.faces, hits.face, hits.bary)
    position = interpolate(geo.vertices, geo.faces, hits.face, hits.bary)
    view = _unit(position)
    view_local = view @ eye.rotation
    normal_local = _unit(local)
    uv = polar_uv(local)
    surface_uv = uv

    if options.refraction:
        cornea = (local[:, 2] > 0.0) & (
            np.hypot(local[:, 0], local[:, 1]) < eye.limbus_radius * eye.iris_scale
        )
        if cornea.any():
            origin_local = np.broadcast_to(-eye.center @ eye.rotation, (int(cornea.sum()), 3))
            sample = refract_corneal(
                origin_local,
                view_local[cornea],
                cornea_offset=eye.cornea_offset,
                cornea_radius=eye.cornea_radius,
                iris_plane_z=eye.iris_plane_z,
                limbus_radius=eye.limbus_radius,
                iris_scale=eye.iris_scale,
                ior=options.refractive_index,
            )
            idx = np.nonzero(cornea)[0][sample.valid]
            uv = uv.copy()
            uv[idx] = sample.uv[sample.valid]
            normal_local = normal_local.copy()
            normal_local[idx] = sample.normal[sample.valid]

    normal = normal_local @ eye.rotation.T
    color = lambert(sample_texture(mesh.texture, uv), normal, scene.light)
    if options.ambient_occlusion:
        color = color * eyelid_ao_factor(eye, surface_uv, ao_min=options.ao_min, band=options.ao_band)[:, None]
    if scene.reflection_map is not None and options.specular_weight > 0.0:
        color = color + apply_reflection_map(view, normal, scene.reflection_map, weight=options.specular_weight)
    return color


def render(scene: Scene, camera: Camera, *, options: RenderOptions | None = None) -> Raster:
    """
    Rasterize and shade every mesh of *scene*.

    Face parts get one Loop subdivision step (when enabled) before
    rasterization. Colors are clamped to [0, 1]; the mask holds PartId values
    and depth is +inf on background.
    """
    if options is None:
        from ..config import RenderOptions

        options = RenderOptions()
    height, width = camera.shape
    if height == 0 or width == 0:
        raise EmptyImageError(f"cannot render a {width}x{height} image")

    geos = [_refine(m, options.subdivide and m.part.is_face) for m in scene.meshes]
    resolved = resolve([rasterize(g.vertices, g.faces, camera) for g in geos])
    eyes = {e.part: e for e in scene.eyeballs}

    n_pix = height * width
    color = np.zeros((n_pix, 3))
    mask = np.zeros(n_pix, dtype=np.uint8)
    depth = np.full(n_pix, np.inf)
    names = sorted({name for g in geos for name in g.attributes})
    planes = {
        name: np.zeros((n_pix,) + next(g.attributes[name] for g in geos if name in g.attributes).shape[1:])
        for name in names
    }

    for source, geo in enumerate(geos):
        hits = resolved.select(source)
        if len(hits.pixel) == 0:
            continue
        part = geo.mesh.part
        eye = eyes.get(part)
        if part.is_eye and eye is not None and geo.mesh.local is not None and geo.mesh.texture is not None:
            shaded = _shade_eyeball(geo, hits, scene, eye, options)
        else:
            shaded = _shade_surface(geo, hits, scene)
        color[hits.pixel] = np.clip(shaded, 0.0, 1.0)
        mask[hits.pixel] = int(part)
        depth[hits.pixel] = hits.depth
        for name, values in geo.attributes.items():
            planes[name][hits.pixel] = interpolate(values, geo.faces, hits.face, hits.bary)

    return Raster(
        color=color.reshape(height, width, 3),
        mask=mask.reshape(height, width),
        depth=depth.reshape(height, width),
        attributes={k: v.reshape((height, width) + v.shape[1:]) for k, v in planes.items()},
    )


def render_attributes(
    scene: Scene,
    camera: Camera,
    name: str = "flow",
    *,
    options: RenderOptions | None = None,
) -> FlowField:
    """
    Dense per-pixel field of the face attribute *name*.

    Face parts are refined exactly as ``render`` refines them under the same
    *options*, so the coverage equals the face pixels of the matching render.
    Eyeballs take part in the depth test and occlude the face behind them.
    Pixels not won by a face part are zero.
    """
    if options is None:
        from ..config import RenderOptions

        options = RenderOptions()
    height, width = camera.shape
    if height == 0 or width == 0:
        raise EmptyImageError(f"cannot render a {width}x{height} image")
    face_meshes = [m for m in scene.meshes if m.part.is_face]
    for m in face_meshes:
        if name not in m.attributes:
            raise MissingAttributeError(f"face part {m.part.name} has no '{name}' attribute")
    channels = face_meshes[0].attributes[name].shape[1] if face_meshes else 2

    geos = [_refine(m, options.subdivide and m.part.is_face) for m in scene.meshes]
    resolved = resolve([rasterize(g.vertices, g.faces, camera) for g in geos])
    values = np.zeros((height * width, channels))
    coverage = np.zeros(height * width, dtype=bool)
    for source, geo in enumerate(geos):
        if not geo.mesh.part.is_face:
            continue
        hits = resolved.select(source)
        values[hits.pixel] = interpolate(geo.attributes[name], geo.faces, hits.face, hits.bary)
        coverage[hits.pixel] = True
    return FlowField(flow=values.reshape(height, width, channels), coverage=coverage.reshape(height, width))


def part_mask(raster: Raster, parts: tuple[PartId, ...]) -> np.ndarray:
    """Boolean image of pixels whose winning mesh is one of *parts*."""
    return np.isin(raster.mask, [int(p) for p in parts])
