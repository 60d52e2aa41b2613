# eyewarp/render/__init__.py
from .camera import Camera, default_camera, project
from .envmaps import MAP_NAMES, reflection_map
from .pfm import read_flow, read_pfm, write_flow, write_pfm
from .raster import Fragments, Raster, interpolate, rasterize, resolve
from .renderer import FlowField, part_mask, render, render_attributes
from .shading import apply_reflection_map, eyelid_ao_factor, refract, refract_corneal
from .subdivision import LoopStencils, build_loop_stencils, subdivide_once

__all__ = [
    "Camera",
    "default_camera",
    "project",
    "MAP_NAMES",
    "reflection_map",
    "read_flow",
    "read_pfm",
    "write_flow",
    "write_pfm",
    "Fragments",
    "Raster",
    "interpolate",
    "rasterize",
    "resolve",
    "FlowField",
    "part_mask",
    "render",
    "render_attributes",
    "apply_reflection_map",
    "eyelid_ao_factor",
    "refract",
    "refract_corneal",
    "LoopStencils",
    "build_loop_stencils",
    "subdivide_once",
]
