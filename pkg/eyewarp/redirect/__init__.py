# eyewarp/redirect/__init__.py
from .composite import composite, seam_alpha, seam_band, select_reflection_map
from .flow import FLOW_ATTRIBUTE, eyelid_flow, vertex_flow
from .redirector import RedirectResult, redirect_frame, repose
from .warp import warp

__all__ = [
    "composite",
    "seam_alpha",
    "seam_band",
    "select_reflection_map",
    "FLOW_ATTRIBUTE",
    "eyelid_flow",
    "vertex_flow",
    "RedirectResult",
    "redirect_frame",
    "repose",
    "warp",
]
