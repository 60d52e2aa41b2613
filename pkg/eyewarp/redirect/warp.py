# eyewarp/redirect/warp.py
"""Backward warp of the observed frame by a flow field."""

from __future__ import annotations

import cv2
import numpy as np

from ..render.renderer import FlowField


def warp(image: np.ndarray, flow: FlowField) -> np.ndarray:
    """
    out(p) = image(p − O(p)) on moving pixels, image(p) elsewhere.

    Sampling is bilinear with edge replication. Pixels with zero flow or
    outside the coverage are copied bit-exactly.
    """
    img = np.asarray(image, dtype=np.float64)
    if img.shape[:2] != flow.shape:
        raise ValueError(f"image {img.shape[:2]} and flow {flow.shape} differ in size")
    moving = flow.coverage & np.any(flow.flow != 0.0, axis=-1)
    if not moving.any():
        return img.copy()
    h, w = flow.shape
    gx, gy = np.meshgrid(np.arange(w, dtype=np.float64), np.arange(h, dtype=np.float64))
    map_x = (gx - flow.flow[..., 0]).astype(np.float32)
    map_y = (gy - flow.flow[..., 1]).astype(np.float32)
    sampled = cv2.remap(
        img.astype(np.float32),
        map_x,
        map_y,
        interpolation=cv2.INTER_LINEAR,
        borderMode=cv2.BORDER_REPLICATE,
    )
    sampled = sampled.reshape(img.shape).astype(np.float64)
    sel = moving[..., None] if img.ndim == 3 else moving
    return np.where(sel, sampled, img)
