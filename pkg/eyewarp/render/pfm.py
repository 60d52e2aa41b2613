# eyewarp/render/pfm.py
"""
Portable float map dumps.

``PF``/``Pf`` files follow the usual layout (text header, scale -1.0 for
little-endian, float32 rows bottom to top). Flow fields use the same layout
with magic ``PFLO`` and two channels.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..exceptions import InputError

_MAGIC = {1: "Pf", 3: "PF", 2: "PFLO"}


def _write(path: Path, magic: str, data: np.ndarray) -> Path:
    h, w = data.shape[:2]
    rows = np.ascontiguousarray(np.flipud(data), dtype="<f4")
    with open(path, "wb") as f:
        f.write(f"{magic}\n{w} {h}\n-1.0\n".encode("ascii"))
        f.write(rows.tobytes())
    return path


def write_pfm(path: str | Path, image: np.ndarray) -> Path:
    """Write an (H, W) or (H, W, 3) float image; non-finite values are written as-is."""
    data = np.asarray(image)
    channels = 1 if data.ndim == 2 else data.shape[2]
    if channels not in (1, 3):
        raise ValueError(f"PFM holds 1 or 3 channels, got {channels}")
    return _write(Path(path), _MAGIC[channels], data)


def write_flow(path: str | Path, flow: np.ndarray) -> Path:
    """Write an (H, W, 2) displacement field."""
    data = np.asarray(flow)
    if data.ndim != 3 or data.shape[2] != 2:
        raise ValueError(f"flow must be (H, W, 2), got {data.shape}")
    return _write(Path(path), _MAGIC[2], data)


def _read(path: Path) -> tuple[str, np.ndarray]:
    try:
        with open(path, "rb") as f:
            magic = f.readline().decode("ascii").strip()
            dims = f.readline().decode("ascii").split()
            scale = float(f.readline().decode("ascii"))
            payload = f.read()
    except (OSError, UnicodeDecodeError, ValueError) as exc:
        raise InputError(f"cannot read float map {path}: {exc}") from exc
    channels = {v: k for k, v in _MAGIC.items()}.get(magic)
    if channels is None or len(dims) != 2:
        raise InputError(f"{path} is not a PFM/PFLO file (magic {magic!r})")
    w, h = int(dims[0]), int(dims[1])
    dtype = "<f4" if scale < 0 else ">f4"
    data = np.frombuffer(payload, dtype=dtype)
    if data.size != w * h * channels:
        raise InputError(f"{path}: expected {w * h * channels} floats, found {data.size}")
    shape = (h, w) if channels == 1 else (h, w, channels)
    return magic, np.flipud(data.reshape(shape)).astype(np.float32)


def read_pfm(path: str | Path) -> np.ndarray:
    magic, data = _read(Path(path))
    if magic == "PFLO":
        raise InputError(f"{path} is a flow file; use read_flow()")
    return data


def read_flow(path: str | Path) -> np.ndarray:
    magic, data = _read(Path(path))
    if magic != "PFLO":
        raise InputError(f"{path} is not a PFLO flow file")
    return data
