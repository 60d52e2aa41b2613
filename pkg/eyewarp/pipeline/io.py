# eyewarp/pipeline/io.py
"""
Frame, landmark, gaze-target and record I/O.

File formats
------------
Frames          numbered images matched by a glob (PNG, PPM, anything
                OpenCV reads); sorted by name, indexed from 0.
Landmarks       text, one line per frame:
                  <frame> u0 v0 … u24 v24 [x0 y0 z0 … x24 y24 z24]
                2D positions in pixels, optional 3D positions in camera
                space (mm). Blank lines and '#' comments are ignored.
Gaze targets    text, one line per frame, either
                  <frame> x y z                         camera-space target (mm)
                  <frame> angles pitch yaw [vergence]   explicit angles (degrees)
Records         JSON lines, one FrameRecord (or trace row) per line.
"""

from __future__ import annotations

import glob
import json
import math
from collections.abc import Iterable
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import cv2
import numpy as np
from pydantic import ValidationError

from ..constants import N_LANDMARKS
from ..exceptions import FrameSequenceError, InputError, LandmarkFileError
from ..models import FrameRecord, RedirectRequest

FRAME_NAME = "frame_{:05d}.png"


# ---------------------------------------------------------------------------
# Frames
# ---------------------------------------------------------------------------


def list_frames(pattern: str) -> list[Path]:
    """Frame paths matching *pattern*, sorted by name."""
    paths = sorted(Path(p) for p in glob.glob(pattern))
    if not paths:
        raise FrameSequenceError(f"no frames match '{pattern}'")
    return paths


def read_frame(path: str | Path) -> np.ndarray:
    """RGB float image in [0, 1]."""
    data = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if data is None:
        raise FrameSequenceError(f"cannot read frame {path}")
    if data.ndim == 2:
        data = cv2.cvtColor(data, cv2.COLOR_GRAY2BGR)
    elif data.shape[2] == 4:
        data = cv2.cvtColor(data, cv2.COLOR_BGRA2BGR)
    scale = 65535.0 if data.dtype == np.uint16 else 255.0
    return cv2.cvtColor(data, cv2.COLOR_BGR2RGB).astype(np.float64) / scale


def write_frame(path: str | Path, image: np.ndarray) -> Path:
    """Write an RGB float image as 8-bit."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = np.round(np.clip(image, 0.0, 1.0) * 255.0).astype(np.uint8)
    if not cv2.imwrite(str(path), cv2.cvtColor(data, cv2.COLOR_RGB2BGR)):
        raise InputError(f"cannot write frame {path}")
    return path


# ---------------------------------------------------------------------------
# Landmarks
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LandmarkRecord:
    frame: int
    points: np.ndarray
    points_3d: np.ndarray | None = None


def _records(path: Path) -> Iterable[tuple[int, list[str]]]:
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if line:
            yield number, line.split()


def _frame_index(token: str, number: int) -> int:
    try:
        frame = int(token)
    except ValueError:
        raise LandmarkFileError(f"frame index '{token}' is not an integer", number) from None
    if frame < 0:
        raise LandmarkFileError(f"negative frame index {frame}", number)
    return frame


def _floats(tokens: list[str], number: int) -> np.ndarray:
    try:
        values = np.array([float(t) for t in tokens])
    except ValueError:
        raise LandmarkFileError("non-numeric value", number) from None
    if not np.all(np.isfinite(values)):
        raise LandmarkFileError("non-finite value", number)
    return values


def read_landmarks(path: str | Path) -> dict[int, LandmarkRecord]:
    """Landmark records keyed by frame index."""
    path = Path(path)
    n2, n3 = 2 * N_LANDMARKS, 3 * N_LANDMARKS
    out: dict[int, LandmarkRecord] = {}
    for number, tokens in _records(path):
        frame = _frame_index(tokens[0], number)
        values = _floats(tokens[1:], number)
        if len(values) not in (n2, n2 + n3):
            raise LandmarkFileError(f"expected {n2} or {n2 + n3} values, got {len(values)}", number)
        if frame in out:
            raise LandmarkFileError(f"duplicate record for frame {frame}", number)
        points_3d = values[n2:].reshape(N_LANDMARKS, 3) if len(values) > n2 else None
        out[frame] = LandmarkRecord(frame, values[:n2].reshape(N_LANDMARKS, 2), points_3d)
    return out


def write_landmarks(path: str | Path, records: Iterable[LandmarkRecord]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    for rec in records:
        values = [rec.points.reshape(-1)]
        if rec.points_3d is not None:
            values.append(rec.points_3d.reshape(-1))
        lines.append(" ".join([str(rec.frame), *(repr(float(v)) for v in np.concatenate(values))]))
    path.write_text("\n".join(lines) + "\n")
    return path


# ---------------------------------------------------------------------------
# Gaze targets
# ---------------------------------------------------------------------------


def read_targets(path: str | Path) -> dict[int, RedirectRequest]:
    """Per-frame redirect requests from a gaze-target script."""
    path = Path(path)
    out: dict[int, RedirectRequest] = {}
    for number, tokens in _records(path):
        frame = _frame_index(tokens[0], number)
        if frame in out:
            raise LandmarkFileError(f"duplicate target for frame {frame}", number)
        try:
            if tokens[1:2] == ["angles"]:
                values = _floats(tokens[2:], number)
                if len(values) not in (2, 3):
                    raise LandmarkFileError("angles need pitch, yaw and optional vergence", number)
                pitch, yaw, vergence = (math.radians(v) for v in (*values, 0.0)[:3])
                out[frame] = RedirectRequest.angles(pitch, yaw, vergence)
            else:
                values = _floats(tokens[1:], number)
                if len(values) != 3:
                    raise LandmarkFileError(f"expected x y z, got {len(values)} value(s)", number)
                out[frame] = RedirectRequest.at(*values.tolist())
        except ValidationError as exc:
            raise LandmarkFileError(str(exc), number) from exc
    return out


# ---------------------------------------------------------------------------
# JSON-lines records
# ---------------------------------------------------------------------------


def write_records(path: str | Path, records: Iterable[FrameRecord]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(r.model_dump_json() + "\n" for r in records))
    return path


def read_records(path: str | Path) -> dict[int, FrameRecord]:
    """FrameRecords keyed by frame index."""
    path = Path(path)
    out: dict[int, FrameRecord] = {}
    for number, line in _json_lines(path):
        try:
            record = FrameRecord.model_validate_json(line)
        except ValidationError as exc:
            raise InputError(f"{path}:{number}: invalid frame record: {exc}") from exc
        out[record.frame] = record
    return out


def append_jsonl(path: str | Path, rows: Iterable[dict[str, Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "a") as f:
        for row in rows:
            f.write(json.dumps(row) + "\n")
    return path


def read_jsonl(path: str | Path) -> list[dict[str, Any]]:
    path = Path(path)
    rows = []
    for number, line in _json_lines(path):
        try:
            rows.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}:{number}: {exc}") from exc
    return rows


def _json_lines(path: Path) -> Iterable[tuple[int, str]]:
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    for number, line in enumerate(text.splitlines(), start=1):
        if line.strip():
            yield number, line
