# eyewarp/pipeline/__init__.py
from .io import (
    LandmarkRecord,
    list_frames,
    read_frame,
    read_jsonl,
    read_landmarks,
    read_records,
    read_targets,
    write_frame,
    write_landmarks,
    write_records,
)
from .runner import cmd_benchmark, cmd_fit, cmd_redirect, cmd_selftest, cmd_synth, parse_grid

__all__ = [
    "LandmarkRecord",
    "list_frames",
    "read_frame",
    "read_jsonl",
    "read_landmarks",
    "read_records",
    "read_targets",
    "write_frame",
    "write_landmarks",
    "write_records",
    "cmd_benchmark",
    "cmd_fit",
    "cmd_redirect",
    "cmd_selftest",
    "cmd_synth",
    "parse_grid",
]
