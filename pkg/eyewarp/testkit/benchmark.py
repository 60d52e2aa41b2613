# eyewarp/testkit/benchmark.py
"""
Synthetic redirection benchmark.

Each pair renders the same identity frontally and at a target gaze. The
frontal render is redirected to the target gaze with every RedirectMode and
compared with the target render by mean RGB distance over the union of
both foregrounds. With more of the pipeline enabled the error should drop:
full ≤ eyeballs ≤ none.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence

import numpy as np
from pydantic import BaseModel, Field

from ..config import RedirectOptions, RenderOptions
from ..constants import BENCH_MIN_CHANGE_DEG, BENCH_PITCH_RANGE_DEG, BENCH_YAW_RANGE_DEG
from ..model.assets import EyeRegionModel
from ..model.params import ParameterVector
from ..model.scene import pose_scene
from ..models import RedirectMode, RedirectRequest
from ..redirect.redirector import redirect_frame, repose
from ..render.camera import Camera
from ..render.renderer import render

logger = logging.getLogger(__name__)

MODES: tuple[RedirectMode, ...] = (RedirectMode.NONE, RedirectMode.EYEBALLS, RedirectMode.FULL)


class BenchmarkRow(BaseModel):
    """Errors of one (frontal, target) pair under each mode."""

    pair: int = Field(..., ge=0)
    pitch_deg: float
    yaw_deg: float
    none: float = Field(..., ge=0.0)
    eyeballs: float = Field(..., ge=0.0)
    full: float = Field(..., ge=0.0)

    @property
    def magnitude_deg(self) -> float:
        return math.hypot(self.pitch_deg, self.yaw_deg)

    @property
    def ordered(self) -> bool:
        return self.full <= self.eyeballs <= self.none

    def error(self, mode: RedirectMode) -> float:
        return float(getattr(self, mode.value))


class BenchmarkTable(BaseModel):
    rows: list[BenchmarkRow] = Field(default_factory=list)

    def __len__(self) -> int:
        return len(self.rows)

    def errors(self, mode: RedirectMode) -> np.ndarray:
        return np.array([r.error(mode) for r in self.rows])

    def means(self) -> dict[str, float]:
        """Mean error per mode; NaN for an empty table."""
        return {m.value: float(np.mean(self.errors(m))) if self.rows else math.nan for m in MODES}

    @property
    def fraction_ordered(self) -> float:
        if not self.rows:
            return math.nan
        return sum(r.ordered for r in self.rows) / len(self.rows)

    def curves(self, thresholds: Sequence[float]) -> dict[str, np.ndarray]:
        return {m.value: cumulative_error_curve(self.errors(m), thresholds) for m in MODES}

    def to_tsv(self) -> str:
        lines = ["pair\tpitch_deg\tyaw_deg\tnone\teyeballs\tfull"]
        lines += [
            f"{r.pair}\t{r.pitch_deg:.3f}\t{r.yaw_deg:.3f}\t{r.none:.6f}\t{r.eyeballs:.6f}\t{r.full:.6f}"
            for r in self.rows
        ]
        return "\n".join(lines) + "\n"


def cumulative_error_curve(errors: Sequence[float] | np.ndarray, thresholds: Sequence[float]) -> np.ndarray:
    """Fraction of *errors* at or below each threshold."""
    e = np.asarray(errors, dtype=np.float64)
    t = np.asarray(thresholds, dtype=np.float64)
    if e.size == 0:
        return np.zeros(len(t))
    return (e[None, :] <= t[:, None]).mean(axis=1)


def sample_gazes(n: int, seed: int = 0) -> list[tuple[float, float]]:
    """*n* (pitch, yaw) targets in degrees, each at least the minimum change away from frontal."""
    rng = np.random.default_rng(seed)
    out: list[tuple[float, float]] = []
    while len(out) < n:
        pitch = float(rng.uniform(-BENCH_PITCH_RANGE_DEG, BENCH_PITCH_RANGE_DEG))
        yaw = float(rng.uniform(-BENCH_YAW_RANGE_DEG, BENCH_YAW_RANGE_DEG))
        if math.hypot(pitch, yaw) >= BENCH_MIN_CHANGE_DEG:
            out.append((pitch, yaw))
    return out


def pair_error(
    model: EyeRegionModel,
    camera: Camera,
    source: ParameterVector,
    request: RedirectRequest,
    *,
    reflection_map: int = 0,
    render_options: RenderOptions | None = None,
) -> dict[RedirectMode, float]:
    """Redirection error of one pair under every mode."""
    target = repose(source, request, model)
    before = render(pose_scene(source, model, reflection_map=reflection_map), camera, options=render_options)
    truth = render(pose_scene(target, model, reflection_map=reflection_map), camera, options=render_options)
    region = (before.foreground | truth.foreground).reshape(-1)
    out: dict[RedirectMode, float] = {}
    for mode in MODES:
        result = redirect_frame(
            before.color,
            source,
            request,
            model,
            camera,
            options=RedirectOptions(mode=mode, select_reflection_map=False),
            render_options=render_options,
        )
        diff = (result.image - truth.color).reshape(-1, 3)[region]
        out[mode] = float(np.linalg.norm(diff, axis=1).mean()) if len(diff) else 0.0
    return out


def benchmark_redirection(
    model: EyeRegionModel,
    camera: Camera,
    n: int,
    *,
    seed: int = 0,
    source: ParameterVector | None = None,
    render_options: RenderOptions | None = None,
) -> BenchmarkTable:
    """Ablation table over *n* sampled gaze changes from a frontal source."""
    source = source or ParameterVector()
    table = BenchmarkTable()
    for i, (pitch, yaw) in enumerate(sample_gazes(n, seed)):
        request = RedirectRequest.angles(math.radians(pitch), math.radians(yaw), source.theta_v)
        errors = pair_error(model, camera, source, request, render_options=render_options)
        table.rows.append(
            BenchmarkRow(
                pair=i,
                pitch_deg=pitch,
                yaw_deg=yaw,
                none=errors[RedirectMode.NONE],
                eyeballs=errors[RedirectMode.EYEBALLS],
                full=errors[RedirectMode.FULL],
            )
        )
    if table.rows:
        logger.info("benchmark: %d pairs, means %s, ordered %.0f%%", n, table.means(), 100 * table.fraction_ordered)
    return table
