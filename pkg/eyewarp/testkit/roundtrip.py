# eyewarp/testkit/roundtrip.py
"""
Synthetic fit round trip.

Each frame is rendered from a sampled ground-truth Φ. The fit starts from
that Φ with the gaze, translation and eyelid perturbed, and is scored by
the angle between the fitted and true gaze directions. The report also
keeps the E_img and E_ldmks ratios at a fixed iteration, which show the
shape of convergence.
"""

from __future__ import annotations

import logging
import math
import time

import numpy as np
from pydantic import BaseModel, Field

from ..config import FitConfig, RenderOptions
from ..constants import (
    ROUND_TRIP_GAZE_DEG,
    ROUND_TRIP_LID_DEG,
    ROUND_TRIP_REPORT_ITERATION,
    ROUND_TRIP_TRANSLATION_MM,
)
from ..energy.objective import Objective
from ..energy.terms import Observation, synth_landmarks
from ..model.assets import EyeRegionModel
from ..model.params import ParameterVector
from ..model.posing import gaze_direction
from ..model.scene import landmarks_3d, pose_scene
from ..models import FitTrace
from ..render.camera import Camera
from ..render.renderer import render
from ..solver.gauss_newton import fit

logger = logging.getLogger(__name__)


class RoundTripRow(BaseModel):
    """One fitted frame."""

    frame: int = Field(..., ge=0)
    start_error_deg: float = Field(..., ge=0.0)
    gaze_error_deg: float = Field(..., ge=0.0)
    iterations: int = Field(..., ge=0)
    monotone: bool
    e_img_ratio: float = Field(..., ge=0.0)
    e_ldmks_ratio: float = Field(..., ge=0.0)
    elapsed_ms: float = Field(..., ge=0.0)


class RoundTripReport(BaseModel):
    rows: list[RoundTripRow] = Field(default_factory=list)

    def __len__(self) -> int:
        return len(self.rows)

    def gaze_errors(self) -> np.ndarray:
        return np.array([r.gaze_error_deg for r in self.rows])

    def percentile(self, q: float) -> float:
        """Gaze-error percentile in degrees; NaN for an empty report."""
        return float(np.percentile(self.gaze_errors(), q)) if self.rows else math.nan

    @property
    def median_error(self) -> float:
        return self.percentile(50.0)

    @property
    def all_monotone(self) -> bool:
        return all(r.monotone for r in self.rows)

    def median_ratios(self) -> dict[str, float]:
        if not self.rows:
            return {"e_img": math.nan, "e_ldmks": math.nan}
        return {
            "e_img": float(np.median([r.e_img_ratio for r in self.rows])),
            "e_ldmks": float(np.median([r.e_ldmks_ratio for r in self.rows])),
        }

    def to_tsv(self) -> str:
        lines = ["frame\tstart_deg\terror_deg\titerations\tmonotone\te_img_ratio\te_ldmks_ratio\tms"]
        lines += [
            f"{r.frame}\t{r.start_error_deg:.3f}\t{r.gaze_error_deg:.3f}\t{r.iterations}\t{int(r.monotone)}"
            f"\t{r.e_img_ratio:.4f}\t{r.e_ldmks_ratio:.4f}\t{r.elapsed_ms:.0f}"
            for r in self.rows
        ]
        return "\n".join(lines) + "\n"


def gaze_error_deg(a: ParameterVector, b: ParameterVector) -> float:
    """Angle between the head-relative gaze directions of *a* and *b*."""
    cos = float(np.dot(gaze_direction(a.theta_p, a.theta_y), gaze_direction(b.theta_p, b.theta_y)))
    return math.degrees(math.acos(min(1.0, max(-1.0, cos))))


def sample_truth(rng: np.random.Generator, base: ParameterVector | None = None) -> ParameterVector:
    """A plausible frame: random identity, small head motion, gaze within ±10° pitch and ±15° yaw."""
    base = base or ParameterVector()
    pitch = math.radians(float(rng.uniform(-10.0, 10.0)))
    return base.replace(
        beta_face=tuple(rng.normal(0.0, 0.3, size=len(base.beta_face))),
        tau_face=tuple(rng.normal(0.0, 0.3, size=len(base.tau_face))),
        theta_R=tuple(rng.uniform(-0.05, 0.05, size=3)),
        theta_T=tuple(np.asarray(base.theta_T) + rng.uniform(-3.0, 3.0, size=3)),
        theta_p=pitch,
        theta_y=math.radians(float(rng.uniform(-15.0, 15.0))),
        theta_lid=pitch,
    )


def perturb(truth: ParameterVector, rng: np.random.Generator) -> ParameterVector:
    """Gaze ±10° per angle, translation ±5 mm per axis, eyelid ±5°."""
    gaze = np.radians(rng.uniform(-ROUND_TRIP_GAZE_DEG, ROUND_TRIP_GAZE_DEG, size=2))
    return truth.replace(
        theta_p=truth.theta_p + float(gaze[0]),
        theta_y=truth.theta_y + float(gaze[1]),
        theta_T=tuple(
            np.asarray(truth.theta_T) + rng.uniform(-ROUND_TRIP_TRANSLATION_MM, ROUND_TRIP_TRANSLATION_MM, size=3)
        ),
        theta_lid=truth.theta_lid + math.radians(float(rng.uniform(-ROUND_TRIP_LID_DEG, ROUND_TRIP_LID_DEG))),
    )


def _ratio(trace: FitTrace, term: str) -> float:
    entry = trace.entries[min(ROUND_TRIP_REPORT_ITERATION, len(trace.entries) - 1)]
    start = getattr(trace.entries[0].energy, term)
    return getattr(entry.energy, term) / start if start > 0.0 else 0.0


def fit_round_trip(
    model: EyeRegionModel,
    camera: Camera,
    n: int,
    *,
    seed: int = 0,
    config: FitConfig | None = None,
    render_options: RenderOptions | None = None,
    threads: int = 1,
) -> RoundTripReport:
    """Render, perturb and refit *n* sampled frames (full mask unless *config* says otherwise)."""
    rng = np.random.default_rng(seed)
    report = RoundTripReport()
    for frame in range(n):
        truth = sample_truth(rng)
        init = perturb(truth, rng)
        image = render(pose_scene(truth, model), camera, options=render_options).color
        observation = Observation(image, synth_landmarks(truth, model, camera), landmarks_3d(truth, model))
        objective = Objective(model, observation, camera, render_options=render_options)
        start = time.perf_counter()
        result = fit(objective, init, config, threads=threads)
        elapsed = (time.perf_counter() - start) * 1e3
        energies = result.trace.energies
        row = RoundTripRow(
            frame=frame,
            start_error_deg=gaze_error_deg(init, truth),
            gaze_error_deg=gaze_error_deg(result.params, truth),
            iterations=result.trace.iterations,
            monotone=all(b <= a for a, b in zip(energies, energies[1:])),
            e_img_ratio=_ratio(result.trace, "e_img"),
            e_ldmks_ratio=_ratio(result.trace, "e_ldmks"),
            elapsed_ms=elapsed,
        )
        logger.debug(
            "round trip %d: %.2f° -> %.2f° in %d iterations", frame, row.start_error_deg, row.gaze_error_deg, row.iterations
        )
        report.rows.append(row)
    if report.rows:
        logger.info(
            "round trip: %d frames, median %.2f°, p90 %.2f°", n, report.median_error, report.percentile(90.0)
        )
    return report
