# eyewarp/pipeline/runner.py
"""
Command implementations behind the CLI.

Output directory layout
-----------------------
  phi.jsonl         fitted Φ* per frame (FrameRecord)
  trace.jsonl       per-iteration energies of every fit
  redirect.jsonl    Φ′ and timings per redirected frame
  frames/           redirected (or synthesized) frames
  truth.jsonl       synthesized ground truth (synth)
  landmarks.txt     synthesized 2D + 3D landmarks (synth)
  debug/            optional render / depth / flow dumps
  benchmark.tsv     redirection ablation (benchmark)
  round_trip.tsv    synthetic fit round trip (benchmark)
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from ..config import RunConfig, RuntimeSettings
from ..energy.objective import Objective
from ..energy.terms import Observation, synth_landmarks
from ..exceptions import FrameSequenceError, InputError
from ..model.assets import EyeRegionModel
from ..model.params import ParameterVector
from ..model.scene import landmarks_3d, pose_scene
from ..models import FrameRecord
from ..redirect.redirector import redirect_frame
from ..render.camera import Camera, default_camera
from ..render.pfm import write_flow, write_pfm
from ..render.renderer import render
from ..solver.gauss_newton import fit
from ..solver.initialize import initialize
from ..testkit.benchmark import BenchmarkTable, benchmark_redirection
from ..testkit.roundtrip import RoundTripReport, fit_round_trip
from ..testkit.selftest import CheckResult, run_selftest
from ..testkit.synthetic import SyntheticModelSpec, build_model
from .io import (
    FRAME_NAME,
    LandmarkRecord,
    append_jsonl,
    list_frames,
    read_frame,
    read_landmarks,
    read_records,
    read_targets,
    write_frame,
    write_landmarks,
    write_records,
)

logger = logging.getLogger(__name__)


def _frames(config: RunConfig) -> list[Path]:
    if not config.frames:
        raise FrameSequenceError("config field 'frames' is required for this command")
    return list_frames(config.frames)


def _camera(config: RunConfig, image: np.ndarray) -> Camera:
    return config.camera.for_size(image.shape[1], image.shape[0])


def _check_size(image: np.ndarray, camera: Camera, path: Path) -> None:
    if image.shape[:2] != camera.shape:
        raise FrameSequenceError(f"{path} is {image.shape[1]}x{image.shape[0]}, expected {camera.width}x{camera.height}")


# ---------------------------------------------------------------------------
# fit
# ---------------------------------------------------------------------------


def cmd_fit(config: RunConfig, settings: RuntimeSettings | None = None) -> list[FrameRecord]:
    """
    Fit every frame in sequence and write phi.jsonl and trace.jsonl.

    The first frame with landmarks is initialized from its 3D landmarks and
    fitted over the full mask; later frames start from the previous Φ* and
    fit the video mask. Frames without a landmark record are skipped and
    carry the previous Φ* forward.
    """
    settings = settings or RuntimeSettings()
    config.check_paths("assets", "landmarks")
    paths = _frames(config)
    model = EyeRegionModel.load(config.assets)
    assert config.landmarks is not None
    landmarks = read_landmarks(config.landmarks)
    config.output.mkdir(parents=True, exist_ok=True)
    trace_path = config.output / "trace.jsonl"
    trace_path.unlink(missing_ok=True)

    camera: Camera | None = None
    previous: ParameterVector | None = None
    records: list[FrameRecord] = []
    for frame, path in enumerate(paths):
        image = read_frame(path)
        if camera is None:
            camera = _camera(config, image)
        _check_size(image, camera, path)
        record = landmarks.get(frame)
        if record is None:
            logger.warning("frame %d: no landmark record; carrying the previous fit forward", frame)
            records.append(FrameRecord(frame=frame, params=previous or ParameterVector(), skipped=True))
            continue

        start = time.perf_counter()
        observation = Observation(image, record.points, record.points_3d)
        if previous is None:
            init = initialize(observation, model).params
            fit_config = config.fit
        else:
            init = previous
            fit_config = config.fit.model_copy(update={"mask": config.fit.video_mask})
        objective = Objective(
            model, observation, camera, weights=config.weights, render_options=config.render
        )
        result = fit(objective, init, fit_config, threads=settings.threads)
        fit_ms = (time.perf_counter() - start) * 1e3
        previous = result.params
        records.append(
            FrameRecord(
                frame=frame,
                params=result.params,
                energy=result.evaluation.energy,
                iterations=result.trace.iterations,
                fit_ms=fit_ms,
            )
        )
        append_jsonl(trace_path, result.trace.to_records(frame))
        logger.info(
            "frame %d: E=%.5g after %d iterations (%.0f ms)",
            frame,
            result.evaluation.energy.total,
            result.trace.iterations,
            fit_ms,
        )
        if config.debug.dump_render:
            write_frame(config.output / "debug" / f"render_{frame:05d}.png", result.evaluation.raster.color)
        if config.debug.dump_depth:
            (config.output / "debug").mkdir(parents=True, exist_ok=True)
            write_pfm(config.output / "debug" / f"depth_{frame:05d}.pfm", result.evaluation.raster.depth)

    write_records(config.params_path, records)
    return records


# ---------------------------------------------------------------------------
# redirect
# ---------------------------------------------------------------------------


def cmd_redirect(
    config: RunConfig,
    targets: Path | None = None,
    settings: RuntimeSettings | None = None,
) -> list[FrameRecord]:
    """
    Redirect every frame with a target; frames without one pass through.

    Frames are independent and run on a thread pool; outputs are written
    under output/frames and Φ′ per frame to redirect.jsonl.
    """
    settings = settings or RuntimeSettings()
    if targets is not None:
        config = config.model_copy(update={"targets": targets})
    config.check_paths("assets", "targets")
    if not config.params_path.exists():
        raise InputError(f"no fitted parameters at {config.params_path}; run 'eyewarp fit' first")
    paths = _frames(config)
    model = EyeRegionModel.load(config.assets)
    fitted = read_records(config.params_path)
    assert config.targets is not None
    requests = read_targets(config.targets)
    out_dir = config.output / "frames"
    out_dir.mkdir(parents=True, exist_ok=True)
    camera = _camera(config, read_frame(paths[0]))

    def one(frame: int) -> FrameRecord:
        path = paths[frame]
        image = read_frame(path)
        _check_size(image, camera, path)
        request = requests.get(frame)
        record = fitted.get(frame)
        if request is None or record is None or record.skipped:
            logger.info("frame %d: no %s; passing through", frame, "target" if request is None else "fit")
            write_frame(out_dir / FRAME_NAME.format(frame), image)
            params = record.params if record is not None else ParameterVector()
            return FrameRecord(frame=frame, params=params, skipped=True)
        result = redirect_frame(
            image,
            record.params,
            request,
            model,
            camera,
            options=config.redirect,
            render_options=config.render,
        )
        write_frame(out_dir / FRAME_NAME.format(frame), result.image)
        if config.debug.dump_flow and result.flow is not None:
            (config.output / "debug").mkdir(parents=True, exist_ok=True)
            write_flow(config.output / "debug" / f"flow_{frame:05d}.pfm", result.flow.flow)
        logger.info("frame %d: redirected in %.0f ms", frame, result.elapsed_ms)
        return FrameRecord(
            frame=frame,
            params=result.params,
            fit_ms=record.fit_ms,
            redirect_ms=result.elapsed_ms,
            reflection_map=result.reflection_map,
        )

    frames = range(len(paths))
    if settings.threads <= 1:
        records = [one(i) for i in frames]
    else:
        with ThreadPoolExecutor(max_workers=settings.threads, thread_name_prefix="eyewarp-redirect") as pool:
            records = list(pool.map(one, frames))
    write_records(config.output / "redirect.jsonl", records)
    return records


# ---------------------------------------------------------------------------
# synth
# ---------------------------------------------------------------------------


def parse_grid(spec: str) -> list[tuple[float, float]]:
    """
    'pitch_min,pitch_max,yaw_min,yaw_max,step' (degrees) → (pitch, yaw) pairs.

    Endpoints are inclusive; pitch varies slowest.
    """
    try:
        p0, p1, y0, y1, step = (float(v) for v in spec.split(","))
    except ValueError:
        raise InputError(f"grid must be 'pitch_min,pitch_max,yaw_min,yaw_max,step', got '{spec}'") from None
    if step <= 0 or p1 < p0 or y1 < y0:
        raise InputError(f"invalid grid '{spec}'")

    def axis(lo: float, hi: float) -> list[float]:
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return [lo + i * step for i in range(count)]

    return [(p, y) for p in axis(p0, p1) for y in axis(y0, y1)]


def cmd_synth(
    config: RunConfig,
    grid: list[tuple[float, float]] | None = None,
    params: list[ParameterVector] | None = None,
) -> list[FrameRecord]:
    """
    Render ground-truth frames.

    With *grid* each (pitch, yaw) in degrees is applied to the base
    parameters from ``config.synth.params`` with the eyelid following the
    pitch; otherwise *params* (or the base parameters alone) are rendered.
    """
    config.check_paths("assets")
    model = EyeRegionModel.load(config.assets)
    opts = config.synth
    camera = config.camera.for_size(opts.width, opts.height)
    base = ParameterVector.create(**opts.params)
    if grid is not None:
        frames = [
            base.replace(theta_p=math.radians(p), theta_y=math.radians(y), theta_lid=math.radians(p)) for p, y in grid
        ]
    else:
        frames = params if params is not None else [base]

    out_dir = config.output / "frames"
    records: list[FrameRecord] = []
    marks: list[LandmarkRecord] = []
    for frame, phi in enumerate(frames):
        raster = render(pose_scene(phi, model, reflection_map=opts.reflection_map), camera, options=config.render)
        write_frame(out_dir / FRAME_NAME.format(frame), raster.color)
        marks.append(LandmarkRecord(frame, synth_landmarks(phi, model, camera), landmarks_3d(phi, model)))
        records.append(FrameRecord(frame=frame, params=phi, reflection_map=opts.reflection_map))
    write_records(config.output / "truth.jsonl", records)
    write_landmarks(config.output / "landmarks.txt", marks)
    logger.info("synthesized %d frame(s) at %dx%d into %s", len(frames), opts.width, opts.height, out_dir)
    return records


# ---------------------------------------------------------------------------
# selftest
# ---------------------------------------------------------------------------


def cmd_selftest(config: RunConfig | None = None, *, only: list[str] | None = None) -> list[CheckResult]:
    """Run the oracle suite on the configured asset, or a synthetic one."""
    if config is not None and config.assets.exists():
        model = EyeRegionModel.load(config.assets)
    else:
        model = build_model(SyntheticModelSpec(texture_size=64))
    return run_selftest(model, only=only)


# ---------------------------------------------------------------------------
# benchmark
# ---------------------------------------------------------------------------

BENCHMARK_TSV = "benchmark.tsv"
ROUND_TRIP_TSV = "round_trip.tsv"


def cmd_benchmark(
    config: RunConfig | None = None,
    *,
    pairs: int = 50,
    fits: int = 0,
    seed: int = 0,
    width: int = 128,
    height: int = 96,
    out_dir: Path | None = None,
) -> tuple[BenchmarkTable, RoundTripReport]:
    """
    Redirection ablation over *pairs* gaze changes and a fit round trip over
    *fits* frames, on the configured asset or a synthetic one.

    Each non-empty result is written as TSV into *out_dir* (default: the
    config's output directory, else the current directory).
    """
    if config is not None and config.assets.exists():
        model = EyeRegionModel.load(config.assets)
    else:
        model = build_model(SyntheticModelSpec(texture_size=64))
    camera = config.camera.for_size(width, height) if config is not None else default_camera(width, height)
    render_options = config.render if config is not None else None
    fit_config = config.fit if config is not None else None
    out = out_dir or (config.output if config is not None else Path("."))

    table = benchmark_redirection(model, camera, pairs, seed=seed, render_options=render_options)
    report = fit_round_trip(model, camera, fits, seed=seed, config=fit_config, render_options=render_options)
    if table.rows or report.rows:
        out.mkdir(parents=True, exist_ok=True)
    if table.rows:
        (out / BENCHMARK_TSV).write_text(table.to_tsv())
    if report.rows:
        (out / ROUND_TRIP_TSV).write_text(report.to_tsv())
    return table, report
