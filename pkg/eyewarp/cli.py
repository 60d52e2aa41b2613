# eyewarp/cli.py
"""
CLI entry point for eyewarp.

Available commands:
  eyewarp fit       --config run.yaml
  eyewarp redirect  --config run.yaml [--targets targets.txt]
  eyewarp synth     --config run.yaml [--grid pmin,pmax,ymin,ymax,step]
  eyewarp selftest  [--config run.yaml] [--check NAME ...]
  eyewarp benchmark [--config run.yaml] [--pairs N] [--fits N] [--out DIR]
  eyewarp generate-model OUT_DIR [--seed N] [--texture-size S]
  eyewarp plot      TRACE.jsonl [--out plot.html]

Exit codes: 0 success, 1 input error, 2 numerical failure.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from pathlib import Path
from typing import Optional, TypeVar

import typer
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from .config import RunConfig, RuntimeSettings
from .exceptions import EyeWarpError
from .models import FrameRecord
from .pipeline.io import read_jsonl
from .pipeline.runner import cmd_benchmark, cmd_fit, cmd_redirect, cmd_selftest, cmd_synth, parse_grid
from .testkit.synthetic import SyntheticModelSpec, generate_model

app = typer.Typer(
    name="eyewarp",
    help="Fit a morphable eye-region model to video frames and redirect the gaze.",
    add_completion=False,
)
console = Console()

T = TypeVar("T")

BENCHMARK_THRESHOLDS = (0.01, 0.02, 0.05, 0.1)


def _setup_logging() -> RuntimeSettings:
    settings = RuntimeSettings()
    logging.basicConfig(
        level=settings.log_level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=console, rich_tracebacks=False, show_path=False)],
        force=True,
    )
    return settings


def _run(fn: Callable[[], T]) -> T:
    """Call *fn*, turning EyeWarpError into its exit code."""
    try:
        return fn()
    except EyeWarpError as exc:
        console.print(f"[red]{type(exc).__name__}:[/red] {exc}")
        raise typer.Exit(exc.exit_code) from exc


def _load(config: Path) -> RunConfig:
    return _run(lambda: RunConfig.from_yaml(config))


def _frames_table(title: str, records: list[FrameRecord]) -> Table:
    table = Table(title=title, show_lines=False)
    table.add_column("Frame", justify="right", style="bold cyan")
    table.add_column("Energy", justify="right")
    table.add_column("Iter", justify="right")
    table.add_column("Pitch°", justify="right")
    table.add_column("Yaw°", justify="right")
    table.add_column("Fit ms", justify="right")
    table.add_column("Redirect ms", justify="right")
    table.add_column("Status")
    for r in records:
        table.add_row(
            str(r.frame),
            f"{r.energy.total:.4g}" if r.energy is not None else "-",
            str(r.iterations),
            f"{math.degrees(r.params.theta_p):.1f}",
            f"{math.degrees(r.params.theta_y):.1f}",
            f"{r.fit_ms:.0f}",
            f"{r.redirect_ms:.0f}",
            "[yellow]skipped[/yellow]" if r.skipped else "[green]ok[/green]",
        )
    return table


ConfigOption = typer.Option(..., "--config", "-c", help="Path to run.yaml", exists=True, dir_okay=False)


@app.command()
def fit(config: Path = ConfigOption) -> None:
    """Fit Φ* to every frame (writes phi.jsonl and trace.jsonl)."""
    settings = _setup_logging()
    cfg = _load(config)
    records = _run(lambda: cmd_fit(cfg, settings))
    console.print(_frames_table("eyewarp fit", records))


@app.command()
def redirect(
    config: Path = ConfigOption,
    targets: Optional[Path] = typer.Option(None, "--targets", "-t", help="Gaze-target script"),  # noqa: UP007
) -> None:
    """Redirect the gaze of every fitted frame towards its target."""
    settings = _setup_logging()
    cfg = _load(config)
    records = _run(lambda: cmd_redirect(cfg, targets, settings))
    console.print(_frames_table("eyewarp redirect", records))


@app.command()
def synth(
    config: Path = ConfigOption,
    grid: Optional[str] = typer.Option(  # noqa: UP007
        None, "--grid", "-g", help="pitch_min,pitch_max,yaw_min,yaw_max,step in degrees"
    ),
) -> None:
    """Render ground-truth frames, landmarks and Φ records."""
    _setup_logging()
    cfg = _load(config)
    pairs = _run(lambda: parse_grid(grid)) if grid else None
    records = _run(lambda: cmd_synth(cfg, grid=pairs))
    console.print(f"[green]✓[/green] wrote {len(records)} frame(s) to {cfg.output}")


@app.command()
def selftest(
    config: Optional[Path] = typer.Option(None, "--config", "-c", help="Path to run.yaml"),  # noqa: UP007
    check: Optional[list[str]] = typer.Option(None, "--check", help="Run only the named check(s)"),  # noqa: UP007
) -> None:
    """Run the brute-force oracle suite; exits non-zero if any check fails."""
    _setup_logging()
    cfg = _load(config) if config is not None else None
    results = _run(lambda: cmd_selftest(cfg, only=check))
    table = Table(title="eyewarp selftest")
    table.add_column("Check", style="bold cyan")
    table.add_column("Result")
    table.add_column("Detail")
    table.add_column("ms", justify="right")
    for r in results:
        table.add_row(r.name, "[green]PASS[/green]" if r.passed else "[red]FAIL[/red]", r.detail, f"{r.elapsed_ms:.0f}")
    console.print(table)
    if not all(r.passed for r in results):
        raise typer.Exit(2)


@app.command()
def benchmark(
    config: Optional[Path] = typer.Option(None, "--config", "-c", help="Path to run.yaml"),  # noqa: UP007
    pairs: int = typer.Option(50, "--pairs", min=0, help="Redirection pairs"),
    fits: int = typer.Option(0, "--fits", min=0, help="Round-trip fits"),
    seed: int = typer.Option(0, "--seed", min=0, help="Sampling seed"),
    width: int = typer.Option(128, "--width", min=8),
    height: int = typer.Option(96, "--height", min=8),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Directory for the TSV tables"),  # noqa: UP007
) -> None:
    """Redirection ablation and synthetic fit round trip; writes TSV tables."""
    _setup_logging()
    cfg = _load(config) if config is not None else None
    table, report = _run(
        lambda: cmd_benchmark(cfg, pairs=pairs, fits=fits, seed=seed, width=width, height=height, out_dir=out)
    )
    if table.rows:
        summary = Table(title="Redirection error (mean RGB distance)")
        summary.add_column("Mode", style="bold cyan")
        summary.add_column("Mean", justify="right")
        for threshold in BENCHMARK_THRESHOLDS:
            summary.add_column(f"≤ {threshold:g}", justify="right")
        curves = table.curves(BENCHMARK_THRESHOLDS)
        for mode, mean in table.means().items():
            summary.add_row(mode, f"{mean:.4f}", *(f"{v:.0%}" for v in curves[mode]))
        console.print(summary)
        console.print(f"ordered full ≤ eyeballs ≤ none: {table.fraction_ordered:.0%} of {len(table)} pairs")
    if report.rows:
        ratios = report.median_ratios()
        console.print(
            f"round trip: {len(report)} fits, gaze error median {report.median_error:.2f}°, "
            f"p90 {report.percentile(90.0):.2f}°, E_img×{ratios['e_img']:.2f} E_ldmks×{ratios['e_ldmks']:.2f}"
        )


@app.command("generate-model")
def generate_model_cmd(
    out_dir: Path = typer.Argument(..., help="Asset directory to write"),
    seed: int = typer.Option(0, "--seed", min=0, help="Generator seed"),
    texture_size: int = typer.Option(512, "--texture-size", min=16, help="Face texture resolution"),
) -> None:
    """Write a seeded synthetic eye-region asset."""
    _setup_logging()
    path = _run(lambda: generate_model(SyntheticModelSpec(seed=seed, texture_size=texture_size), out_dir))
    console.print(f"[green]✓[/green] synthetic asset written to {path}")


@app.command()
def plot(
    trace: Path = typer.Argument(..., help="trace.jsonl from 'eyewarp fit'", exists=True, dir_okay=False),
    out: Path = typer.Option(Path("convergence.html"), "--out", "-o", help="Output HTML file"),
) -> None:
    """Plot per-frame energy against iteration."""
    try:
        import plotly.graph_objects as go
    except ImportError:
        typer.echo("plotly is required for plots. Install with: pip install 'eyewarp[plot]'", err=True)
        raise typer.Exit(1) from None

    rows = _run(lambda: read_jsonl(trace))
    fig = go.Figure()
    for frame in sorted({r.get("frame", 0) for r in rows}):
        sel = [r for r in rows if r.get("frame", 0) == frame]
        fig.add_trace(
            go.Scatter(x=[r["iteration"] for r in sel], y=[r["total"] for r in sel], mode="lines+markers", name=f"frame {frame}")
        )
    fig.update_layout(xaxis_title="iteration", yaxis_title="E(Φ)", yaxis_type="log")
    fig.write_html(str(out))
    console.print(f"[green]✓[/green] plot written to {out}")
