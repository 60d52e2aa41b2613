# eyewarp/solver/gauss_newton.py
"""
Annealed Gauss-Newton.

Each iteration solves the damped normal equations at the current iterate,
scales the step by η = η₀ · decay^(i−1) and accepts it only if the energy
does not increase. Damping follows Levenberg-Marquardt on unit-norm Jacobian
columns: each rejected step multiplies it by the growth factor (bounded
retries) and each accepted step divides it again.
Parameters outside the mask are never touched.
"""

from __future__ import annotations

import logging
from typing import NamedTuple

import numpy as np

from ..config import FitConfig
from ..constants import DAMPING_MIN
from ..energy.objective import Evaluation, Objective
from ..exceptions import EmptyForegroundError, ModelError, RenderError, SingularSystemError
from ..model.params import LOWER_BOUNDS, UPPER_BOUNDS, ParameterVector, mask_indices
from ..models import FitTrace, TraceEntry
from .jacobian import jacobian

logger = logging.getLogger(__name__)


class FitResult(NamedTuple):
    params: ParameterVector
    trace: FitTrace
    evaluation: Evaluation


def gauss_newton_step(J: np.ndarray, r: np.ndarray, eta: float, damping: float) -> np.ndarray:
    """ΔΦ = −η (JᵀJ + damping·I)⁻¹ Jᵀr."""
    J = np.asarray(J, dtype=np.float64)
    normal = J.T @ J
    normal[np.diag_indices_from(normal)] += damping
    try:
        delta = np.linalg.solve(normal, -(J.T @ np.asarray(r, dtype=np.float64)))
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(f"normal equations are singular (damping {damping:.3g})") from exc
    if not np.all(np.isfinite(delta)):
        raise SingularSystemError(f"normal equations gave a non-finite step (damping {damping:.3g})")
    return eta * delta


def _column_scales(J: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(J, axis=0)
    return np.where(norms > 0.0, norms, 1.0)


def fit(
    objective: Objective,
    init: ParameterVector,
    config: FitConfig | None = None,
    *,
    threads: int = 1,
) -> FitResult:
    """
    Minimize E(Φ) from *init*.

    Raises EmptyForegroundError when *init* renders off-screen. The returned
    parameters are the last accepted iterate, which is also the best seen.
    """
    cfg = config or FitConfig()
    idx = mask_indices(cfg.mask)
    steps = cfg.steps.as_array()[idx]
    lo, hi = LOWER_BOUNDS[idx], UPPER_BOUNDS[idx]

    current = objective.evaluate(init)
    trace = FitTrace(entries=[TraceEntry(iteration=0, energy=current.energy, params=init)])
    if current.energy.total == 0.0:
        return FitResult(params=init, trace=trace, evaluation=current)

    damping = max(cfg.damping, DAMPING_MIN)
    for iteration in range(1, cfg.max_iterations + 1):
        J = jacobian(objective, current, idx, steps, threads=threads)
        # unit-norm columns: damping·I acts as damping·diag(JᵀJ) on the raw system
        scales = _column_scales(J)
        eta = cfg.eta_initial * cfg.eta_decay ** (iteration - 1)
        x = current.params.to_array()
        accepted: Evaluation | None = None
        step_norm = 0.0
        rejected = 0
        while rejected <= cfg.max_step_retries:
            try:
                delta = gauss_newton_step(J / scales, current.residuals, eta, damping) / scales
            except SingularSystemError as exc:
                logger.warning("iteration %d: %s; retrying with more damping", iteration, exc)
                damping *= cfg.damping_growth
                rejected += 1
                continue
            x_new = x.copy()
            x_new[idx] = np.clip(x[idx] + delta, lo, hi)
            try:
                candidate = objective.evaluate(ParameterVector.from_array(x_new))
            except (EmptyForegroundError, ModelError, RenderError) as exc:
                logger.warning("iteration %d: step rejected (%s)", iteration, exc)
                damping *= cfg.damping_growth
                rejected += 1
                continue
            if candidate.energy.total <= current.energy.total:
                accepted = candidate
                step_norm = float(np.linalg.norm(x_new[idx] - x[idx]))
                break
            logger.debug(
                "iteration %d: step rejected, energy %.6g > %.6g; damping to %.3g",
                iteration,
                candidate.energy.total,
                current.energy.total,
                damping * cfg.damping_growth,
            )
            damping *= cfg.damping_growth
            rejected += 1

        if accepted is None:
            logger.info("stalled after %d iterations at E=%.6g", iteration - 1, current.energy.total)
            break

        previous = current.energy.total
        current = accepted
        trace.entries.append(
            TraceEntry(
                iteration=iteration,
                energy=current.energy,
                params=current.params,
                step_norm=step_norm,
                eta=eta,
                damping=damping,
                rejected_steps=rejected,
            )
        )
        logger.debug(
            "iteration %d: E=%.6g eta=%.3g damping=%.3g |step|=%.3g",
            iteration,
            current.energy.total,
            eta,
            damping,
            step_norm,
        )
        decrease = (previous - current.energy.total) / previous
        if current.energy.total == 0.0 or decrease < cfg.convergence_threshold:
            break
        damping = max(damping / cfg.damping_growth, DAMPING_MIN)

    return FitResult(params=current.params, trace=trace, evaluation=current)
