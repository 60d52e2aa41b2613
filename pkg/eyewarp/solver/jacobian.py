# eyewarp/solver/jacobian.py
"""
Numerical Jacobian of the linearized residual vector.

Column k is the central difference (r(Φ + h e_k) − r(Φ − h e_k)) / 2h, with
the stencil clipped to the parameter box (a clipped stencil becomes one
sided). Columns are independent renders and run on a thread pool; results
are gathered by column index.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..energy.objective import Evaluation, Objective
from ..exceptions import EyeWarpError, JacobianError
from ..model.params import LOWER_BOUNDS, UPPER_BOUNDS, ParameterVector, flat_names


def _at(x: np.ndarray, k: int, value: float) -> ParameterVector:
    y = x.copy()
    y[k] = value
    return ParameterVector.from_array(y)


def jacobian(
    objective: Objective,
    at: Evaluation | ParameterVector,
    indices: np.ndarray,
    steps: np.ndarray,
    *,
    threads: int = 1,
) -> np.ndarray:
    """
    J_r restricted to the flat parameter *indices*; *steps* holds one step per index.

    Raises JacobianError naming the parameter whose perturbed evaluation failed.
    """
    reference = objective.evaluate(at) if isinstance(at, ParameterVector) else at
    x0 = reference.params.to_array()
    names = flat_names()
    indices = np.asarray(indices, dtype=np.intp)
    steps = np.broadcast_to(np.asarray(steps, dtype=np.float64), indices.shape)
    n_rows = len(reference.residuals)

    def column(j: int) -> np.ndarray:
        k = int(indices[j])
        plus = min(x0[k] + steps[j], UPPER_BOUNDS[k])
        minus = max(x0[k] - steps[j], LOWER_BOUNDS[k])
        if plus <= minus:
            return np.zeros(n_rows)
        try:
            r_plus = objective.residuals_at(_at(x0, k, plus), reference)
            r_minus = objective.residuals_at(_at(x0, k, minus), reference)
        except EyeWarpError as exc:
            raise JacobianError(names[k], exc) from exc
        return (r_plus - r_minus) / (plus - minus)

    if len(indices) == 0:
        return np.zeros((n_rows, 0))
    if threads <= 1:
        cols = [column(j) for j in range(len(indices))]
    else:
        with ThreadPoolExecutor(max_workers=threads, thread_name_prefix="eyewarp-jac") as pool:
            cols = list(pool.map(column, range(len(indices))))
    return np.stack(cols, axis=1)
