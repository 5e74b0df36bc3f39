"""Non-stationarity metrics for risk-level and cost-function schedules.

Risk-level variation is the summed absolute drift of the alpha sequence.
Function variation sums, over consecutive steps, the supremum (over a
decision grid) of the expected absolute cost change (by quadrature over the
noise law): sup_x E_xi |J_t(x, xi) - J_{t-1}(x, xi)|.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .learner import FeasibleSet
from .oracle import _grid_points, quadrature


def risk_variation(values) -> float:
    """sum_{t>=2} |alpha_t - alpha_{t-1}|; zero for a single step."""
    arr = np.asarray(values, dtype=np.float64).ravel()
    if arr.size == 0:
        raise ValueError("empty risk schedule")
    if np.any(arr <= 0.0) or np.any(arr > 1.0):
        raise ValueError("risk levels must lie in (0, 1]")
    if arr.size == 1:
        return 0.0
    return float(np.sum(np.abs(np.diff(arr))))


@dataclass(frozen=True)
class FunctionVariation:
    """Computed drift total plus the resolutions it was measured at."""

    value: float
    grid_points: int
    quad_points: int


def function_variation(scenario, fset: Optional[FeasibleSet] = None,
                       quad_points: int = 129,
                       grid_points: int = 1001) -> FunctionVariation:
    """Summed sup-norm drift of the expected absolute cost change.

    The supremum is a grid search over the feasible box, the expectation a
    fixed quadrature over the noise law. Steps with identical descriptors
    contribute zero and are skipped.
    """
    if quad_points < 2 or grid_points < 2:
        raise ValueError("resolutions must be >= 2")
    fset = fset if fset is not None else scenario.feasible
    nodes, weights = quadrature(scenario.noise, quad_points)
    points = _grid_points(fset.lo, fset.hi, grid_points)
    descr = getattr(scenario, "cost_descriptor", None)
    total = 0.0
    for t in range(2, scenario.T + 1):
        if descr is not None and descr(t) == descr(t - 1):
            continue  # identical cost function, zero summand
        diff = np.abs(scenario.cost_points(t, points, nodes)
                      - scenario.cost_points(t - 1, points, nodes))
        total += float(np.max(diff @ weights))
    return FunctionVariation(value=total, grid_points=grid_points,
                             quad_points=quad_points)
