"""CVaR gradient estimators.

Two routes to a descent direction for the CVaR objective:

* ``first_order_gradient`` - from a batch of sampled costs and cost
  gradients, re-weighting the gradients of the samples at or above the batch
  VaR by 1/(n * alpha).
* ``zeroth_order_gradient`` - single-point sphere smoothing: the CVaR value
  observed at a perturbed decision, scaled by (d / delta) along the
  perturbation direction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _core
from .distributions import RiskLevel, _check_alpha


@dataclass(frozen=True)
class SampleBatch:
    """Sampled costs (and, for first-order feedback, cost gradients).

    ``costs`` has shape (n,); ``grads`` is None or of shape (n, d).
    """

    costs: np.ndarray
    grads: Optional[np.ndarray] = None

    def __post_init__(self):
        costs = np.asarray(self.costs, dtype=np.float64).ravel()
        object.__setattr__(self, "costs", costs)
        if costs.size == 0:
            raise ValueError("empty sample batch")
        if not np.all(np.isfinite(costs)):
            raise ValueError("non-finite sample")
        if self.grads is not None:
            grads = np.asarray(self.grads, dtype=np.float64)
            if grads.ndim == 1:
                grads = grads[:, None]
            object.__setattr__(self, "grads", grads)
            if grads.shape[0] != costs.shape[0]:
                raise ValueError("gradient count does not match cost count")
            if not np.all(np.isfinite(grads)):
                raise ValueError("non-finite gradient")

    @property
    def n(self) -> int:
        return int(self.costs.shape[0])


@dataclass(frozen=True)
class SmoothingParams:
    """Sphere-smoothing configuration: perturbation radius and decision dim."""

    delta: float
    d: int

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError("smoothing radius must be positive")
        if self.d < 1:
            raise ValueError("decision dimension must be >= 1")


@dataclass(frozen=True)
class GradientEstimate:
    g: np.ndarray
    kind: str  # "first_order" | "zeroth_order"
    active_count: Optional[int] = None  # first-order: samples with indicator 1

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.g))


def first_order_gradient(batch: SampleBatch, alpha: RiskLevel) -> GradientEstimate:
    """(1/(n alpha)) * sum_i 1{J_i >= batch VaR} * grad J_i.

    One VaR threshold is shared by the whole batch. The indicator is
    non-strict, so at least one sample is always active; ties at the
    threshold are all included with no re-weighting.
    """
    alpha = _check_alpha(alpha)
    if batch.grads is None:
        raise ValueError("first-order estimator requires gradients")
    nu_hat = _core.var_sorted(np.sort(batch.costs), alpha)
    active = batch.costs >= nu_hat
    count = int(np.count_nonzero(active))
    g = batch.grads[active].sum(axis=0) / (batch.n * alpha)
    return GradientEstimate(g=g, kind="first_order", active_count=count)


def sample_unit_sphere(d: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform draw from the unit sphere in R^d (normalized Gaussian)."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    while True:
        u = rng.standard_normal(d)
        norm = float(np.linalg.norm(u))
        if norm > 0.0:  # zero vector has probability zero
            return u / norm


def zeroth_order_gradient(cvar_value: float, u: np.ndarray,
                          params: SmoothingParams) -> GradientEstimate:
    """(d / delta) * cvar_value * u for a unit direction u."""
    u = np.asarray(u, dtype=np.float64)
    if not np.isfinite(cvar_value):
        raise ValueError("non-finite CVaR value")
    g = (params.d / params.delta) * float(cvar_value) * u
    return GradientEstimate(g=g, kind="zeroth_order")


def smoothed_cvar_oracle(scenario, t: int, x, params: SmoothingParams,
                         m: int, rng: np.random.Generator,
                         quad_points: int = 1025) -> float:
    """Monte Carlo value of the sphere-smoothed ground-truth CVaR at x.

    Averages the true-CVaR oracle over ``m`` perturbed points x + delta * u.
    Test-support facility; the learner itself never calls this. The caller
    must keep x inside the shrunken feasible set so every perturbed point is
    admissible.
    """
    from .oracle import true_cvar

    if m < 1:
        raise ValueError("need at least one sphere draw")
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    total = 0.0
    for _ in range(m):
        u = sample_unit_sphere(params.d, rng)
        total += true_cvar(scenario, t, x + params.delta * u, quad_points)
    return total / m
