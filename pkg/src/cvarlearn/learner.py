"""Projected-descent learners for time-varying CVaR objectives.

Contains the box feasible-set machinery (projection and the inward-shrunken
set used by the perturbed-play learner), sampling-budget schedules, the
per-step update rules for both feedback models, and the horizon-level
parameter selection rules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .distributions import build_empirical, cvar, var_estimate
from .estimators import (
    GradientEstimate,
    SampleBatch,
    SmoothingParams,
    first_order_gradient,
    sample_unit_sphere,
    zeroth_order_gradient,
)

FIRST_ORDER = "first_order"
ZEROTH_ORDER = "zeroth_order"


@dataclass(frozen=True)
class FeasibleSet:
    """Axis-aligned box with an interior center used as shrinking origin."""

    lo: np.ndarray
    hi: np.ndarray
    center: np.ndarray
    kind: str = "box"

    @staticmethod
    def box(lo, hi, center=None) -> "FeasibleSet":
        lo = np.atleast_1d(np.asarray(lo, dtype=np.float64))
        hi = np.atleast_1d(np.asarray(hi, dtype=np.float64))
        if lo.shape != hi.shape:
            raise ValueError("bound shapes differ")
        if not np.all(lo < hi):
            raise ValueError("need lo < hi coordinate-wise")
        if center is None:
            center = (lo + hi) / 2.0
        else:
            center = np.atleast_1d(np.asarray(center, dtype=np.float64))
            if not (np.all(center > lo) and np.all(center < hi)):
                raise ValueError("center must be strictly inside the box")
        return FeasibleSet(lo=lo, hi=hi, center=center)

    @property
    def d(self) -> int:
        return int(self.lo.shape[0])

    @property
    def r(self) -> float:
        """Radius of the largest ball around the center inside the box."""
        return float(np.min(np.minimum(self.center - self.lo,
                                       self.hi - self.center)))

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.hi - self.lo))

    def contains(self, x, tol: float = 1e-9) -> bool:
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        return bool(np.all(x >= self.lo - tol) and np.all(x <= self.hi + tol))


def project(fset: FeasibleSet, x) -> np.ndarray:
    """Euclidean projection onto the box: coordinate-wise clamping."""
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    return np.clip(x, fset.lo, fset.hi)


def shrink_set(fset: FeasibleSet, delta: float) -> FeasibleSet:
    """Scale the box by (1 - delta/r) about its center.

    Every point of the result keeps distance >= delta from the boundary of
    the original set, so delta-radius perturbations stay admissible.
    """
    if delta < 0:
        raise ValueError("shrink amount must be nonnegative")
    r = fset.r
    if delta >= r:
        raise ValueError("smoothing radius exceeds inscribed radius")
    f = 1.0 - delta / r
    return FeasibleSet(lo=fset.center + f * (fset.lo - fset.center),
                       hi=fset.center + f * (fset.hi - fset.center),
                       center=fset.center)


@dataclass(frozen=True)
class SamplingSchedule:
    """Per-step sample counts n_t under the budget sum_t n_t^(-1/2) <= c T^(1-a/2)."""

    kind: str
    n_of_t: Callable[[int], int]
    a: float = 1.0
    c: float = 1.0

    @staticmethod
    def constant(n: int, a: float = 1.0, c: float = 1.0) -> "SamplingSchedule":
        if n < 1:
            raise ValueError("sample count must be >= 1")
        return SamplingSchedule(kind="constant", n_of_t=lambda t: n, a=a, c=c)

    @staticmethod
    def growing(a: float = 1.0, c: float = 1.0) -> "SamplingSchedule":
        """n_t = t; the classic increasing-batch rule."""
        return SamplingSchedule(kind="growing", n_of_t=lambda t: t, a=a, c=c)

    @staticmethod
    def custom(n_of_t: Callable[[int], int], a: float = 1.0,
               c: float = 1.0) -> "SamplingSchedule":
        return SamplingSchedule(kind="custom", n_of_t=n_of_t, a=a, c=c)


@dataclass(frozen=True)
class BudgetReport:
    lhs: float  # sum_t 1/sqrt(n_t)
    rhs: float  # c * T^(1 - a/2)
    ok: bool


def validate_budget(schedule: SamplingSchedule, T: int) -> BudgetReport:
    """Check the sampling budget by direct summation over the horizon."""
    if T < 1:
        raise ValueError("horizon must be >= 1")
    lhs = 0.0
    for t in range(1, T + 1):
        n = schedule.n_of_t(t)
        if n < 1:
            raise ValueError(f"n_t must be >= 1, got {n} at t={t}")
        lhs += 1.0 / math.sqrt(n)
    rhs = schedule.c * T ** (1.0 - schedule.a / 2.0)
    return BudgetReport(lhs=lhs, rhs=rhs, ok=lhs <= rhs)


def constant_schedule_for_budget(T: int, a: float, c: float) -> int:
    """Smallest constant per-step count meeting the budget: ceil(T^a / c^2)."""
    if a <= 0 or c <= 0:
        raise ValueError("budget parameters must be positive")
    return max(1, math.ceil(T ** a / c ** 2))


@dataclass(frozen=True)
class LearnerConfig:
    mode: str  # FIRST_ORDER | ZEROTH_ORDER
    eta: float
    feasible: FeasibleSet
    schedule: SamplingSchedule
    risk_schedule: Callable[[int], float]
    delta: float = 0.0  # smoothing radius, zeroth-order only

    def __post_init__(self):
        if self.mode not in (FIRST_ORDER, ZEROTH_ORDER):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.eta <= 0:
            raise ValueError("step size must be positive")
        if self.mode == ZEROTH_ORDER and not 0.0 < self.delta < self.feasible.r:
            raise ValueError("need 0 < delta < r for perturbed play")

    @property
    def shrunken(self) -> FeasibleSet:
        return shrink_set(self.feasible, self.delta)


@dataclass(frozen=True)
class LearnerState:
    t: int
    x: np.ndarray

    @staticmethod
    def initial(config: LearnerConfig, x1) -> "LearnerState":
        """State at t=1; the start point is projected onto the update set."""
        x = np.atleast_1d(np.asarray(x1, dtype=np.float64))
        target = config.shrunken if config.mode == ZEROTH_ORDER else config.feasible
        return LearnerState(t=1, x=project(target, x))


@dataclass(frozen=True)
class StepRecord:
    """What one step saw and did; consumed by the benchmark harness."""

    t: int
    x: np.ndarray                      # decision center x_t
    gradient: GradientEstimate
    alpha: float
    n: int
    nu_hat: Optional[float] = None     # first-order: batch VaR threshold
    cvar_estimate: Optional[float] = None  # zeroth-order: batch CVaR
    x_hat: Optional[np.ndarray] = None     # zeroth-order: played action
    u: Optional[np.ndarray] = None         # zeroth-order: sphere direction


def step_first_order(state: LearnerState, config: LearnerConfig,
                     batch: SampleBatch) -> tuple[LearnerState, StepRecord]:
    """One update from sampled costs and gradients taken at the current x."""
    if config.mode != FIRST_ORDER:
        raise ValueError("config is not first-order")
    alpha = config.risk_schedule(state.t)
    dist = build_empirical(batch.costs)
    nu_hat = var_estimate(dist, alpha)
    est = first_order_gradient(batch, alpha)
    x_next = project(config.feasible, state.x - config.eta * est.g)
    record = StepRecord(t=state.t, x=state.x, gradient=est, alpha=alpha,
                        n=batch.n, nu_hat=nu_hat)
    return LearnerState(t=state.t + 1, x=x_next), record


def step_zeroth_order(state: LearnerState, config: LearnerConfig,
                      sample_costs: Callable[[np.ndarray], np.ndarray],
                      rng: np.random.Generator
                      ) -> tuple[LearnerState, StepRecord]:
    """One update from cost evaluations at a sphere-perturbed play point.

    ``sample_costs`` receives the played action and must return the n_t cost
    evaluations observed there.
    """
    if config.mode != ZEROTH_ORDER:
        raise ValueError("config is not zeroth-order")
    alpha = config.risk_schedule(state.t)
    d = config.feasible.d
    shrunken = config.shrunken
    if not shrunken.contains(state.x):
        raise ValueError("decision left the shrunken feasible set")
    u = sample_unit_sphere(d, rng)
    x_hat = state.x + config.delta * u
    assert config.feasible.contains(x_hat), "perturbed play left the feasible set"
    costs = np.asarray(sample_costs(x_hat), dtype=np.float64)
    dist = build_empirical(costs)
    cvar_hat = cvar(dist, alpha)
    est = zeroth_order_gradient(cvar_hat, u, SmoothingParams(config.delta, d))
    x_next = project(shrunken, state.x - config.eta * est.g)
    record = StepRecord(t=state.t, x=state.x, gradient=est, alpha=alpha,
                        n=costs.shape[0], cvar_estimate=cvar_hat,
                        x_hat=x_hat, u=u)
    return LearnerState(t=state.t + 1, x=x_next), record


@dataclass(frozen=True)
class FirstOrderParams:
    eta: float
    delta_T: float  # analysis-side interval length, recorded only


@dataclass(frozen=True)
class ZerothOrderParams:
    eta: float
    delta: float
    delta_T: float


def _effective_variation(v_alpha: float, v_f: float) -> float:
    # The selection formulas are undefined at zero total variation; any
    # positive constant preserves the static-case rates.
    v = v_alpha + v_f
    return v if v > 0 else 1.0


def select_params_first_order(T: int, v_alpha: float,
                              v_f: float) -> FirstOrderParams:
    """Horizon-optimal step size eta = ((V_alpha + V_f) / T)^(1/3)."""
    if T < 1:
        raise ValueError("horizon must be >= 1")
    v = _effective_variation(v_alpha, v_f)
    return FirstOrderParams(eta=(v / T) ** (1.0 / 3.0),
                            delta_T=(T / v) ** (2.0 / 3.0))


def select_params_zeroth_order(T: int, v_alpha: float, v_f: float, a: float,
                               r: Optional[float] = None) -> ZerothOrderParams:
    """Smoothing radius and step size as powers of T and the total variation.

    The exponent switches at a = 4/5, past which extra sampling no longer
    helps. When the inscribed radius ``r`` is supplied, delta is clamped to
    0.9 * r so the shrunken set stays non-empty.
    """
    if T < 1:
        raise ValueError("horizon must be >= 1")
    if a <= 0:
        raise ValueError("budget exponent must be positive")
    v = _effective_variation(v_alpha, v_f)
    if a <= 0.8:
        delta = T ** (-a / 4.0) * v ** 0.2
        eta = T ** (-3.0 * a / 4.0) * v ** 0.6
        delta_T = T ** a * v ** -0.8
    else:
        delta = T ** -0.2 * v ** 0.2
        eta = T ** -0.6 * v ** 0.6
        delta_T = T ** 0.8 * v ** -0.8
    if r is not None:
        delta = min(delta, 0.9 * r)
    return ZerothOrderParams(eta=eta, delta=delta, delta_T=delta_T)
