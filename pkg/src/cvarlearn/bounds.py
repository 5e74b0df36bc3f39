"""Randomized coverage suites for the theoretical error bounds.

Each suite runs many independent trials, measures the quantity a bound should
dominate, and reports the fraction of trials in which it does. The
risk-level, cost-distance and CDF-distance inequalities are deterministic,
so their required coverage is 1.0; the DKW-composed and VaR-deviation bounds
are high-probability statements checked at their stated confidence.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _core
from .distributions import build_empirical, cvar, var_estimate
from .oracle import (
    BoundReport,
    DEFAULT_QUAD_POINTS,
    dkw_epsilon,
    var_deviation_epsilon,
    risk_level_distance_bound,
    quadrature,
    scenario_cost_bound,
    true_cvar,
    weighted_quantile_left,
)
from .scenarios import ParkingScenario


@dataclass(frozen=True)
class SuiteResult:
    name: str
    trials: int
    violations: int
    required_coverage: float
    worst: BoundReport  # the trial with the smallest bound-to-measured slack
    meta: dict = field(default_factory=dict)

    @property
    def coverage(self) -> float:
        return 1.0 - self.violations / self.trials

    @property
    def ok(self) -> bool:
        return self.coverage >= self.required_coverage

    def summary(self) -> str:
        status = "ok" if self.ok else "VIOLATED"
        return (f"{self.name}: coverage {self.coverage:.4f} "
                f"({self.trials - self.violations}/{self.trials}, "
                f"required {self.required_coverage:.4f}) [{status}]")


def _finish(name, reports, required, meta) -> SuiteResult:
    violations = sum(1 for r in reports if not r.ok)
    worst = min(reports, key=lambda r: r.bound - r.measured)
    return SuiteResult(name=name, trials=len(reports), violations=violations,
                       required_coverage=required, worst=worst, meta=meta)


def parking_density_floor(scenario: ParkingScenario, t: int, x: float) -> float:
    """Analytic lower bound on the cost density at a fixed price.

    The loss is (xi - b)^2 + c with xi uniform on [lo, hi]; its density at
    level y is sum_branches 1 / (width * 2 sqrt(y - c)), smallest at the far
    end of the range where sqrt(y - c) equals the longer arm |b - endpoint|.
    """
    noise = scenario.noise
    if noise.lo == noise.hi:
        raise ValueError("density floor needs a non-degenerate noise law")
    b = scenario.r_sched(t) - scenario.A * float(x)
    width = noise.hi - noise.lo
    arm = max(abs(noise.hi - b), abs(noise.lo - b))
    return 1.0 / (2.0 * width * arm)


def dkw_cvar_suite(scenario: ParkingScenario, t: int = 1, x: float = 2.0,
                   n: int = 8, gamma_bar: float = 0.05, trials: int = 1000,
                   seed: int = 0,
                   quad_points: int = DEFAULT_QUAD_POINTS) -> SuiteResult:
    """Empirical-vs-true CVaR gap against (U / alpha) * dkw_epsilon."""
    rng = np.random.default_rng(seed)
    alpha = scenario.alpha_sched(t)
    truth = true_cvar(scenario, t, [x], quad_points)
    U = scenario_cost_bound(scenario)
    bound = (U / alpha) * dkw_epsilon(n, gamma_bar)
    reports = []
    for _ in range(trials):
        xi = scenario.noise.sample(n, rng)
        est = cvar(build_empirical(scenario.cost(t, x, xi)), alpha)
        reports.append(BoundReport(name="dkw", measured=abs(est - truth),
                                   bound=bound,
                                   meta={"gamma_bar": gamma_bar, "n": n}))
    return _finish("dkw", reports, 1.0 - gamma_bar,
                   {"U": U, "alpha": alpha, "x": x, "n": n,
                    "gamma_bar": gamma_bar})


def var_deviation_suite(scenario: ParkingScenario, t: int = 1, x: float = 2.0,
                        n: int = 8, gamma_bar: float = 0.05,
                        trials: int = 1000, seed: int = 0) -> SuiteResult:
    """Batch-VaR deviation against the concentration bound at level gamma_bar."""
    rng = np.random.default_rng(seed)
    alpha = scenario.alpha_sched(t)
    p_lower = parking_density_floor(scenario, t, x)
    # true VaR from a dense midpoint discretization of the noise law
    q = 1 << 14
    h = (scenario.noise.hi - scenario.noise.lo) / q
    nodes = scenario.noise.lo + (np.arange(q) + 0.5) * h
    costs = scenario.cost(t, x, nodes)
    nu_star = weighted_quantile_left(costs, np.full(q, 1.0 / q), 1.0 - alpha)
    bound = var_deviation_epsilon(n, gamma_bar, p_lower)
    reports = []
    for _ in range(trials):
        xi = scenario.noise.sample(n, rng)
        nu_hat = var_estimate(build_empirical(scenario.cost(t, x, xi)), alpha)
        reports.append(BoundReport(name="var_bound",
                                   measured=abs(nu_hat - nu_star), bound=bound,
                                   meta={"gamma_bar": gamma_bar, "n": n}))
    return _finish("var_bound", reports, 1.0 - gamma_bar,
                   {"p_lower": p_lower, "nu_star": nu_star, "x": x, "n": n,
                    "gamma_bar": gamma_bar})


def risk_level_suite(trials: int = 1000, seed: int = 0,
                     max_batch: int = 50) -> SuiteResult:
    """CVaR gap across risk levels against |1/a1 - 1/a2| U (deterministic)."""
    rng = np.random.default_rng(seed)
    reports = []
    for _ in range(trials):
        n = int(rng.integers(1, max_batch + 1))
        U = float(rng.uniform(0.5, 10.0))
        dist = build_empirical(rng.uniform(0.0, U, n))
        a1, a2 = rng.uniform(0.05, 1.0, 2)
        gap = abs(cvar(dist, a1) - cvar(dist, a2))
        reports.append(BoundReport(name="risk_variation_bound", measured=gap,
                                   bound=risk_level_distance_bound(U, a1, a2) + 1e-12))
    return _finish("risk_variation_bound", reports, 1.0, {})


def cost_distance_suite(trials: int = 1000, seed: int = 0) -> SuiteResult:
    """CVaR gap across cost functions against (1/alpha) E|J1 - J2|.

    Random quadratic pairs are evaluated on a shared random discrete law;
    the inequality is deterministic and needs no convexity or sign condition.
    """
    rng = np.random.default_rng(seed)
    reports = []
    for _ in range(trials):
        k = int(rng.integers(2, 41))
        atoms = rng.uniform(0.8, 1.2, k)
        weights = rng.uniform(0.1, 1.0, k)
        weights = np.ascontiguousarray(weights / weights.sum())
        a1, b1, c1 = rng.uniform(0.1, 2.0), rng.uniform(0.5, 1.5), rng.uniform(-1, 1)
        a2, b2, c2 = rng.uniform(0.1, 2.0), rng.uniform(0.5, 1.5), rng.uniform(-1, 1)
        j1 = a1 * (atoms - b1) ** 2 + c1
        j2 = a2 * (atoms - b2) ** 2 + c2
        alpha = float(rng.uniform(0.05, 1.0))
        gap = abs(_core.cvar_weighted(np.ascontiguousarray(j1), weights, alpha)
                  - _core.cvar_weighted(np.ascontiguousarray(j2), weights, alpha))
        bound = float(np.abs(j1 - j2) @ weights) / alpha
        reports.append(BoundReport(name="function_variation_bound",
                                   measured=gap, bound=bound + 1e-12))
    return _finish("function_variation_bound", reports, 1.0, {})


def cdf_distance_suite(trials: int = 1000, seed: int = 0,
                       max_batch: int = 50) -> SuiteResult:
    """CVaR gap of equal-size loss batches against (U/alpha) sup|F - G|."""
    rng = np.random.default_rng(seed)
    reports = []
    for _ in range(trials):
        n = int(rng.integers(1, max_batch + 1))
        U = float(rng.uniform(0.5, 10.0))
        a = rng.uniform(0.0, U, n)
        b = rng.uniform(0.0, U, n)
        alpha = float(rng.uniform(0.05, 1.0))
        gap = abs(cvar(build_empirical(a), alpha) - cvar(build_empirical(b), alpha))
        support = np.union1d(a, b)
        fa = np.searchsorted(np.sort(a), support, side="right") / n
        fb = np.searchsorted(np.sort(b), support, side="right") / n
        sup = float(np.max(np.abs(fa - fb)))
        reports.append(BoundReport(name="cvar_distance_bound", measured=gap,
                                   bound=(U / alpha) * sup + 1e-12))
    return _finish("cvar_distance_bound", reports, 1.0, {})


SUITES = {
    "dkw": lambda scenario, **kw: dkw_cvar_suite(scenario, **kw),
    "3": lambda scenario, **kw: var_deviation_suite(scenario, **kw),
    "4": lambda scenario, **kw: risk_level_suite(
        **{k: v for k, v in kw.items() if k in ("trials", "seed")}),
    "5": lambda scenario, **kw: cost_distance_suite(
        **{k: v for k, v in kw.items() if k in ("trials", "seed")}),
    "7": lambda scenario, **kw: cdf_distance_suite(
        **{k: v for k, v in kw.items() if k in ("trials", "seed")}),
}
