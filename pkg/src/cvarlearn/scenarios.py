"""Benchmark scenario definitions: parking-lot dynamic pricing.

Occupancy responds linearly to price, r = xi + A * x, with uniform demand
noise xi. The per-step loss penalizes squared deviation from a (possibly
time-varying) target occupancy plus a small price regularizer:

    J_t(x, xi) = (xi + A x - target_t)^2 + (v / 2) x^2

The risk level alpha_t may drift alongside the target. The catalog in
``builtin_scenarios`` covers step and sinusoidal drifts, switching sweeps for
both drift kinds, a sample-size sweep, and the baseline-comparison setting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .learner import FeasibleSet


@dataclass(frozen=True)
class UniformNoise:
    """Uniform demand noise on [lo, hi]; lo == hi is a point mass."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("noise bounds must be finite")
        if self.lo > self.hi:
            raise ValueError("need lo <= hi")

    @property
    def mean(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if self.lo == self.hi:
            return np.full(n, self.lo)
        return rng.uniform(self.lo, self.hi, n)


@dataclass(frozen=True)
class TunedRates:
    """Step sizes found by sweep for the builtin scenarios (see README)."""

    eta_first: Optional[float] = None
    eta_zeroth: Optional[float] = None
    delta_zeroth: Optional[float] = None


@dataclass(frozen=True)
class ParkingScenario:
    name: str
    T: int
    r_sched: Callable[[int], float]       # target occupancy at step t
    alpha_sched: Callable[[int], float]   # risk level at step t
    A: float = -0.15                      # price elasticity
    v: float = 0.005                      # price regularization weight
    noise: UniformNoise = field(default_factory=lambda: UniformNoise(0.9, 1.1))
    feasible: FeasibleSet = field(
        default_factory=lambda: FeasibleSet.box([0.0], [10.0]))
    default_nt: int = 8
    tuned: TunedRates = field(default_factory=TunedRates)

    @property
    def decision_dim(self) -> int:
        return self.feasible.d

    def descriptor(self, t: int) -> tuple:
        """Hashable per-step identity of (cost function, risk level)."""
        return (self.r_sched(t), self.alpha_sched(t))

    def cost_descriptor(self, t: int) -> float:
        """Hashable identity of the step-t cost function alone."""
        return self.r_sched(t)

    def cost(self, t: int, price, xi):
        """J_t for prices and noise draws under NumPy broadcasting."""
        price = np.asarray(price, dtype=np.float64)
        xi = np.asarray(xi, dtype=np.float64)
        dev = xi + self.A * price - self.r_sched(t)
        return dev * dev + 0.5 * self.v * price * price

    def cost_grad(self, t: int, price, xi):
        """dJ_t/dprice for the same broadcasting rules."""
        price = np.asarray(price, dtype=np.float64)
        xi = np.asarray(xi, dtype=np.float64)
        dev = xi + self.A * price - self.r_sched(t)
        return 2.0 * self.A * dev + self.v * price

    def cost_points(self, t: int, points: np.ndarray, xi: np.ndarray):
        """Cost matrix for decision points (m, d) against noise nodes (q,)."""
        points = np.atleast_2d(np.asarray(points, dtype=np.float64))
        if points.shape[1] != 1:
            raise ValueError("parking decisions are one-dimensional")
        return self.cost(t, points[:, 0:1], xi[None, :])

    def occupancy(self, price, xi):
        return np.asarray(xi, dtype=np.float64) + self.A * np.asarray(
            price, dtype=np.float64)

    def alpha_values(self) -> np.ndarray:
        return np.array([self.alpha_sched(t) for t in range(1, self.T + 1)])

    def r_values(self) -> np.ndarray:
        return np.array([self.r_sched(t) for t in range(1, self.T + 1)])


def _step_after(t_switch: int, before: float, after: float) -> Callable[[int], float]:
    return lambda t: before if t <= t_switch else after


def _cosine(base: float, amplitude: float, T: int) -> Callable[[int], float]:
    return lambda t: base + amplitude * math.cos(2.0 * math.pi * t / T)


def _switching(m: int, T: int, even_value: float,
               odd_value: float) -> Callable[[int], float]:
    """even_value while floor(2^m t / T) is even, odd_value otherwise."""
    scale = 2 ** m
    return lambda t: even_value if (scale * t) // T % 2 == 0 else odd_value


def _constant(value: float) -> Callable[[int], float]:
    return lambda t: value


def builtin_scenarios(T: int = 500) -> dict[str, ParkingScenario]:
    """Named scenario catalog for the benchmark harness."""
    catalog: dict[str, ParkingScenario] = {}

    step_r = _step_after(200, 0.65, 0.7)
    step_alpha = _step_after(200, 0.5, 0.8)
    step_tuned = TunedRates(eta_first=3.0, eta_zeroth=0.45, delta_zeroth=0.3)

    catalog["step"] = ParkingScenario(
        name="step", T=T, r_sched=step_r, alpha_sched=step_alpha,
        tuned=step_tuned)
    catalog["sinusoidal"] = ParkingScenario(
        name="sinusoidal", T=T,
        r_sched=_cosine(0.7, 0.05, T), alpha_sched=_cosine(0.5, 0.3, T),
        tuned=TunedRates(eta_first=3.0, eta_zeroth=0.45, delta_zeroth=0.3))
    for m in (1, 2, 3):
        catalog[f"vf_sweep_m{m}"] = ParkingScenario(
            name=f"vf_sweep_m{m}", T=T,
            r_sched=_switching(m, T, 0.65, 0.7), alpha_sched=_constant(0.5),
            tuned=TunedRates(eta_first=0.9))
        catalog[f"valpha_sweep_m{m}"] = ParkingScenario(
            name=f"valpha_sweep_m{m}", T=T,
            r_sched=_constant(0.7), alpha_sched=_switching(m, T, 0.1, 0.8),
            tuned=TunedRates(eta_first=0.9))
    # Sample-size sweep and baseline comparison both run on the step setting.
    catalog["sample_sweep"] = ParkingScenario(
        name="sample_sweep", T=T, r_sched=step_r, alpha_sched=step_alpha,
        tuned=step_tuned)
    catalog["baselines"] = ParkingScenario(
        name="baselines", T=T, r_sched=step_r, alpha_sched=step_alpha,
        tuned=step_tuned)
    catalog["static"] = ParkingScenario(
        name="static", T=T, r_sched=_constant(0.7), alpha_sched=_constant(0.5),
        tuned=TunedRates(eta_first=3.0, eta_zeroth=0.45, delta_zeroth=0.3))
    return catalog
