"""Tests for the ground-truth oracle and the bound evaluators."""

import math

import numpy as np
import pytest

from cvarlearn.learner import FeasibleSet
from cvarlearn.oracle import (
    DEFAULT_QUAD_POINTS,
    OracleTable,
    best_decision,
    dkw_epsilon,
    dynamic_regret,
    gradient_error_bound,
    var_deviation_epsilon,
    risk_level_distance_bound,
    cost_distance_bound,
    quadrature,
    scenario_cost_bound,
    true_cvar,
    weighted_quantile_left,
)
from cvarlearn.scenarios import ParkingScenario, UniformNoise, builtin_scenarios

from oracles import uniform_expectation


def _static(r=0.7, alpha=0.5, **kw):
    return ParkingScenario(name="s", T=10, r_sched=lambda t: r,
                           alpha_sched=lambda t: alpha, **kw)


class TestQuadrature:
    def test_weights_are_probabilities(self):
        nodes, weights = quadrature(UniformNoise(0.9, 1.1), 129)
        assert weights.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(nodes >= 0.9) and np.all(nodes <= 1.1)

    def test_point_mass(self):
        nodes, weights = quadrature(UniformNoise(1.0, 1.0), 129)
        assert nodes.tolist() == [1.0]
        assert weights.tolist() == [1.0]

    def test_unsupported_law(self):
        with pytest.raises(ValueError, match="unsupported noise law"):
            quadrature(object(), 129)


class TestTrueCvar:
    def test_mean_case_analytic(self):
        # At full risk level the CVaR is E[J]: squared mean deviation plus
        # noise variance plus the regularizer.
        sc = _static(alpha=1.0)
        want = (1.0 - 0.15 * 2 - 0.7) ** 2 + 0.04 / 12 + 0.0025 * 4
        assert true_cvar(sc, 1, [2.0]) == pytest.approx(want, abs=1e-12)

    def test_point_mass_is_plain_cost(self):
        sc = _static(noise=UniformNoise(1.0, 1.0))
        for alpha in (0.1, 0.5, 1.0):
            sc_a = _static(alpha=alpha, noise=UniformNoise(1.0, 1.0))
            want = float(sc_a.cost(1, 2.0, 1.0))
            assert true_cvar(sc_a, 1, [2.0]) == pytest.approx(want, abs=1e-12)

    def test_tail_monotonicity(self):
        lo = true_cvar(_static(alpha=0.5), 1, [2.0])
        hi = true_cvar(_static(alpha=1.0), 1, [2.0])
        assert lo >= hi

    def test_quadrature_convergence(self):
        sc = _static(alpha=0.37)
        for x in ([0.0], [2.0], [7.5], [10.0]):
            a = true_cvar(sc, 1, x)  # default resolution
            b = true_cvar(sc, 1, x, quad_points=2 * DEFAULT_QUAD_POINTS)
            assert abs(a - b) < 1e-6


class TestBestDecision:
    def test_deterministic_closed_form(self):
        # With a point mass at 1 and no regularizer the quadratic is
        # minimized exactly at (1 - 0.7) / 0.15 = 2.
        sc = _static(v=0.0, noise=UniformNoise(1.0, 1.0))
        x, value = best_decision(sc, 1, sc.feasible)
        assert x[0] == pytest.approx(2.0, abs=1e-9)
        assert value == pytest.approx(0.0, abs=1e-12)

    def test_heavy_regularizer_pushes_to_zero(self):
        sc = _static(v=1e6)
        x, _ = best_decision(sc, 1, sc.feasible)
        assert x[0] == pytest.approx(0.0, abs=1e-4)

    def test_grid_local_optimality(self):
        sc = _static()
        x, value = best_decision(sc, 1, sc.feasible)
        h = 10.0 / 1000  # coarse stage spacing
        for nb in (x[0] - h, x[0] + h):
            assert value <= true_cvar(sc, 1, [nb]) + 1e-12

    def test_two_stage_resolution(self):
        sc = _static(v=0.0, noise=UniformNoise(1.0, 1.0))
        x, _ = best_decision(sc, 1, sc.feasible, grid_points=101)
        # refined spacing is (2 * coarse cell) / (grid_points - 1)
        assert abs(x[0] - 2.0) <= 2 * (10.0 / 100) / 100 + 1e-12

    def test_dimension_guard(self):
        sc = _static()
        big = FeasibleSet.box([0.0] * 3, [1.0] * 3)
        with pytest.raises(ValueError, match="low dimension"):
            best_decision(sc, 1, big)


class TestDynamicRegret:
    def test_optimal_play_is_flat_zero(self):
        sc = _static()
        table = OracleTable.compute(sc)
        trace = dynamic_regret(table.x_opt, sc, table=table)
        assert np.all(np.abs(trace.gaps) <= 1e-10)
        assert abs(trace.final) <= 1e-8

    def test_gaps_nonnegative_up_to_tolerance(self):
        sc = builtin_scenarios(T=30)["step"]
        rng = np.random.default_rng(9)
        actions = rng.uniform(0, 10, (30, 1))
        trace = dynamic_regret(actions, sc)
        assert np.all(trace.gaps >= -1e-9)
        assert np.all(np.diff(trace.cumulative) >= -1e-9)

    def test_constant_action_flat_increments(self):
        sc = _static()
        sc = ParkingScenario(name="s", T=12, r_sched=lambda t: 0.7,
                             alpha_sched=lambda t: 0.5)
        trace = dynamic_regret(np.full((12, 1), 4.0), sc)
        increments = np.diff(trace.cumulative)
        assert np.all(np.abs(increments - increments[0]) <= 1e-12)


class TestDkwEpsilon:
    def test_reference_value(self):
        assert dkw_epsilon(200, 0.05) == pytest.approx(0.09603, abs=1e-5)

    def test_sqrt_scaling(self):
        assert dkw_epsilon(4 * 50, 0.1) == pytest.approx(dkw_epsilon(50, 0.1) / 2,
                                                         rel=1e-12)

    def test_domain(self):
        with pytest.raises(ValueError):
            dkw_epsilon(10, 2.0)
        with pytest.raises(ValueError):
            dkw_epsilon(0, 0.1)


class TestLemma3:
    def test_inverts_concentration_inequality(self):
        # eps solves 2 exp(-2 n eps^2 p^2) = gamma.
        n, gamma, p = 37, 0.03, 4.2
        eps = var_deviation_epsilon(n, gamma, p)
        assert 2 * math.exp(-2 * n * eps ** 2 * p ** 2) == pytest.approx(
            gamma, rel=1e-12)

    def test_sample_scaling(self):
        assert var_deviation_epsilon(4 * 11, 0.05, 2.0) == pytest.approx(
            var_deviation_epsilon(11, 0.05, 2.0) / 2, rel=1e-12)

    def test_parking_density_bound_is_finite(self):
        # At price 2 the loss is (xi - 1)^2 + 0.01 for xi ~ U[0.9, 1.1]; its
        # density 5 / sqrt(y - 0.01) on (0.01, 0.02] is lowest at the far
        # tail: p_lower = 5 / 0.1 = 50.
        eps = var_deviation_epsilon(8, 0.05, 50.0)
        assert 0.0 < eps < 0.01
        bound = gradient_error_bound(8, 0.05, 500, 0.5, G=0.5, L_g=50.0,
                                  p_lower=50.0)
        assert bound > 0.0


class TestLemma4Bound:
    def test_reference(self):
        assert risk_level_distance_bound(1.0, 0.5, 0.8) == pytest.approx(0.75)

    def test_equal_levels(self):
        assert risk_level_distance_bound(3.0, 0.4, 0.4) == 0.0

    def test_linear_in_u(self):
        assert risk_level_distance_bound(2.0, 0.5, 0.8) == pytest.approx(1.5)


class TestLemma5Bound:
    def test_identical_costs(self):
        sc = _static()
        assert cost_distance_bound(sc, 1, sc, 2, 0.5, [2.0]) == pytest.approx(0.0)

    def test_constant_shift(self):
        # Shifting the loss by c gives bound |c| / alpha while the true CVaR
        # gap is exactly |c|.
        base = _static()
        shifted = ParkingScenario(name="s", T=10, r_sched=lambda t: 0.7,
                                  alpha_sched=lambda t: 0.5, v=0.025)
        # v' = 0.025 adds (0.01) * x^2 ... use x = 1 -> shift c = 0.01
        c = 0.5 * (0.025 - 0.005) * 1.0
        got = cost_distance_bound(base, 1, shifted, 1, 0.5, [1.0])
        assert got == pytest.approx(c / 0.5, rel=1e-12)
        gap = abs(true_cvar(shifted, 1, [1.0]) - true_cvar(base, 1, [1.0]))
        assert gap == pytest.approx(c, rel=1e-9)
        assert gap <= got + 1e-12

    def test_parking_step_pair_matches_independent_quadrature(self):
        sc = builtin_scenarios()["step"]
        got = cost_distance_bound(sc, 200, sc, 201, 0.5, [2.0])
        f = lambda xi: np.abs(sc.cost(201, 2.0, xi) - sc.cost(200, 2.0, xi))
        want = uniform_expectation(f, 0.9, 1.1) / 0.5
        assert got == pytest.approx(want, rel=1e-5)

    def test_noise_mismatch_rejected(self):
        a = _static()
        b = _static(noise=UniformNoise(0.8, 1.2))
        with pytest.raises(ValueError, match="share the noise law"):
            cost_distance_bound(a, 1, b, 1, 0.5, [2.0])


def test_weighted_quantile_left():
    values = np.array([3.0, 1.0, 2.0])
    weights = np.array([0.25, 0.5, 0.25])
    assert weighted_quantile_left(values, weights, 0.5) == 1.0
    assert weighted_quantile_left(values, weights, 0.6) == 2.0
    assert weighted_quantile_left(values, weights, 1.0) == 3.0


def test_scenario_cost_bound_dominates_samples():
    sc = builtin_scenarios(T=50)["step"]
    U = scenario_cost_bound(sc)
    rng = np.random.default_rng(10)
    xs = rng.uniform(0, 10, 200)
    xis = rng.uniform(0.9, 1.1, 200)
    for t in (1, 250):
        assert np.all(np.abs(sc.cost(t, xs, xis)) <= U + 1e-9)
