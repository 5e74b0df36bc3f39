"""Backend equivalence: compiled kernels against the NumPy reference."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cvarlearn import _core
from cvarlearn import _kernels_py as pyk

from oracles import brute_force_weighted_cvar

try:
    from cvarlearn import _kernels as cyk
except ImportError:
    cyk = None

needs_ext = pytest.mark.skipif(cyk is None, reason="compiled kernels unavailable")

batches = st.lists(st.floats(-1e6, 1e6, allow_nan=False, width=64),
                   min_size=1, max_size=80)
alphas = st.floats(min_value=0.01, max_value=1.0)


def _sorted(values):
    return np.ascontiguousarray(np.sort(np.asarray(values, dtype=np.float64)))


def _weighted(draw_values, seed):
    rng = np.random.default_rng(seed)
    costs = np.ascontiguousarray(np.asarray(draw_values, dtype=np.float64))
    w = rng.uniform(0.1, 1.0, costs.size)
    return costs, np.ascontiguousarray(w / w.sum())


def test_active_backend_is_exposed():
    assert _core.BACKEND in ("cython", "python")
    assert pyk.BACKEND == "python"


@needs_ext
@settings(max_examples=200, deadline=None)
@given(batches, alphas)
def test_sorted_kernels_agree(values, alpha):
    arr = _sorted(values)
    scale = max(1.0, float(np.max(np.abs(arr))))
    assert cyk.var_sorted(arr, alpha) == pyk.var_sorted(arr, alpha)
    assert cyk.cvar_sorted(arr, alpha) == pytest.approx(
        pyk.cvar_sorted(arr, alpha), abs=1e-12 * scale)


@needs_ext
@settings(max_examples=200, deadline=None)
@given(batches, alphas, st.integers(0, 2 ** 31))
def test_weighted_kernel_agrees(values, alpha, seed):
    costs, weights = _weighted(values, seed)
    scale = max(1.0, float(np.max(np.abs(costs))))
    assert cyk.cvar_weighted(costs, weights, alpha) == pytest.approx(
        pyk.cvar_weighted(costs, weights, alpha), abs=1e-11 * scale)


@needs_ext
@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12), st.integers(2, 40), alphas, st.integers(0, 2 ** 31))
def test_weighted_rows_agree(rows, cols, alpha, seed):
    rng = np.random.default_rng(seed)
    costs = np.ascontiguousarray(rng.normal(0, 10, (rows, cols)))
    w = rng.uniform(0.1, 1.0, cols)
    weights = np.ascontiguousarray(w / w.sum())
    got_cy = cyk.cvar_weighted_rows(costs, weights, alpha)
    got_py = pyk.cvar_weighted_rows(costs, weights, alpha)
    np.testing.assert_allclose(got_cy, got_py, atol=1e-10, rtol=1e-12)
    # rows output matches the scalar kernel row by row
    for i in range(rows):
        assert got_py[i] == pytest.approx(
            pyk.cvar_weighted(np.ascontiguousarray(costs[i]), weights, alpha),
            abs=1e-10)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-100, 100, allow_nan=False, width=64),
                min_size=2, max_size=40),
       st.floats(min_value=0.05, max_value=1.0),
       st.integers(0, 2 ** 31))
def test_weighted_cvar_matches_grid_minimum(values, alpha, seed):
    costs, weights = _weighted(values, seed)
    got = _core.cvar_weighted(costs, weights, alpha)
    ref, _, spacing = brute_force_weighted_cvar(costs, weights, alpha,
                                                points=20_001)
    assert got <= ref + 1e-9 * max(1.0, abs(ref))
    assert got >= ref - 2 * spacing / alpha - 1e-9 * max(1.0, abs(ref))


def test_weighted_uniform_weights_reduce_to_batch_cvar():
    rng = np.random.default_rng(11)
    values = rng.normal(0, 5, 23)
    weights = np.ascontiguousarray(np.full(23, 1.0 / 23))
    arr = _sorted(values)
    for alpha in (0.05, 0.3, 0.62, 1.0):
        assert _core.cvar_weighted(
            np.ascontiguousarray(values), weights, alpha) == pytest.approx(
                _core.cvar_sorted(arr, alpha), abs=1e-12)
