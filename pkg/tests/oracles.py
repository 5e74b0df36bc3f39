"""Independent reference oracles for the test suite.

Everything here recomputes quantities from first principles (grid
minimization, direct summation, plain quadrature) and deliberately avoids the
package's closed-form code paths, so tests compare two genuinely different
routes to the same number.
"""

import numpy as np


def dual_objective(values, alpha, nu):
    """nu + (1/(alpha n)) sum_i (J_i - nu)+ by direct summation."""
    values = np.asarray(values, dtype=float)
    return float(nu + np.sum(np.maximum(values - nu, 0.0)) / (alpha * values.size))


def nu_grid(values, points):
    values = np.asarray(values, dtype=float)
    lo, hi = float(values.min()), float(values.max())
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    return np.linspace(lo, hi, points)


def brute_force_cvar(values, alpha, points=100_000):
    """Minimize the dual objective over a nu-grid.

    Returns (grid minimum, argmin nu, grid spacing).
    """
    values = np.asarray(values, dtype=float)
    grid = nu_grid(values, points)
    hinge = np.maximum(values[None, :] - grid[:, None], 0.0)
    obj = grid + hinge.sum(axis=1) / (alpha * values.size)
    i = int(np.argmin(obj))
    return float(obj[i]), float(grid[i]), float(grid[1] - grid[0])


def brute_force_weighted_cvar(values, weights, alpha, points=100_000):
    """Same as brute_force_cvar but for a finite weighted law."""
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=float)
    grid = nu_grid(values, points)
    hinge = np.maximum(values[None, :] - grid[:, None], 0.0)
    obj = grid + hinge @ weights / alpha
    i = int(np.argmin(obj))
    return float(obj[i]), float(grid[i]), float(grid[1] - grid[0])


def ecdf_sup_distance(a, b):
    """sup_y |F_a(y) - F_b(y)| for two sample batches, taken over the merged support."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    support = np.union1d(a, b)
    fa = np.searchsorted(a, support, side="right") / a.size
    fb = np.searchsorted(b, support, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def central_difference(f, x, h=1e-3):
    """Central finite-difference derivative of a scalar function."""
    return (f(x + h) - f(x - h)) / (2.0 * h)


def analytic_parking_cvar(price, target, alpha, A=-0.15, v=0.005,
                          lo=0.9, hi=1.1):
    """Closed-form CVaR of (xi + A x - target)^2 + (v/2) x^2, xi ~ U[lo, hi].

    The loss is a parabola in xi with vertex at b = target - A x, so the
    worst alpha-fraction is {|xi - b| >= s} for the s that gives the tail
    probability alpha; the tail integral of a quadratic is elementary.
    """
    if lo == hi:
        dev = lo + A * price - target
        return dev * dev + 0.5 * v * price * price
    b = target - A * price
    c = 0.5 * v * price * price
    width = hi - lo

    def tail_length(s):
        left = max(0.0, min(b - s, hi) - lo)
        right = max(0.0, hi - max(b + s, lo))
        return left + right

    target_len = alpha * width
    s_lo, s_hi = 0.0, max(abs(hi - b), abs(lo - b))
    if tail_length(s_lo) <= target_len:
        s_star = 0.0
    else:
        for _ in range(300):  # bisection to full float precision
            mid = 0.5 * (s_lo + s_hi)
            if tail_length(mid) > target_len:
                s_lo = mid
            else:
                s_hi = mid
        s_star = 0.5 * (s_lo + s_hi)

    def quad_integral(p, q):
        # integral of (xi - b)^2 over [p, q], empty if p >= q
        if p >= q:
            return 0.0
        return ((q - b) ** 3 - (p - b) ** 3) / 3.0

    left_hi = min(b - s_star, hi)
    right_lo = max(b + s_star, lo)
    total = quad_integral(lo, left_hi) + quad_integral(right_lo, hi)
    mass = tail_length(s_star)
    return total / (alpha * width) + c * (mass / (alpha * width))


def uniform_expectation(f, lo, hi, points=20_001):
    """E[f(xi)] for xi ~ U[lo, hi] by composite trapezoid on a dense grid."""
    xs = np.linspace(lo, hi, points)
    return float(np.trapezoid(f(xs), xs) / (hi - lo))
