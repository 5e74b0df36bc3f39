"""Pure-NumPy CVaR kernels, API-identical to the compiled extension.

The active backend is selected in ``cvarlearn._core``. Inputs are assumed
pre-validated: finite values, alpha in (0, 1], weights positive and summing
to ~1. Sample arrays must be sorted ascending where the name says so.
"""

import math

import numpy as np

BACKEND = "python"

# Guard against float round-off when the cumulative tail weight sits exactly
# on alpha (e.g. alpha * n an integer); keeps both backends on the same branch.
_REL_EPS = 1e-12


def var_sorted(values, alpha):
    """m-th smallest sample with m = ceil((1 - alpha) * n), clipped to [1, n]."""
    n = values.shape[0]
    m = n - math.floor(alpha * n)
    if m < 1:
        m = 1
    return float(values[m - 1])


def cvar_sorted(values, alpha):
    """Exact dual minimum on a sorted batch: average of the alpha-tail.

    With descending order statistics v(1) >= ... >= v(n) and k = ceil(alpha*n),
    returns (sum of the k-1 largest + (alpha*n - (k-1)) * v(k)) / (alpha*n).
    """
    n = values.shape[0]
    an = alpha * n
    f = math.floor(an)
    k = int(f) if an == f else int(f) + 1
    s = float(np.sum(values[n - k + 1:])) if k > 1 else 0.0
    s += (an - (k - 1)) * float(values[n - k])
    return s / an


def cvar_weighted(costs, weights, alpha):
    """CVaR of a finite weighted law (weights > 0, sum ~ 1)."""
    order = np.argsort(-costs, kind="stable")
    c = costs[order]
    w = weights[order]
    cumw = np.cumsum(w)
    thresh = alpha * (1.0 - _REL_EPS)
    k = int(np.searchsorted(cumw, thresh, side="left"))
    if k >= c.shape[0]:
        k = c.shape[0] - 1
    prev = float(cumw[k - 1]) if k > 0 else 0.0
    acc = float(np.sum(w[:k] * c[:k]))
    acc += (alpha - prev) * float(c[k])
    return acc / alpha


def cvar_weighted_rows(costs, weights, alpha):
    """Row-wise ``cvar_weighted`` for a (rows, nodes) cost matrix."""
    m, q = costs.shape
    order = np.argsort(-costs, axis=1, kind="stable")
    c = np.take_along_axis(costs, order, axis=1)
    w = np.take_along_axis(np.broadcast_to(weights, (m, q)), order, axis=1)
    cumw = np.cumsum(w, axis=1)
    cumwc = np.cumsum(w * c, axis=1)
    thresh = alpha * (1.0 - _REL_EPS)
    k = np.argmax(cumw >= thresh, axis=1)
    k[cumw[:, -1] < thresh] = q - 1
    rows = np.arange(m)
    prev = np.where(k > 0, cumw[rows, np.maximum(k - 1, 0)], 0.0)
    acc = np.where(k > 0, cumwc[rows, np.maximum(k - 1, 0)], 0.0)
    acc = acc + (alpha - prev) * c[rows, k]
    return acc / alpha
