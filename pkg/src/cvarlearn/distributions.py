"""Empirical cost distributions and exact CVaR/VaR on finite batches.

Conventions: costs are losses (larger is worse). The risk level ``alpha`` in
(0, 1] is the tail fraction: CVaR at level alpha averages the worst
alpha-fraction of outcomes, so CVaR at alpha = 1 is the plain mean. VaR is
the (1 - alpha)-quantile, taken as the left endpoint of the minimizer set of
the dual objective ``nu + (1/alpha) * E[(J - nu)+]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _core

# Risk levels and uniform cost bounds travel as plain floats; the operations
# validate their invariants (alpha in (0, 1], U > 0) at the call boundary.
RiskLevel = float
CostBound = float


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"risk level must be in (0, 1], got {alpha}")
    return alpha


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Sorted batch of scalar costs acting as an empirical CDF.

    ``samples`` is ascending; duplicates are kept (multiset semantics). The
    CDF at y is (#samples <= y) / n, a right-continuous step function.
    """

    samples: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return int(self.samples.shape[0])

    def cdf(self, y):
        """Empirical CDF evaluated at y (scalar or array)."""
        return np.searchsorted(self.samples, y, side="right") / self.n


def build_empirical(samples) -> EmpiricalDistribution:
    """Sort a batch of cost values into an empirical distribution.

    Raises ValueError on an empty batch or non-finite values.
    """
    arr = np.asarray(samples, dtype=np.float64).ravel()
    if arr.size == 0:
        raise ValueError("empty sample batch")
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite sample")
    out = np.sort(arr)
    out.flags.writeable = False
    return EmpiricalDistribution(samples=out)


def var_estimate(dist: EmpiricalDistribution, alpha: RiskLevel) -> float:
    """VaR of the batch: the m-th smallest sample, m = ceil((1-alpha) n).

    This is the left endpoint of the argmin of the dual objective (clipped to
    the smallest sample when alpha = 1).
    """
    alpha = _check_alpha(alpha)
    return _core.var_sorted(dist.samples, alpha)


def cvar(dist: EmpiricalDistribution, alpha: RiskLevel) -> float:
    """Exact minimum of the dual objective over nu, in closed form."""
    alpha = _check_alpha(alpha)
    return _core.cvar_sorted(dist.samples, alpha)


def cvar_dual_objective(dist: EmpiricalDistribution, alpha: RiskLevel,
                        nu: float) -> float:
    """nu + (1/(alpha n)) * sum_i max(J_i - nu, 0); exposed for cross-checks."""
    alpha = _check_alpha(alpha)
    hinge = np.maximum(dist.samples - nu, 0.0)
    return float(nu + float(np.sum(hinge)) / (alpha * dist.n))
