"""Risk-averse online learning toolkit.

Tracks time-varying CVaR objectives with projected gradient descent under two
feedback models (sampled costs plus gradients, or cost evaluations only),
with exact empirical CVaR machinery, ground-truth oracles, concentration
bound evaluators, and a reproducible parking-price benchmark harness.
"""

from ._core import BACKEND as kernel_backend
from .distributions import build_empirical, cvar, cvar_dual_objective, var_estimate
from .estimators import (
    SampleBatch,
    SmoothingParams,
    first_order_gradient,
    sample_unit_sphere,
    zeroth_order_gradient,
)
from .learner import (
    FeasibleSet,
    LearnerConfig,
    LearnerState,
    SamplingSchedule,
    project,
    select_params_first_order,
    select_params_zeroth_order,
    shrink_set,
    step_first_order,
    step_zeroth_order,
    validate_budget,
)
from .oracle import OracleTable, best_decision, dynamic_regret, true_cvar
from .scenarios import ParkingScenario, UniformNoise, builtin_scenarios
from .variation import function_variation, risk_variation

__version__ = "0.1.0"

__all__ = [
    "kernel_backend", "__version__",
    "build_empirical", "cvar", "cvar_dual_objective", "var_estimate",
    "SampleBatch", "SmoothingParams", "first_order_gradient",
    "sample_unit_sphere", "zeroth_order_gradient",
    "FeasibleSet", "LearnerConfig", "LearnerState", "SamplingSchedule",
    "project", "select_params_first_order", "select_params_zeroth_order",
    "shrink_set", "step_first_order", "step_zeroth_order", "validate_budget",
    "OracleTable", "best_decision", "dynamic_regret", "true_cvar",
    "ParkingScenario", "UniformNoise", "builtin_scenarios",
    "function_variation", "risk_variation",
]
