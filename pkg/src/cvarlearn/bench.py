"""Multi-run experiment harness with CSV trace output.

Runs seeded independent repetitions of the selected learner(s) on a named
scenario, scores every step against the ground-truth oracle, and writes one
trace CSV per run, one aggregate summary per scenario, and one oracle trace
per scenario. Repeated invocation with the same configuration is
byte-identical.

Baselines: ``ignore_vf`` and ``ignore_valpha`` run the first-order learner
with the step size recomputed as if the corresponding variation were zero
(scaled by the same tuning multiplier as the main learner); ``static`` plays
the single price minimizing the time-averaged true CVaR.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .estimators import SampleBatch
from .learner import (
    FIRST_ORDER,
    ZEROTH_ORDER,
    LearnerConfig,
    LearnerState,
    SamplingSchedule,
    constant_schedule_for_budget,
    select_params_first_order,
    select_params_zeroth_order,
    step_first_order,
    step_zeroth_order,
    validate_budget,
)
from .oracle import (
    DEFAULT_GRID_POINTS,
    DEFAULT_QUAD_POINTS,
    OracleTable,
    best_static_decision,
    true_cvar,
)
from .scenarios import ParkingScenario, builtin_scenarios
from .variation import function_variation, risk_variation

LEARNER_MODES = ("first", "zeroth")
BASELINE_MODES = ("ignore_vf", "ignore_valpha", "static")
ALL_MODES = LEARNER_MODES + BASELINE_MODES

TRACE_COLUMNS = ["t", "x", "x_hat", "occupancy_mean", "cvar_action",
                 "cvar_opt", "x_opt", "regret_cum", "alpha", "n_t", "eta",
                 "delta"]
SUMMARY_METRICS = ("price", "occupancy", "cvar", "regret")


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    mode: str = "both"            # first|zeroth|both|ignore_vf|ignore_valpha|static
    runs: int = 20
    seed_base: int = 1000
    nt: int | str = "scenario"    # int, "t", "auto", or scenario default
    a: Optional[float] = None     # budget exponent; None derives it from n_t
    c: float = 1.0
    out: Optional[Path] = None
    eta: Optional[float] = None
    delta: Optional[float] = None
    params: str = "tuned"         # "tuned" (catalog rates) or "formula"
    x1: float = 0.0
    T: Optional[int] = None
    grid_points: int = DEFAULT_GRID_POINTS
    quad_points: int = DEFAULT_QUAD_POINTS

    @property
    def seeds(self) -> list[int]:
        return [self.seed_base + i for i in range(self.runs)]

    @property
    def modes(self) -> list[str]:
        if self.mode == "both":
            return ["first", "zeroth"]
        if self.mode in ALL_MODES:
            return [self.mode]
        raise ValueError(f"unknown mode {self.mode!r}")


@dataclass
class RunTrace:
    """Per-step arrays for one seeded run (plus the noise means for checks)."""

    seed: int
    mode: str
    eta: Optional[float]
    delta: Optional[float]
    x: np.ndarray
    x_hat: Optional[np.ndarray]
    xi_mean: np.ndarray
    occupancy_mean: np.ndarray
    alpha: np.ndarray
    n_t: np.ndarray
    cvar_action: np.ndarray
    regret_cum: np.ndarray

    @property
    def played(self) -> np.ndarray:
        return self.x_hat if self.x_hat is not None else self.x


@dataclass
class RunSummary:
    """Per-step mean and population std across runs, per mode and metric."""

    scenario: str
    T: int
    tables: dict  # mode -> metric -> (mean array, std array)
    final_regret_mean: dict  # mode -> float


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    scenario: ParkingScenario
    oracle: OracleTable
    traces: dict  # mode -> list[RunTrace]
    summary: RunSummary
    rates: dict   # mode -> (eta, delta or None)
    files: list[Path] = field(default_factory=list)


def implied_budget_exponent(n_of_t, T: int, c: float) -> float:
    """Largest exponent a for which the budget holds with this sampling plan.

    A hair of slack keeps the round-tripped right-hand side from dipping
    below the sum by float rounding.
    """
    lhs = sum(1.0 / math.sqrt(n_of_t(t)) for t in range(1, T + 1))
    if T <= 1:
        return 1.0
    return max(2.0 * (1.0 - math.log(lhs * (1 + 1e-9) / c) / math.log(T)), 1e-6)


def resolve_schedule(nt, T: int, a: Optional[float], c: float,
                     scenario_default: int) -> SamplingSchedule:
    """Build the sampling plan; a=None derives the tight budget exponent."""
    if nt == "auto":
        # n is derived from (a, c), so the exponent must be explicit.
        a = 1.0 if a is None else a
        n = constant_schedule_for_budget(T, a, c)
        return SamplingSchedule.constant(n, a=a, c=c)
    if nt == "scenario":
        n_of_t = lambda t, _n=scenario_default: _n
    elif nt == "t":
        n_of_t = lambda t: t
    else:
        n_of_t = lambda t, _n=int(nt): _n
    if a is None:
        a = implied_budget_exponent(n_of_t, T, c)
    if nt == "t":
        return SamplingSchedule.growing(a=a, c=c)
    return SamplingSchedule.constant(n_of_t(1), a=a, c=c)


def scenario_variations(scenario: ParkingScenario) -> tuple[float, float]:
    """(V_alpha, V_f) of the schedules at the default drift-metric resolutions."""
    v_alpha = risk_variation(scenario.alpha_values())
    v_f = function_variation(scenario, quad_points=129, grid_points=1001).value
    return v_alpha, v_f


def resolve_rates(config: ExperimentConfig, scenario: ParkingScenario,
                  v_alpha: float, v_f: float, a: float) -> dict:
    """Step sizes per mode: explicit override > catalog tuned > selection formula."""
    T = scenario.T
    formula_first = select_params_first_order(T, v_alpha, v_f).eta
    zo = select_params_zeroth_order(T, v_alpha, v_f,
                                    a=a, r=scenario.feasible.r)
    rates: dict = {}
    eta_first = config.eta
    if eta_first is None and config.params == "tuned":
        eta_first = scenario.tuned.eta_first
    if eta_first is None:
        eta_first = formula_first
    rates["first"] = (eta_first, None)

    eta_zeroth = config.eta
    delta = config.delta
    if config.params == "tuned":
        if eta_zeroth is None:
            eta_zeroth = scenario.tuned.eta_zeroth
        if delta is None:
            delta = scenario.tuned.delta_zeroth
    if eta_zeroth is None:
        eta_zeroth = zo.eta
    if delta is None:
        delta = zo.delta
    rates["zeroth"] = (eta_zeroth, delta)

    # Baselines recompute the formula step size with one variation zeroed,
    # keeping the main learner's tuning multiplier.
    kappa = eta_first / formula_first
    rates["ignore_vf"] = (
        kappa * select_params_first_order(T, v_alpha, 0.0).eta, None)
    rates["ignore_valpha"] = (
        kappa * select_params_first_order(T, 0.0, v_f).eta, None)
    rates["static"] = (None, None)
    return rates


def _run_first_order(scenario, schedule, eta, alpha_sched, x1, seed,
                     mode_label) -> RunTrace:
    T = scenario.T
    config = LearnerConfig(mode=FIRST_ORDER, eta=eta,
                           feasible=scenario.feasible, schedule=schedule,
                           risk_schedule=alpha_sched)
    state = LearnerState.initial(config, [x1])
    rng = np.random.default_rng(seed)
    x = np.empty(T)
    xi_mean = np.empty(T)
    alpha = np.empty(T)
    n_t = np.empty(T, dtype=int)
    for t in range(1, T + 1):
        n = schedule.n_of_t(t)
        price = float(state.x[0])
        xi = scenario.noise.sample(n, rng)
        batch = SampleBatch(costs=scenario.cost(t, price, xi),
                            grads=scenario.cost_grad(t, price, xi)[:, None])
        state, rec = step_first_order(state, config, batch)
        x[t - 1] = price
        xi_mean[t - 1] = xi.mean()
        alpha[t - 1] = rec.alpha
        n_t[t - 1] = n
    occupancy = xi_mean + scenario.A * x
    return RunTrace(seed=seed, mode=mode_label, eta=eta, delta=None, x=x,
                    x_hat=None, xi_mean=xi_mean, occupancy_mean=occupancy,
                    alpha=alpha, n_t=n_t, cvar_action=np.empty(0),
                    regret_cum=np.empty(0))


def _run_zeroth_order(scenario, schedule, eta, delta, alpha_sched, x1,
                      seed) -> RunTrace:
    T = scenario.T
    config = LearnerConfig(mode=ZEROTH_ORDER, eta=eta, delta=delta,
                           feasible=scenario.feasible, schedule=schedule,
                           risk_schedule=alpha_sched)
    state = LearnerState.initial(config, [x1])
    rng = np.random.default_rng(seed)
    x = np.empty(T)
    x_hat = np.empty(T)
    xi_mean = np.empty(T)
    alpha = np.empty(T)
    n_t = np.empty(T, dtype=int)
    for t in range(1, T + 1):
        n = schedule.n_of_t(t)
        drawn = {}

        def sample_costs(xh, _t=t, _n=n, _drawn=drawn):
            xi = scenario.noise.sample(_n, rng)
            _drawn["xi"] = xi
            return scenario.cost(_t, float(xh[0]), xi)

        price = float(state.x[0])
        state, rec = step_zeroth_order(state, config, sample_costs, rng)
        x[t - 1] = price
        x_hat[t - 1] = float(rec.x_hat[0])
        xi_mean[t - 1] = drawn["xi"].mean()
        alpha[t - 1] = rec.alpha
        n_t[t - 1] = n
    occupancy = xi_mean + scenario.A * x_hat
    return RunTrace(seed=seed, mode="zeroth", eta=eta, delta=delta, x=x,
                    x_hat=x_hat, xi_mean=xi_mean, occupancy_mean=occupancy,
                    alpha=alpha, n_t=n_t, cvar_action=np.empty(0),
                    regret_cum=np.empty(0))


def _run_static(scenario, schedule, price, seed) -> RunTrace:
    T = scenario.T
    rng = np.random.default_rng(seed)
    x = np.full(T, price)
    xi_mean = np.empty(T)
    alpha = np.empty(T)
    n_t = np.empty(T, dtype=int)
    for t in range(1, T + 1):
        n = schedule.n_of_t(t)
        xi = scenario.noise.sample(n, rng)
        xi_mean[t - 1] = xi.mean()
        alpha[t - 1] = scenario.alpha_sched(t)
        n_t[t - 1] = n
    occupancy = xi_mean + scenario.A * x
    return RunTrace(seed=seed, mode="static", eta=None, delta=None, x=x,
                    x_hat=None, xi_mean=xi_mean, occupancy_mean=occupancy,
                    alpha=alpha, n_t=n_t, cvar_action=np.empty(0),
                    regret_cum=np.empty(0))


def _score(trace: RunTrace, scenario, table: OracleTable,
           quad_points: int) -> None:
    T = trace.x.shape[0]
    played = trace.played
    cvar_action = np.array([
        true_cvar(scenario, t, [played[t - 1]], quad_points)
        for t in range(1, T + 1)
    ])
    trace.cvar_action = cvar_action
    trace.regret_cum = np.cumsum(cvar_action - table.cvar_opt[:T])


def summarize(traces_by_mode: dict, scenario_name: str) -> RunSummary:
    """Per-step mean/std across runs (population convention, divide by runs)."""
    tables: dict = {}
    finals: dict = {}
    T = None
    for mode, traces in traces_by_mode.items():
        lengths = {tr.x.shape[0] for tr in traces}
        if len(lengths) != 1:
            raise ValueError("length mismatch across runs")
        n = lengths.pop()
        if T is None:
            T = n
        elif n != T:
            raise ValueError("length mismatch across modes")
        stacked = {
            "price": np.stack([tr.played for tr in traces]),
            "occupancy": np.stack([tr.occupancy_mean for tr in traces]),
            "cvar": np.stack([tr.cvar_action for tr in traces]),
            "regret": np.stack([tr.regret_cum for tr in traces]),
        }
        tables[mode] = {
            key: (arr.mean(axis=0), arr.std(axis=0)) for key, arr in stacked.items()
        }
        finals[mode] = float(tables[mode]["regret"][0][-1])
    return RunSummary(scenario=scenario_name, T=T, tables=tables,
                      final_regret_mean=finals)


def run_experiment(config: ExperimentConfig,
                   scenario: Optional[ParkingScenario] = None) -> ExperimentResult:
    catalog = builtin_scenarios()
    if scenario is None:
        if config.scenario not in catalog:
            raise ValueError(f"unknown scenario {config.scenario!r}")
        scenario = catalog[config.scenario]
    if config.T is not None:
        scenario = replace(scenario, T=config.T)

    schedule = resolve_schedule(config.nt, scenario.T, config.a, config.c,
                                scenario.default_nt)
    budget = validate_budget(schedule, scenario.T)
    if not budget.ok:
        warnings.warn(
            f"sampling budget violated: sum 1/sqrt(n_t) = {budget.lhs:.8g} "
            f"> c T^(1-a/2) = {budget.rhs:.8g}", stacklevel=2)

    v_alpha, v_f = scenario_variations(scenario)
    rates = resolve_rates(config, scenario, v_alpha, v_f, schedule.a)
    table = OracleTable.compute(scenario, grid_points=config.grid_points,
                                quad_points=config.quad_points)

    traces: dict = {}
    for mode in config.modes:
        eta, delta = rates[mode]
        runs = []
        if mode == "static":
            x_static, _ = best_static_decision(
                scenario, grid_points=config.grid_points,
                quad_points=config.quad_points)
            price = float(x_static[0])
        for seed in config.seeds:
            if mode == "first":
                tr = _run_first_order(scenario, schedule, eta,
                                      scenario.alpha_sched, config.x1, seed,
                                      mode)
            elif mode == "zeroth":
                tr = _run_zeroth_order(scenario, schedule, eta, delta,
                                       scenario.alpha_sched, config.x1, seed)
            elif mode in ("ignore_vf", "ignore_valpha"):
                tr = _run_first_order(scenario, schedule, eta,
                                      scenario.alpha_sched, config.x1, seed,
                                      mode)
            elif mode == "static":
                tr = _run_static(scenario, schedule, price, seed)
            else:
                raise ValueError(f"unknown mode {mode!r}")
            _score(tr, scenario, table, config.quad_points)
            runs.append(tr)
        traces[mode] = runs

    summary = summarize(traces, scenario.name)
    result = ExperimentResult(config=config, scenario=scenario, oracle=table,
                              traces=traces, summary=summary, rates=rates)
    if config.out is not None:
        result.files = write_outputs(result, Path(config.out))
    return result


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def write_outputs(result: ExperimentResult, out_dir: Path) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    scenario = result.scenario
    table = result.oracle
    files = []

    for mode, runs in result.traces.items():
        for tr in runs:
            path = out_dir / f"{scenario.name}__{mode}__seed{tr.seed}.csv"
            with path.open("w", newline="\n") as fh:
                writer = csv.writer(fh)
                writer.writerow(TRACE_COLUMNS)
                for i in range(result.summary.T):
                    writer.writerow([
                        i + 1,
                        _fmt(tr.x[i]),
                        _fmt(tr.x_hat[i]) if tr.x_hat is not None else "",
                        _fmt(tr.occupancy_mean[i]),
                        _fmt(tr.cvar_action[i]),
                        _fmt(table.cvar_opt[i]),
                        _fmt(table.x_opt[i, 0]),
                        _fmt(tr.regret_cum[i]),
                        _fmt(tr.alpha[i]),
                        _fmt(tr.n_t[i]),
                        _fmt(tr.eta),
                        _fmt(tr.delta),
                    ])
            files.append(path)

    summary_path = out_dir / f"{scenario.name}__summary.csv"
    modes = list(result.traces)
    with summary_path.open("w", newline="\n") as fh:
        fh.write("# std convention: population (divide by number of runs)\n")
        writer = csv.writer(fh)
        header = ["t"]
        for mode in modes:
            for metric in SUMMARY_METRICS:
                header += [f"{mode}_{metric}_mean", f"{mode}_{metric}_std"]
        writer.writerow(header)
        for i in range(result.summary.T):
            row = [i + 1]
            for mode in modes:
                for metric in SUMMARY_METRICS:
                    mean, std = result.summary.tables[mode][metric]
                    row += [_fmt(mean[i]), _fmt(std[i])]
            writer.writerow(row)
    files.append(summary_path)

    oracle_path = out_dir / f"{scenario.name}__oracle.csv"
    with oracle_path.open("w", newline="\n") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "x_opt", "cvar_opt"])
        for i in range(result.summary.T):
            writer.writerow([i + 1, _fmt(table.x_opt[i, 0]),
                             _fmt(table.cvar_opt[i])])
    files.append(oracle_path)
    return files
