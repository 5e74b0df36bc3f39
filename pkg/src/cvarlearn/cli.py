"""Command-line interface for the benchmark harness.

Subcommands: ``run`` (seeded multi-run experiments with CSV traces),
``list-scenarios``, ``validate-budget``, and ``bounds`` (the concentration
bound coverage suites). Flags can be preloaded from a flat ``key = value``
config file; command-line values win. The default output directory can be
set with the CVARLEARN_OUT environment variable.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .bench import ALL_MODES, ExperimentConfig, resolve_schedule, run_experiment
from .bounds import SUITES
from .learner import validate_budget
from .scenarios import builtin_scenarios


def parse_config_file(path: Path) -> dict[str, str]:
    """Flat key = value pairs; '#' starts a comment; keys match CLI flags."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, value = line.split("=", 1)
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _default_out() -> str | None:
    return os.environ.get("CVARLEARN_OUT")


def _add_run_parser(sub):
    p = sub.add_parser("run", help="run a seeded multi-run experiment")
    p.add_argument("--config", type=Path, help="flat key=value config file")
    p.add_argument("--scenario", default="step")
    p.add_argument("--mode", default="both",
                   choices=("first", "zeroth", "both") + ALL_MODES[2:])
    p.add_argument("--runs", type=int, default=20)
    p.add_argument("--seed-base", type=int, default=1000)
    p.add_argument("--nt", default="scenario",
                   help='per-step samples: an integer, "t", or "auto"')
    p.add_argument("--a", type=float, default=None,
                   help="budget exponent (default: derived from the plan)")
    p.add_argument("--c", type=float, default=1.0, help="budget constant")
    p.add_argument("--out", default=_default_out(),
                   help="output directory (default $CVARLEARN_OUT)")
    p.add_argument("--eta", type=float, default=None, help="step size override")
    p.add_argument("--delta", type=float, default=None,
                   help="smoothing radius override")
    p.add_argument("--params", default="tuned", choices=("tuned", "formula"))
    p.add_argument("--x1", type=float, default=0.0, help="initial price")
    p.add_argument("--T", type=int, default=None, help="horizon override")
    p.add_argument("--grid-points", type=int, default=None,
                   help="oracle price-grid resolution")
    p.add_argument("--quad-points", type=int, default=None,
                   help="oracle quadrature nodes")
    return p


def _apply_config_file(args: argparse.Namespace, parser: argparse.ArgumentParser,
                       run_parser: argparse.ArgumentParser,
                       argv: list[str]) -> argparse.Namespace:
    if getattr(args, "config", None) is None:
        return args
    file_values = parse_config_file(args.config)
    unknown = set(file_values) - set(vars(args))
    if unknown:
        raise SystemExit(f"unknown config keys: {sorted(unknown)}")
    # Defaults go on the subparser so explicit command-line flags still win.
    run_parser.set_defaults(**file_values)
    args = parser.parse_args(argv)
    # re-coerce values that came from the file as strings
    for key, cast in (("runs", int), ("seed_base", int), ("a", float),
                      ("c", float), ("eta", float), ("delta", float),
                      ("x1", float), ("T", int), ("grid_points", int),
                      ("quad_points", int)):
        val = getattr(args, key)
        if isinstance(val, str):
            setattr(args, key, cast(val))
    return args


def cmd_run(args, parser, run_parser, argv) -> int:
    args = _apply_config_file(args, parser, run_parser, argv)
    nt = args.nt if args.nt in ("t", "auto", "scenario") else int(args.nt)
    overrides = {}
    if args.grid_points is not None:
        overrides["grid_points"] = args.grid_points
    if args.quad_points is not None:
        overrides["quad_points"] = args.quad_points
    config = ExperimentConfig(
        scenario=args.scenario, mode=args.mode, runs=args.runs,
        seed_base=args.seed_base, nt=nt, a=args.a, c=args.c,
        out=Path(args.out) if args.out else None, eta=args.eta,
        delta=args.delta, params=args.params, x1=args.x1, T=args.T,
        **overrides)
    result = run_experiment(config)
    for mode in config.modes:
        eta, delta = result.rates[mode]
        rate = "" if eta is None else f" eta={eta:.4g}"
        rate += "" if delta is None else f" delta={delta:.4g}"
        print(f"{args.scenario}/{mode}:{rate} "
              f"final regret (mean over {args.runs} runs) = "
              f"{result.summary.final_regret_mean[mode]:.4f}")
    if result.files:
        print(f"wrote {len(result.files)} files to {args.out}")
    return 0


def cmd_list_scenarios() -> int:
    for name, sc in builtin_scenarios().items():
        alphas = sc.alpha_values()
        targets = sc.r_values()
        print(f"{name}: T={sc.T}, target in [{targets.min():g}, {targets.max():g}], "
              f"alpha in [{alphas.min():g}, {alphas.max():g}], n_t={sc.default_nt}")
    return 0


def cmd_validate_budget(args) -> int:
    nt = args.nt if args.nt in ("t", "auto") else int(args.nt)
    schedule = resolve_schedule(nt, args.T, args.a, args.c, scenario_default=8)
    report = validate_budget(schedule, args.T)
    status = "ok" if report.ok else "VIOLATED"
    print(f"sum 1/sqrt(n_t) = {report.lhs:.6f}  <=  c T^(1-a/2) = "
          f"{report.rhs:.6f}: {status}")
    return 0 if report.ok else 1


def cmd_bounds(args) -> int:
    scenario = builtin_scenarios()[args.scenario]
    names = list(SUITES) if args.lemma == "all" else [args.lemma]
    failed = 0
    for name in names:
        suite = SUITES[name](scenario, trials=args.trials, seed=args.seed)
        print(suite.summary())
        print(f"  tightest trial: measured {suite.worst.measured:.6g} vs "
              f"bound {suite.worst.bound:.6g}")
        failed += 0 if suite.ok else 1
    return 0 if failed == 0 else 1


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = argparse.ArgumentParser(prog="cvarlearn")
    sub = parser.add_subparsers(dest="command", required=True)

    run_parser = _add_run_parser(sub)

    sub.add_parser("list-scenarios", help="print the scenario catalog")

    vb = sub.add_parser("validate-budget", help="check a sampling budget")
    vb.add_argument("--nt", default="8")
    vb.add_argument("--T", type=int, default=500)
    vb.add_argument("--a", type=float, default=1.0)
    vb.add_argument("--c", type=float, default=1.0)

    bounds = sub.add_parser("bounds", help="run bound coverage suites")
    bounds.add_argument("--lemma", default="all",
                        choices=("3", "4", "5", "7", "dkw", "all"))
    bounds.add_argument("--trials", type=int, default=1000)
    bounds.add_argument("--seed", type=int, default=0)
    bounds.add_argument("--scenario", default="step")

    args = parser.parse_args(argv)
    if args.command == "run":
        return cmd_run(args, parser, run_parser, argv)
    if args.command == "list-scenarios":
        return cmd_list_scenarios()
    if args.command == "validate-budget":
        return cmd_validate_budget(args)
    if args.command == "bounds":
        return cmd_bounds(args)
    raise AssertionError


if __name__ == "__main__":
    raise SystemExit(main())
