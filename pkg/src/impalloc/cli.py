"""Command-line front end.

Exit codes: 0 success, 2 config or usage error, 3 solver error,
4 verification failure, 5 reproduction-check failure. The environment
variable IMPALLOC_SEED overrides the config seed (an explicit --seed flag
overrides both).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .allocator import round_plan, solve
from .config import ExperimentConfig, load_config
from .distortion import error_report
from .errors import (
    AllocError,
    BudgetExceedsCapacity,
    ConfigError,
    KindLengthMismatch,
    NegativeBudget,
    NoConvergence,
    NoInteriorClass,
    SearchSpaceTooLarge,
)
from .experiments import EXPERIMENTS, format_number, run_experiment, write_csv
from .model import PerClass, SystemKind, Uniform, make_config
from .oracle import brute_force_integer, kkt_certify, perturbation_check

_CONFIG_ERRORS = (ConfigError, SearchSpaceTooLarge)
_SOLVER_ERRORS = (BudgetExceedsCapacity, NegativeBudget, NoConvergence, KindLengthMismatch)


def _fail(code: int, message: str) -> int:
    print(f"impalloc: {message}", file=sys.stderr)
    return code


def _resolve_seed(cfg: ExperimentConfig, flag_seed: Optional[int]) -> Optional[int]:
    if flag_seed is not None:
        return flag_seed
    env = os.environ.get("IMPALLOC_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigError("IMPALLOC_SEED", f"not an integer: {env!r}")
    return cfg.seed


def _plan_document(cfg: ExperimentConfig, plan, rounded) -> dict:
    cont = error_report(cfg.dist, cfg.weights, cfg.storage, plan)
    ints = error_report(cfg.dist, cfg.weights, cfg.storage, rounded, use_integer=True)
    return {
        "system": cfg.storage.system_kind.value,
        "radix": cfg.storage.radix,
        "budget": cfg.storage.budget,
        "achieved_budget": plan.achieved_budget,
        "continuous_lengths": plan.continuous_lengths.tolist(),
        "integer_lengths": rounded.integer_lengths.tolist(),
        "multiplier": _json_num(plan.multiplier),
        "log_multiplier": _json_num(plan.log_multiplier),
        "water_level": _json_num(plan.water_level),
        "interior": list(plan.interior_set),
        "saturated": list(plan.saturated_set),
        "zero": list(plan.zero_set),
        "rwre": cont.rwre,
        "rwre_rounded": ints.rwre,
        "weighted_error": cont.weighted_error,
        "per_class_distortion": cont.per_class_distortion.tolist(),
    }


def _json_num(x: float):
    return x if isinstance(x, (int,)) or (isinstance(x, float) and math.isfinite(x)) else None


def _cmd_allocate(args) -> int:
    try:
        cfg = load_config(args.config)
    except _CONFIG_ERRORS + (AllocError,) as exc:
        return _fail(2, str(exc))
    try:
        plan = solve(cfg.dist, cfg.weights, cfg.storage)
        rounded = round_plan(plan, cfg.dist, cfg.storage)
        doc = _plan_document(cfg, plan, rounded)
    except _SOLVER_ERRORS as exc:
        return _fail(3, f"{type(exc).__name__}: {exc}")
    out = Path(args.out)
    if args.format == "json":
        out.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    else:
        columns = [
            "system", "radix", "budget", "achieved_budget", "rwre", "rwre_rounded",
            "weighted_error", "multiplier", "water_level",
            "n_interior", "n_saturated", "n_zero", "lengths", "integer_lengths",
        ]
        row = [
            doc["system"], doc["radix"], doc["budget"], doc["achieved_budget"],
            doc["rwre"], doc["rwre_rounded"], doc["weighted_error"],
            doc["multiplier"] if doc["multiplier"] is not None else "inf",
            doc["water_level"] if doc["water_level"] is not None else "nan",
            len(doc["interior"]), len(doc["saturated"]), len(doc["zero"]),
            ";".join(format_number(x) for x in doc["continuous_lengths"]),
            ";".join(str(int(x)) for x in doc["integer_lengths"]),
        ]
        write_csv(out, columns, [row], config_hash=cfg.sha256, seed=cfg.seed)
    return 0


def _cmd_sweep(args) -> int:
    if args.steps < 2:
        return _fail(2, f"--steps must be >= 2, got {args.steps}")
    if not args.start < args.stop:
        return _fail(2, f"--from must be below --to, got {args.start} >= {args.stop}")
    try:
        cfg = load_config(args.config)
        if args.param == "varpi" and cfg.weights_spec.get("kind") != "mim":
            raise ConfigError("weights.kind", "a varpi sweep needs the 'mim' weight rule")
    except AllocError as exc:
        return _fail(2, str(exc))

    values = np.linspace(args.start, args.stop, args.steps)
    rows = []
    for value in values:
        note = ""
        try:
            if args.param == "budget":
                storage = make_config(
                    cfg.storage.radix, cfg.storage.original_lengths, float(value), cfg.storage.system_kind
                )
                weights = cfg.weights
            else:
                storage = cfg.storage
                weights = cfg.rebuild_weights(float(value))
            plan = solve(cfg.dist, weights, storage)
            rounded = round_plan(plan, cfg.dist, storage)
            cont = error_report(cfg.dist, weights, storage, plan).rwre
            ints = error_report(cfg.dist, weights, storage, rounded, use_integer=True).rwre
            rows.append(
                (
                    float(value), cont, ints,
                    ";".join(format_number(x) for x in plan.continuous_lengths),
                    plan.multiplier, plan.water_level,
                    len(plan.interior_set), len(plan.saturated_set), len(plan.zero_set),
                    note,
                )
            )
        except AllocError as exc:
            rows.append((float(value), float("nan"), float("nan"), "", float("nan"), float("nan"), 0, 0, 0, type(exc).__name__))
    write_csv(
        Path(args.out),
        ["value", "rwre_continuous", "rwre_rounded", "lengths", "multiplier", "water_level",
         "n_interior", "n_saturated", "n_zero", "note"],
        rows,
        config_hash=cfg.sha256,
        seed=cfg.seed,
    )
    return 0


def _report_json(report, extra: dict) -> str:
    doc = {
        "optimum_value": _json_num(report.optimum_value),
        "optimum_plan": [float(x) for x in np.asarray(report.optimum_plan, dtype=float)],
        "gap_vs_candidate": _json_num(report.gap_vs_candidate),
        "trials": report.trials,
        "seed": report.seed,
        "passed": report.passed,
        "detail": report.detail,
        **extra,
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def _cmd_verify(args) -> int:
    try:
        cfg = load_config(args.config)
        seed = _resolve_seed(cfg, args.seed)
    except AllocError as exc:
        return _fail(2, str(exc))
    seed = 0 if seed is None else seed
    try:
        plan = solve(cfg.dist, cfg.weights, cfg.storage)
    except _SOLVER_ERRORS as exc:
        return _fail(3, f"{type(exc).__name__}: {exc}")

    if args.oracle == "brute":
        caps = cfg.storage.lengths_array(cfg.dist.n)
        if not np.all(np.isfinite(caps)):
            return _fail(2, "the brute oracle needs finite original lengths")
        rounded = round_plan(plan, cfg.dist, cfg.storage)
        candidate = error_report(cfg.dist, cfg.weights, cfg.storage, rounded, use_integer=True).rwre
        try:
            report = brute_force_integer(
                cfg.dist, cfg.weights, [int(L) for L in caps], cfg.storage.budget,
                cfg.storage.radix, candidate_value=candidate,
            )
        except SearchSpaceTooLarge as exc:
            return _fail(2, f"SearchSpaceTooLarge: {exc}")
        passed = report.gap_vs_candidate >= -1e-9
        print(_report_json(report, {"oracle": "brute", "candidate_value": candidate}))
        return 0 if passed else 4

    if args.oracle == "perturb":
        ok = perturbation_check(plan, cfg.dist, cfg.weights, cfg.storage, trials=args.trials, seed=seed)
        cont = error_report(cfg.dist, cfg.weights, cfg.storage, plan)
        doc = {
            "oracle": "perturb", "passed": ok, "trials": args.trials, "seed": seed,
            "optimum_value": cont.rwre, "optimum_plan": plan.continuous_lengths.tolist(),
        }
        print(json.dumps(doc, indent=2, sort_keys=True))
        return 0 if ok else 4

    # kkt, with the documented fallback when no class is interior
    try:
        report = kkt_certify(plan, cfg.dist, cfg.weights, cfg.storage)
        print(_report_json(report, {"oracle": "kkt"}))
        return 0 if report.passed else 4
    except NoInteriorClass:
        ok = perturbation_check(plan, cfg.dist, cfg.weights, cfg.storage, trials=args.trials, seed=seed)
        doc = {"oracle": "kkt", "fallback": "perturb", "passed": ok, "trials": args.trials, "seed": seed}
        print(json.dumps(doc, indent=2, sort_keys=True))
        return 0 if ok else 4


def _cmd_reproduce(args) -> int:
    seed_env = os.environ.get("IMPALLOC_SEED")
    seed = None
    if seed_env is not None:
        try:
            seed = int(seed_env)
        except ValueError:
            return _fail(2, f"IMPALLOC_SEED is not an integer: {seed_env!r}")
    try:
        summary = run_experiment(args.experiment, Path(args.out), seed=seed)
    except KeyError as exc:
        return _fail(2, str(exc))
    if not summary["passed"]:
        first = next(c for c in summary["checks"] if not c["passed"])
        return _fail(5, f"reproduction check failed: {first['name']} ({first['detail']})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="impalloc", description=__doc__)
    parser.add_argument("--version", action="version", version=f"impalloc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("allocate", help="solve one config and write the plan")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=_cmd_allocate)

    p = sub.add_parser("sweep", help="sweep the budget or the importance coefficient")
    p.add_argument("--config", required=True)
    p.add_argument("--param", choices=["budget", "varpi"], required=True)
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("verify", help="certify a solve with an independent oracle")
    p.add_argument("--config", required=True)
    p.add_argument("--oracle", choices=["brute", "perturb", "kkt"], required=True)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("reproduce", help="run a bundled benchmark experiment")
    p.add_argument("--experiment", choices=sorted(EXPERIMENTS), required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse usage errors already print a message
        return int(exc.code or 0)
    try:
        return args.func(args)
    except AllocError as exc:  # uncaught domain errors default to the solver class
        return _fail(3, f"{type(exc).__name__}: {exc}")


if __name__ == "__main__":
    sys.exit(main())
