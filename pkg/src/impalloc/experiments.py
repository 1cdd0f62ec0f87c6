"""Bundled benchmark experiments: deterministic CSV sweeps plus self-checks.

Each preset solves a fixed scenario, writes one CSV (consumed by the figure
renderer) and one summary JSON, and evaluates embedded reference checks.
All presets use radix 2.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from scipy.special import logsumexp

from . import __version__
from .allocator import round_plan, solve_ideal, solve_quantification
from .analysis import max_compressed_size
from .distortion import radix_power_minus_one, rwre, rwre_nmim_closed_form
from .importance import collision_mass, mim_functional, mim_weights, nmim_functional, nmim_weights
from .model import SystemKind, Unbounded, Uniform, make_config, validate_distribution

__all__ = ["EXPERIMENTS", "run_experiment", "write_csv", "format_number"]

# six-class benchmark: probabilities ascending, one class near the collision mass
BROKEN_LINE_DIST = (0.03, 0.07, 0.1395, 0.2205, 0.25, 0.29)
# five-class benchmark used for the budget sweeps
SWEEP_DIST = (0.031, 0.052, 0.127, 0.208, 0.582)
# five benchmark vectors for the compressibility table (shared length 16).
# P2 as published sums to 1.002: the published score table follows from the
# raw vector, the published max-compression values from the renormalized one,
# so the table evaluates raw and everything distribution-shaped renormalizes.
TABLE1_DISTS = {
    "P1": (0.01, 0.02, 0.03, 0.04, 0.9),
    "P2": (0.003, 0.007, 0.108, 0.132, 0.752),
    "P3": (0.001, 0.001, 0.001, 0.001, 0.996),
    "P4": (0.021, 0.086, 0.103, 0.378, 0.412),
    "P5": (0.2, 0.2, 0.2, 0.2, 0.2),
}
TABLE1_REFS = {
    # dist -> (length offset of rarest class, of commonest class, importance score)
    "P1": (5.7924, -0.6276, 6.7234),
    "P2": (4.2679, -1.1350, 6.1305),
    "P3": (7.1487, -0.0287, 5.4344),
    "P4": (2.2367, -0.5838, 5.2530),
    "P5": (0.0, 0.0, 5.0),
}
DELTA_STAR_REFS = {"P1": 11.85, "P2": 10.97, "P3": 9.99, "P4": 9.73, "P5": 9.36}
# five benchmark distributions for the quantification sweeps
TABLE2_DISTS = {
    "P1": (0.007, 0.24, 0.24, 0.24, 0.273),
    "P2": (0.007, 0.009, 0.106, 0.129, 0.749),
    "P3": (0.01, 0.02, 0.03, 0.04, 0.9),
    "P4": (0.014, 0.086, 0.113, 0.375, 0.412),
    "P5": (0.2, 0.2, 0.2, 0.2, 0.2),
}
TABLE2_REFS = {"P1": 136.8953, "P2": 136.8953, "P3": 94.3948, "P4": 66.1599, "P5": 4.0}

_R = 2


def _as_distribution(probs):
    """Validated distribution from a published vector (renormalized)."""
    arr = np.asarray(probs, dtype=float)
    return validate_distribution(arr / arr.sum())


def format_number(x: float) -> str:
    """Nine significant digits, '.' decimal separator."""
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return format(float(x), ".9g")


def _csv_quote(field: str) -> str:
    if any(ch in field for ch in ',"\n'):
        return '"' + field.replace('"', '""') + '"'
    return field


def write_csv(
    path: Path,
    columns: Sequence[str],
    rows: Iterable[Sequence],
    *,
    config_hash: str,
    seed: Optional[int],
) -> None:
    """Deterministic CSV with a provenance comment line before the header."""
    lines = [f"# impalloc {__version__} config={config_hash[:12]} seed={'none' if seed is None else seed}"]
    lines.append(",".join(columns))
    for row in rows:
        cells = [format_number(c) if isinstance(c, (int, float)) and not isinstance(c, bool) else _csv_quote(str(c)) for c in row]
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


def _preset_hash(payload: dict) -> str:
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


def _budget_grid(lo: float, hi: float, steps: int) -> np.ndarray:
    return np.linspace(lo, hi, steps)


# --------------------------------------------------------------------------
# presets
# --------------------------------------------------------------------------

def _run_fig1(out_dir: Path, seed: Optional[int]) -> tuple[list[Check], dict]:
    dist = _as_distribution(BROKEN_LINE_DIST)
    L, T = 10, 4.0
    coeffs = [-35.0, -10.0, 0.0, 10.0, 35.0]
    config = make_config(_R, Uniform(L), T, SystemKind.IDEAL)
    rows = []
    plans = {}
    for c in coeffs:
        plan = solve_ideal(dist, mim_weights(dist, c), config)
        plans[c] = plan
        for k in range(dist.n):
            rows.append((format_number(c), k + 1, dist.probs[k], plan.continuous_lengths[k]))
    write_csv(
        out_dir / "fig1.csv",
        ["series", "class_index", "probability", "length"],
        rows,
        config_hash=_preset_hash({"preset": "fig1", "dist": BROKEN_LINE_DIST, "L": L, "T": T, "coeffs": coeffs}),
        seed=seed,
    )
    checks = []
    l0 = plans[0.0].continuous_lengths
    checks.append(Check("zero_coefficient_flat_at_budget", bool(np.max(np.abs(l0 - T)) <= 1e-9)))
    l10 = plans[10.0].continuous_lengths
    checks.append(
        Check(
            "coeff10_strictly_decreasing_in_probability",
            bool(np.all(np.diff(l10) < -1e-9)),
            f"lengths {l10}",
        )
    )
    checks.append(Check("coeff10_near_budget_at_collision_mass_class", bool(abs(l10[3] - T) <= 0.1), f"l4={l10[3]:.4f}"))
    for c in (-35.0, 35.0):
        clipped = len(plans[c].saturated_set) + len(plans[c].zero_set)
        checks.append(Check(f"coeff{format_number(c)}_has_clipped_class", clipped >= 1, f"{clipped} clipped"))
    for c in coeffs:
        l = plans[c].continuous_lengths
        if c > 0:
            ok = bool(np.all(np.diff(l) <= 1e-9))  # probabilities ascend, lengths must not
        elif c < 0:
            ok = bool(np.all(np.diff(l) >= -1e-9))
        else:
            continue
        checks.append(Check(f"coeff{format_number(c)}_ordering_follows_probability", ok))
    values = {format_number(c): plans[c].continuous_lengths.tolist() for c in coeffs}
    return checks, {"lengths": values}


def _sweep_rows(dist, coeffs, L, T_grid, with_rounded):
    config_for = lambda T: make_config(_R, Uniform(L), float(T), SystemKind.IDEAL)
    curves = {}
    for c in coeffs:
        w = mim_weights(dist, c)
        cont, rounded = [], []
        for T in T_grid:
            config = config_for(T)
            plan = solve_ideal(dist, w, config)
            cont.append(rwre(dist, w, config, plan))
            if with_rounded:
                rp = round_plan(plan, dist, config)
                rounded.append(rwre(dist, w, config, rp, use_integer=True))
        curves[c] = (np.array(cont), np.array(rounded) if with_rounded else None)
    return curves


def _run_fig2(out_dir: Path, seed: Optional[int]) -> tuple[list[Check], dict]:
    dist = _as_distribution(SWEEP_DIST)
    L = 16
    coeffs = [-20.0, -12.0, 0.0, 20.0]
    T_grid = _budget_grid(0.0, 8.0, 81)
    curves = _sweep_rows(dist, coeffs, L, T_grid, with_rounded=True)
    rows = []
    for c in coeffs:
        cont, rounded = curves[c]
        for T, e in zip(T_grid, cont):
            rows.append((f"w={format_number(c)} continuous", T, e))
        for T, e in zip(T_grid, rounded):
            rows.append((f"w={format_number(c)} rounded", T, e))
    write_csv(
        out_dir / "fig2.csv",
        ["series", "T", "rwre"],
        rows,
        config_hash=_preset_hash({"preset": "fig2", "dist": SWEEP_DIST, "L": L, "coeffs": coeffs}),
        seed=seed,
    )
    checks = []
    for c in coeffs:
        cont, rounded = curves[c]
        checks.append(
            Check(
                f"continuous_below_rounded[w={format_number(c)}]",
                bool(np.all(cont <= rounded + 1e-12)),
            )
        )
        checks.append(
            Check(
                f"continuous_nonincreasing[w={format_number(c)}]",
                bool(np.all(np.diff(cont) <= 1e-9)),
            )
        )
    return checks, {}


def _run_fig3(out_dir: Path, seed: Optional[int]) -> tuple[list[Check], dict]:
    dist = _as_distribution(SWEEP_DIST)
    L = 16
    coeffs = [-30.0, -20.0, -10.0, 0.0, 10.0, 20.0, 30.0]
    T_grid = _budget_grid(0.0, 8.0, 81)
    curves = _sweep_rows(dist, coeffs, L, T_grid, with_rounded=False)
    rows = []
    for c in coeffs:
        for T, e in zip(T_grid, curves[c][0]):
            rows.append((format_number(c), T, e))
    write_csv(
        out_dir / "fig3.csv",
        ["series", "T", "rwre"],
        rows,
        config_hash=_preset_hash({"preset": "fig3", "dist": SWEEP_DIST, "L": L, "coeffs": coeffs}),
        seed=seed,
    )
    checks = []
    peak = curves[0.0][0]
    for c in coeffs:
        cont = curves[c][0]
        checks.append(Check(f"nonincreasing_in_T[w={format_number(c)}]", bool(np.all(np.diff(cont) <= 1e-9))))
        checks.append(Check(f"below_zero_coefficient_curve[w={format_number(c)}]", bool(np.all(cont <= peak + 1e-12))))
        checks.append(Check(f"full_error_at_zero_budget[w={format_number(c)}]", bool(abs(cont[0] - 1.0) <= 1e-9)))
    return checks, {}


def _run_fig4(out_dir: Path, seed: Optional[int]) -> tuple[list[Check], dict]:
    L, coeff, cap = 16, 5.0, 0.01
    T_grid = _budget_grid(2.0, 8.0, 61)
    rows = []
    checks: list[Check] = []
    delta_star = {}
    for name, probs in TABLE1_DISTS.items():
        dist = _as_distribution(probs)
        w = mim_weights(dist, coeff)
        errs = []
        for T in T_grid:
            config = make_config(_R, Uniform(L), float(T), SystemKind.IDEAL)
            errs.append(rwre(dist, w, config, solve_ideal(dist, w, config)))
        # ascending compressed size = descending budget
        for T, e in zip(T_grid[::-1], errs[::-1]):
            rows.append((name, L - T, e))
        errs_arr = np.array(errs)[::-1]
        checks.append(Check(f"error_grows_with_compression[{name}]", bool(np.all(np.diff(errs_arr) >= -1e-12))))
        delta_star[name] = max_compressed_size(dist, coeff, L, _R, cap)
    write_csv(
        out_dir / "fig4.csv",
        ["series", "delta", "rwre"],
        rows,
        config_hash=_preset_hash({"preset": "fig4", "dists": sorted(TABLE1_DISTS), "L": L, "coeff": coeff}),
        seed=seed,
    )
    # uniform distribution must dominate at every compressed size
    uniform_dist = _as_distribution(TABLE1_DISTS["P5"])
    w5 = mim_weights(uniform_dist, coeff)
    for name, probs in TABLE1_DISTS.items():
        if name == "P5":
            continue
        dist = _as_distribution(probs)
        w = mim_weights(dist, coeff)
        ok = True
        for T in T_grid[::4]:
            config = make_config(_R, Uniform(L), float(T), SystemKind.IDEAL)
            e = rwre(dist, w, config, solve_ideal(dist, w, config))
            e5 = rwre(uniform_dist, w5, config, solve_ideal(uniform_dist, w5, config))
            if e > e5 + 1e-12:
                ok = False
        checks.append(Check(f"uniform_is_worst[{name}]", ok))
    for name, ref in DELTA_STAR_REFS.items():
        got = delta_star[name]
        checks.append(
            Check(
                f"delta_star_reference[{name}]",
                bool(abs(got - ref) <= 0.01),
                f"computed {got:.4f}, reference {ref}",
            )
        )
    for name, probs in TABLE1_DISTS.items():
        # removing exactly delta_star digits must land the error on the cap
        dist = _as_distribution(probs)
        gamma = collision_mass(dist)
        score = mim_functional(dist, coeff)
        num = math.exp(coeff * (1.0 - gamma) + delta_star[name] * math.log(_R) - score)
        err_at_star = (num - 1.0) / radix_power_minus_one(_R, L)
        checks.append(
            Check(
                f"delta_star_inverts_to_cap[{name}]",
                bool(abs(err_at_star - cap) <= 1e-9),
                f"error at max compression {err_at_star:.12f}",
            )
        )
    return checks, {"delta_star": delta_star}


def _run_fig5(out_dir: Path, seed: Optional[int]) -> tuple[list[Check], dict]:
    T_grid = _budget_grid(0.0, 20.0, 81)
    n = 5
    rows = []
    curves = {}
    for name, probs in TABLE2_DISTS.items():
        dist = _as_distribution(probs)
        w = nmim_weights(dist)
        errs = []
        for T in T_grid:
            config = make_config(_R, Unbounded(), float(T), SystemKind.QUANTIFICATION)
            errs.append(rwre(dist, w, config, solve_quantification(dist, w, config)))
        curves[name] = np.array(errs)
        for T, e in zip(T_grid, errs):
            rows.append((name, T, e))
    write_csv(
        out_dir / "fig5.csv",
        ["series", "T", "rwre"],
        rows,
        config_hash=_preset_hash({"preset": "fig5", "dists": sorted(TABLE2_DISTS)}),
        seed=seed,
    )
    checks = []
    for name, errs in curves.items():
        checks.append(Check(f"nonincreasing_in_T[{name}]", bool(np.all(np.diff(errs) <= 1e-12))))
    regime = T_grid > n / math.log(_R)
    gap_ref = (TABLE2_REFS["P1"] - TABLE2_REFS["P4"]) / math.log(10.0)
    gaps = np.log10(curves["P4"][regime]) - np.log10(curves["P1"][regime])
    checks.append(
        Check(
            "constant_log_offset_P1_P4",
            bool(np.all(np.abs(gaps - gap_ref) <= 0.1)),
            f"offsets {gaps.min():.4f}..{gaps.max():.4f} vs {gap_ref:.4f}",
        )
    )
    # closed form agrees with the solver pipeline inside the regime
    agree = True
    for name in ("P3", "P5"):
        dist = _as_distribution(TABLE2_DISTS[name])
        for T, err in zip(T_grid[regime], curves[name][regime]):
            cf = rwre_nmim_closed_form(dist, float(T), _R)
            if abs(err - cf) > 1e-9 * max(cf, 1e-300):
                agree = False
    checks.append(Check("closed_form_matches_solver_in_regime", agree))
    return checks, {"log_offset_reference": gap_ref}


def _run_table1(out_dir: Path, seed: Optional[int]) -> tuple[list[Check], dict]:
    coeff = 5.0
    ln_r = math.log(_R)
    rows, checks = [], []
    values = {}
    for name, probs in TABLE1_DISTS.items():
        # published vectors evaluated exactly as printed (see TABLE1_DISTS note)
        p = np.asarray(probs, dtype=float)
        gamma = float(np.sum(p * p))
        off_min = coeff * (gamma - p.min()) / ln_r
        off_max = coeff * (gamma - p.max()) / ln_r
        score = float(logsumexp(np.log(p) + coeff * (1.0 - p))) + coeff * gamma
        rows.append((name, ";".join(format_number(p) for p in probs), off_min, off_max, score))
        values[name] = {"offset_rarest": off_min, "offset_commonest": off_max, "importance_score": score}
        refs = TABLE1_REFS[name]
        for label, got, ref in (
            ("offset_rarest", off_min, refs[0]),
            ("offset_commonest", off_max, refs[1]),
            ("importance_score", score, refs[2]),
        ):
            checks.append(Check(f"{label}[{name}]", bool(abs(got - ref) <= 1e-3), f"computed {got:.6f}, reference {ref}"))
    write_csv(
        out_dir / "table1.csv",
        ["dist_id", "probs", "offset_rarest", "offset_commonest", "importance_score"],
        rows,
        config_hash=_preset_hash({"preset": "table1", "coeff": coeff}),
        seed=seed,
    )
    return checks, {"values": values}


def _run_table2(out_dir: Path, seed: Optional[int]) -> tuple[list[Check], dict]:
    rows, checks = [], []
    values = {}
    for name, probs in TABLE2_DISTS.items():
        dist = _as_distribution(probs)
        score = nmim_functional(dist)
        p_min = float(dist.probs[dist.argmin_index])
        rows.append((name, ";".join(format_number(p) for p in probs), p_min, score))
        values[name] = score
        checks.append(
            Check(
                f"nmim_score[{name}]",
                bool(abs(score - TABLE2_REFS[name]) <= 1e-3),
                f"computed {score:.6f}, reference {TABLE2_REFS[name]}",
            )
        )
    write_csv(
        out_dir / "table2.csv",
        ["dist_id", "probs", "p_min", "nmim_score"],
        rows,
        config_hash=_preset_hash({"preset": "table2"}),
        seed=seed,
    )
    return checks, {"values": values}


EXPERIMENTS: dict[str, Callable[[Path, Optional[int]], tuple[list[Check], dict]]] = {
    "fig1": _run_fig1,
    "fig2": _run_fig2,
    "fig3": _run_fig3,
    "fig4": _run_fig4,
    "fig5": _run_fig5,
    "table1": _run_table1,
    "table2": _run_table2,
}


def run_experiment(name: str, out_dir: Path, seed: Optional[int] = None) -> dict:
    """Run one preset; write its CSV and summary JSON; return the summary."""
    if name not in EXPERIMENTS:
        raise KeyError(f"unknown experiment {name!r}; choose from {sorted(EXPERIMENTS)}")
    out_dir.mkdir(parents=True, exist_ok=True)
    checks, extras = EXPERIMENTS[name](out_dir, seed)
    summary = {
        "experiment": name,
        "version": __version__,
        "passed": all(c.passed for c in checks),
        "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks],
        **extras,
    }
    (out_dir / f"{name}_summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return summary
