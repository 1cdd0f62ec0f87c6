"""Closed forms, bounds, and trade-off quantities for the two weight families.

Everything here hard-fails outside its stated regime instead of silently
falling back to the solver; the CLI offers the solver fallback explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .allocator import SolverOptions, solve_ideal
from .distortion import radix_power_minus_one, rwre
from .errors import (
    DeltaOutOfRange,
    InteriorConditionViolated,
    TargetUnreachable,
)
from .importance import collision_mass, mim_functional, mim_weights, nmim_functional
from .model import ClassDistribution, SystemKind, Uniform, make_config

__all__ = [
    "interior_condition",
    "sufficient_coeff_range",
    "closed_form_interior_lengths",
    "rwre_bounds",
    "max_compressed_size",
    "nmim_interior_lengths",
    "nmim_interior_prob_interval",
    "min_storage_for_target_nmim",
    "MonotonicityReport",
    "check_rwre_coeff_monotonicity",
    "TradeoffBounds",
    "tradeoff_bounds",
]

_TOL = 1e-9


def interior_condition(
    dist: ClassDistribution, coeff: float, L: float, T: float, r: int
) -> tuple[bool, np.ndarray]:
    """Whether every class stays strictly inside its bounds, plus the margins.

    The margin of class i is its unclipped optimal length
    T + coeff * (gamma - p_i)/ln r; the condition holds iff all margins lie
    in [0, L].
    """
    gamma = collision_mass(dist)
    margins = T + coeff * (gamma - dist.probs) / math.log(r)
    ok = bool(np.all(margins >= -_TOL) and np.all(margins <= L + _TOL))
    return ok, margins


def sufficient_coeff_range(T: float, L: float, r: int) -> tuple[float, float]:
    """Coefficient interval that keeps every class interior, distribution-free.

    Returns (max(4 ln r (T-L), -T/ln r), min(4 T ln r, ln r (L-T))). The
    lower pair is reproduced exactly as published; near its edge the
    guarantee can fail for extreme distributions when ln r < 1, so treat the
    lower end as advisory and check :func:`interior_condition` when it
    matters.
    """
    ln_r = math.log(r)
    lo = max(4.0 * ln_r * (T - L), -T / ln_r)
    hi = min(4.0 * T * ln_r, ln_r * (L - T))
    return lo, hi


def closed_form_interior_lengths(
    dist: ClassDistribution,
    coeff: float,
    T: float,
    r: int,
    L: Optional[float] = None,
) -> np.ndarray:
    """All-interior optimal lengths l_i = T + coeff*(gamma - p_i)/ln r.

    The weighted sum of these lengths equals T identically. When ``L`` is
    given the full two-sided condition is enforced; otherwise only
    nonnegativity can be checked.

    Raises
    ------
    InteriorConditionViolated
    """
    gamma = collision_mass(dist)
    lengths = T + coeff * (gamma - dist.probs) / math.log(r)
    upper = math.inf if L is None else L
    if np.any(lengths < -_TOL) or np.any(lengths > upper + _TOL):
        raise InteriorConditionViolated(
            f"lengths {lengths} leave [0, {upper}]; some class clips"
        )
    return lengths


def rwre_bounds(dist: ClassDistribution, coeff: float, L: int, r: int) -> tuple[float, float]:
    """Error bounds (delta1, delta2) sandwiching every all-interior optimum.

    delta1 is attained as T grows until the rarest class hits L; delta2 as
    T shrinks until the most common class hits zero. Uniform distributions
    (or coeff = 0) give the full (0, 1) range.
    """
    score = mim_functional(dist, coeff)
    denom = radix_power_minus_one(r, L)
    p_min = float(dist.probs[dist.argmin_index])
    p_max = float(dist.probs[dist.argmax_index])
    d1 = (math.exp(coeff * (1.0 - p_min) - score) - 1.0) / denom
    d2 = (math.exp(coeff * (1.0 - p_max) - score + L * math.log(r)) - 1.0) / denom
    return d1, d2


def max_compressed_size(
    dist: ClassDistribution, coeff: float, L: int, r: int, delta: float
) -> float:
    """Largest number of digits removable from L while keeping RWRE <= delta.

    (ln(1 + delta*(r**L - 1)) + score - coeff + coeff*gamma)/ln r, valid for
    delta between the bounds of :func:`rwre_bounds`. Never below
    ln(1 + delta*(r**L - 1))/ln r, with equality exactly for uniform
    distributions or coeff = 0.

    Raises
    ------
    DeltaOutOfRange
    """
    d1, d2 = rwre_bounds(dist, coeff, L, r)
    if not (d1 - 1e-12 <= delta <= d2 + 1e-12):
        raise DeltaOutOfRange(f"delta {delta} outside admissible [{d1:.6g}, {d2:.6g}]")
    gamma = collision_mass(dist)
    score = mim_functional(dist, coeff)
    num = math.log1p(delta * radix_power_minus_one(r, L)) + score - coeff + coeff * gamma
    return num / math.log(r)


def nmim_interior_lengths(
    dist: ClassDistribution, T: float, r: int, L: Optional[float] = None
) -> np.ndarray:
    """All-interior lengths under parameter-free weights.

    l_i = T + 1/(p_i ln r) - n/ln r; their weighted sum is T identically.

    Raises
    ------
    InteriorConditionViolated
        Some class would clip (negative length, or above L when given).
    """
    ln_r = math.log(r)
    lengths = T + 1.0 / (dist.probs * ln_r) - dist.n / ln_r
    upper = math.inf if L is None else L
    if np.any(lengths < -_TOL) or np.any(lengths > upper + _TOL):
        raise InteriorConditionViolated(
            f"lengths {lengths} leave [0, {upper}]; some class clips"
        )
    return lengths


def nmim_interior_prob_interval(
    n: int, L: Optional[float], T: float, r: int
) -> tuple[float, float]:
    """Probability interval on which parameter-free weights keep a class interior.

    Lower bound 1/(n + (L-T) ln r) (0 when L is unbounded); upper bound
    1/(n - T ln r) when n > T ln r, else 1 (any probability works).
    """
    ln_r = math.log(r)
    if L is None or math.isinf(L):
        lo = 0.0
    else:
        lo = 1.0 / (n + (L - T) * ln_r)
    hi = 1.0 / (n - T * ln_r) if n > T * ln_r else 1.0
    return lo, hi


def min_storage_for_target_nmim(dist: ClassDistribution, delta: float, r: int) -> float:
    """Smallest budget certifying RWRE <= delta under parameter-free weights.

    (n - 1 - score - ln delta)/ln r, clipped up to the regime floor n/ln r
    below which the closed form stops applying. Valid targets satisfy
    0 < delta <= r**-n (the regime's guaranteed error level).

    Raises
    ------
    TargetUnreachable
    """
    n = dist.n
    ln_r = math.log(r)
    cap = math.exp(-n * ln_r)
    if not (0.0 < delta <= cap * (1.0 + 1e-12)):
        raise TargetUnreachable(f"delta must lie in (0, r**-n] = (0, {cap:.6g}], got {delta}")
    raw = (n - 1.0 - nmim_functional(dist) - math.log(delta)) / ln_r
    return max(raw, n / ln_r)


@dataclass(frozen=True)
class MonotonicityReport:
    """Outcome of sweeping the achieved error across importance coefficients."""

    coeffs: tuple[float, ...]
    errors: tuple[float, ...]
    peak_value: float           # closed-form error at coefficient zero
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def check_rwre_coeff_monotonicity(
    dist: ClassDistribution,
    L: int,
    T: float,
    r: int,
    coeff_grid: Sequence[float],
    tol: float = 1e-9,
) -> MonotonicityReport:
    """Solve across a coefficient grid and audit the error's shape.

    Checks that the achieved error is nonincreasing over positive
    coefficients, nondecreasing over negative ones, and never above the
    coefficient-zero value (r**(L-T) - 1)/(r**L - 1).
    """
    grid = sorted(float(c) for c in coeff_grid)
    config = make_config(r, Uniform(L), T, SystemKind.IDEAL)
    opts = SolverOptions()
    errors = []
    for c in grid:
        w = mim_weights(dist, c)
        errors.append(rwre(dist, w, config, solve_ideal(dist, w, config, opts)))
    peak = radix_power_minus_one(r, L - T) / radix_power_minus_one(r, L)
    violations = []
    for (c0, e0), (c1, e1) in zip(zip(grid, errors), zip(grid[1:], errors[1:])):
        if c0 >= 0.0 and e1 > e0 + tol:
            violations.append(f"error rose from {e0} to {e1} between coefficients {c0} and {c1}")
        if c1 <= 0.0 and e1 < e0 - tol:
            violations.append(f"error fell from {e0} to {e1} between coefficients {c0} and {c1}")
    for c, e in zip(grid, errors):
        if e > peak + tol:
            violations.append(f"error {e} at coefficient {c} exceeds the zero-coefficient value {peak}")
        if c == 0.0 and abs(e - peak) > tol:
            violations.append(f"error {e} at coefficient 0 differs from the closed form {peak}")
    return MonotonicityReport(
        coeffs=tuple(grid),
        errors=tuple(errors),
        peak_value=peak,
        violations=tuple(violations),
    )


@dataclass(frozen=True)
class TradeoffBounds:
    """Error bounds and compressibility for one (distribution, coefficient)."""

    delta1: float
    delta2: float
    max_compressed: float
    interior_coeff_range: tuple[float, float]


def tradeoff_bounds(
    dist: ClassDistribution, coeff: float, L: int, T: float, r: int, delta: float
) -> TradeoffBounds:
    d1, d2 = rwre_bounds(dist, coeff, L, r)
    return TradeoffBounds(
        delta1=d1,
        delta2=d2,
        max_compressed=max_compressed_size(dist, coeff, L, r, delta),
        interior_coeff_range=sufficient_coeff_range(T, L, r),
    )
