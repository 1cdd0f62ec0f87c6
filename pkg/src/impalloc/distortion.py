"""Digit-truncation distortion and the (relative) weighted reconstruction error.

A record of L digits in radix r, truncated to its top l digits with the rest
randomly filled, reconstructs with worst-case absolute error r**(L-l) - 1.
Normalizing by the no-storage worst case r**L - 1 gives the per-class
distortion in [0, 1]; weighting by class probability and importance and
normalizing again gives the RWRE, the objective all solvers minimize.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import (
    InfeasiblePlan,
    InteriorConditionViolated,
    OutOfRange,
    PreconditionBudgetTooSmall,
)
from .importance import collision_mass, mim_functional, nmim_functional
from .model import AllocationPlan, ClassDistribution, ImportanceWeights, StorageConfig

__all__ = [
    "digit_distortion",
    "ErrorReport",
    "error_report",
    "rwre",
    "rwre_interior_closed_form",
    "rwre_nmim_closed_form",
    "radix_power_minus_one",
]

_BOUND_TOL = 1e-9


def radix_power_minus_one(r: int, x: float) -> float:
    """r**x - 1, exact integer arithmetic for integral x when it fits."""
    if x == round(x) and x * math.log10(r) < 300:
        return float(r ** int(round(x)) - 1)
    return math.expm1(x * math.log(r))


def digit_distortion(L: float, l: float, r: int) -> float:
    """Worst-case relative reconstruction error after keeping l of L digits.

    (r**(L-l) - 1) / (r**L - 1), which is 1 at l = 0, 0 at l = L, and
    strictly decreasing in between. L may be math.inf (quantified reals),
    in which case the value is r**-l. Real-valued l is accepted because the
    continuous relaxation is evaluated before rounding.

    Raises
    ------
    OutOfRange
        l < 0 or l > L (beyond a 1e-12 slack).
    """
    if r < 2:
        raise OutOfRange(f"radix must be >= 2, got {r}")
    if l < -1e-12 or l - L > 1e-12:
        raise OutOfRange(f"length {l} outside [0, {L}]")
    l = min(max(l, 0.0), L)
    if math.isinf(L):
        return math.exp(-l * math.log(r))
    if L == 0:
        return 0.0
    if l == round(l):
        num = radix_power_minus_one(r, L - round(l))
        den = radix_power_minus_one(r, L)
        if math.isfinite(num) and math.isfinite(den):
            return num / den
    ln_r = math.log(r)
    # r**-l * (1 - r**-(L-l)) / (1 - r**-L), every factor in (0, 1]
    return math.exp(
        -l * ln_r
        + math.log1p(-math.exp(-(L - l) * ln_r))
        - math.log1p(-math.exp(-L * ln_r))
    )


def _distortion_array(lengths: np.ndarray, l: np.ndarray, r: int) -> np.ndarray:
    """Vectorized digit_distortion for validated, clipped inputs."""
    ln_r = math.log(r)
    out = np.empty_like(l, dtype=float)
    finite = np.isfinite(lengths)
    out[~finite] = np.exp(-l[~finite] * ln_r)
    if np.any(finite):
        L = lengths[finite]
        lf = l[finite]
        with np.errstate(divide="ignore"):
            val = np.exp(
                -lf * ln_r
                + np.log1p(-np.exp(-(L - lf) * ln_r))
                - np.log1p(-np.exp(-L * ln_r))
            )
        val = np.where(L == 0.0, 0.0, val)
        val = np.where(lf >= L, 0.0, val)
        out[finite] = val
    return out


@dataclass(frozen=True, eq=False)
class ErrorReport:
    """Weighted reconstruction error of one plan.

    ``weighted_error`` is sum_i p_i W_i D_i at the weights' own scale;
    ``rwre`` is the same sum normalized by its no-storage maximum, always
    in [0, 1]; ``per_class_distortion`` holds the D_i themselves.
    """

    weighted_error: float
    rwre: float
    per_class_distortion: np.ndarray


LengthsLike = Union[AllocationPlan, Sequence[float], np.ndarray]


def _as_lengths(lengths: LengthsLike, *, use_integer: bool = False) -> np.ndarray:
    if isinstance(lengths, AllocationPlan):
        if use_integer:
            if lengths.integer_lengths is None:
                raise InfeasiblePlan("plan has no integer lengths; round it first")
            return np.asarray(lengths.integer_lengths, dtype=float)
        return np.asarray(lengths.continuous_lengths, dtype=float)
    return np.asarray(lengths, dtype=float)


def error_report(
    dist: ClassDistribution,
    weights: ImportanceWeights,
    config: StorageConfig,
    lengths: LengthsLike,
    *,
    use_integer: bool = False,
) -> ErrorReport:
    """Evaluate a plan (or raw length vector) against a storage config.

    Raises
    ------
    InfeasiblePlan
        Some length falls outside [0, L_i] beyond a 1e-9 slack, or the
        vector sizes disagree.
    """
    l = _as_lengths(lengths, use_integer=use_integer)
    if l.shape != (dist.n,) or weights.n != dist.n:
        raise InfeasiblePlan(
            f"sizes disagree: {dist.n} classes, {weights.n} weights, {l.shape} lengths"
        )
    caps = config.lengths_array(dist.n)
    if np.any(l < -_BOUND_TOL) or np.any(l - caps > _BOUND_TOL):
        raise InfeasiblePlan(f"lengths {l} violate bounds [0, {caps}]")
    l = np.clip(l, 0.0, caps)
    df = _distortion_array(caps, l, config.radix)
    # normalize with max-shifted weights so underflowed values cancel
    shift = np.max(weights.log_values)
    wshift = np.exp(weights.log_values - shift)
    denom = float(np.dot(dist.probs, wshift))
    rwre_val = float(np.dot(dist.probs * wshift, df) / denom)
    weighted = float(np.dot(dist.probs * weights.values, df))
    df.setflags(write=False)
    return ErrorReport(weighted_error=weighted, rwre=rwre_val, per_class_distortion=df)


def rwre(
    dist: ClassDistribution,
    weights: ImportanceWeights,
    config: StorageConfig,
    lengths: LengthsLike,
    *,
    use_integer: bool = False,
) -> float:
    """Relative weighted reconstruction error of a plan, in [0, 1]."""
    return error_report(dist, weights, config, lengths, use_integer=use_integer).rwre


def rwre_interior_closed_form(
    dist: ClassDistribution,
    coeff: float,
    L: int,
    T: float,
    r: int,
) -> float:
    """RWRE of the all-interior optimum under parametric weights, closed form.

    Valid only when every class length T + coeff*(gamma - p_i)/ln r stays in
    [0, L]; then the optimum error depends on the data only through the
    importance score and the collision mass.

    Raises
    ------
    InteriorConditionViolated
        Some class would clip at 0 or L.
    """
    gamma = collision_mass(dist)
    margins = T + coeff * (gamma - dist.probs) / math.log(r)
    if np.any(margins < -_BOUND_TOL) or np.any(margins > L + _BOUND_TOL):
        raise InteriorConditionViolated(
            f"lengths {margins} leave [0, {L}]; the closed form does not apply"
        )
    score = mim_functional(dist, coeff)
    num = math.exp(coeff * (1.0 - gamma) + (L - T) * math.log(r) - score)
    return (num - 1.0) / radix_power_minus_one(r, L)


def rwre_nmim_closed_form(dist: ClassDistribution, T: float, r: int) -> float:
    """RWRE of the quantification optimum under parameter-free weights.

    exp(n - 1 - score) * r**-T, valid whenever n <= T ln r (which keeps
    every class interior for any distribution); always <= r**-n.

    Raises
    ------
    PreconditionBudgetTooSmall
        T ln r < n.
    """
    n = dist.n
    if n > T * math.log(r) + _BOUND_TOL:
        raise PreconditionBudgetTooSmall(
            f"need n <= T ln r, got n={n}, T ln r={T * math.log(r):.6g}"
        )
    score = nmim_functional(dist)
    return math.exp((n - 1.0 - score) - T * math.log(r))
