"""Restrictive water-filling allocation of storage lengths.

Solves, for a class distribution p, importance weights W, radix r, original
lengths L_i, and budget T:

    minimize   sum_i p_i W_i (r**(L_i - l_i) - 1)/(r**L_i - 1)
    subject to sum_i p_i l_i <= T,   0 <= l_i <= L_i.

The stationarity condition makes every unclipped class sit at a common water
level: l_i = (u + a_i)/ln r clipped to [0, L_i], where a_i collects the class
threshold ln(ln r) + ln W_i - ln(1 - r**-L_i) and u = -ln(multiplier). The
clipped budget is monotone nondecreasing in u, so the primary solver bisects
on u, reads off which classes clip, and then re-solves the multiplier on that
partition in closed form, which lands the budget at machine precision.

A second, independently structured solver (:func:`solve_recursive`) peels the
most and least important classes recursively and keeps whichever branch ends
cheaper. It is retained as a cross-check oracle; the two must agree on the
achieved error.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .distortion import _distortion_array
from .errors import (
    BudgetExceedsCapacity,
    KindLengthMismatch,
    NegativeBudget,
    NoConvergence,
)
from .model import (
    AllocationPlan,
    ClassDistribution,
    ImportanceWeights,
    StorageConfig,
    SystemKind,
    Uniform,
    _frozen_array,
)

__all__ = [
    "Algorithm",
    "SolverOptions",
    "solve",
    "solve_general",
    "solve_ideal",
    "solve_quantification",
    "solve_recursive",
    "round_plan",
    "water_level_bisection",
    "ClipSets",
]

_CLIP_TOL = 1e-9


class Algorithm(enum.Enum):
    BISECTION = "bisection"
    RECURSIVE = "recursive"
    BOTH = "both"


@dataclass(frozen=True)
class SolverOptions:
    budget_tolerance: float = 1e-9
    max_bisection_iters: int = 200
    algorithm: Algorithm = Algorithm.BISECTION

    def __post_init__(self):
        if self.budget_tolerance <= 0.0:
            raise ValueError("budget_tolerance must be positive")


@dataclass(frozen=True)
class ClipSets:
    interior: tuple[int, ...]
    saturated: tuple[int, ...]
    zero: tuple[int, ...]


def _thresholds(logw: np.ndarray, caps: np.ndarray, ln_r: float) -> np.ndarray:
    """Per-class a_i = ln(ln r) + ln W_i - ln(1 - r**-L_i); -inf for W_i = 0."""
    with np.errstate(divide="ignore", invalid="ignore"):
        tail = np.log1p(-np.exp(-caps * ln_r))  # 0 for infinite caps, -inf for cap 0
        a = math.log(ln_r) + logw - tail
    a[np.isnan(a)] = -np.inf  # zero weight on a zero cap
    return a


def _lengths_at(u: float, a: np.ndarray, caps: np.ndarray, ln_r: float) -> np.ndarray:
    with np.errstate(invalid="ignore"):
        raw = (u + a) / ln_r
    raw[np.isnan(raw)] = 0.0
    return np.clip(raw, 0.0, caps)


def _partition_masks(l: np.ndarray, caps: np.ndarray):
    saturated = np.isfinite(caps) & (caps > 0.0) & (l >= caps - _CLIP_TOL)
    zero = ~saturated & (l <= _CLIP_TOL)
    interior = ~saturated & ~zero
    return interior, saturated, zero


class _Partitioned:
    """Closed-form multiplier and interior lengths for a fixed clip partition."""

    def __init__(self, p, logw, caps, budget, interior, saturated, ln_r):
        self.ok = bool(np.any(interior))
        if not self.ok:
            return
        tail = np.log1p(-np.exp(-caps[interior] * ln_r))
        c = logw[interior] - tail
        share = p[interior]
        self.support = float(np.sum(share))
        self.residual = float(budget - np.sum(p[saturated] * caps[saturated]))
        self.c_mean = float(np.dot(share, c) / self.support)
        self.interior_lengths = self.residual / self.support + (c - self.c_mean) / ln_r
        self.log_multiplier = (
            math.log(ln_r) + self.c_mean - ln_r * self.residual / self.support
        )


def _bisect_water_level(
    p: np.ndarray,
    a: np.ndarray,
    caps: np.ndarray,
    budget: float,
    ln_r: float,
    max_iters: int,
) -> float:
    """Find u with sum(p * l(u)) = budget by monotone bisection."""
    solvable = np.isfinite(a)
    lo = float(np.min(-a[solvable])) - 1.0
    finite_caps = solvable & np.isfinite(caps)
    hi_candidates = caps[finite_caps] * ln_r - a[finite_caps]
    hi = float(np.max(hi_candidates)) + 1.0 if hi_candidates.size else lo + 1.0
    # unbounded classes: expand until the budget is bracketed
    while float(np.dot(p, _lengths_at(hi, a, caps, ln_r))) < budget:
        hi = lo + 2.0 * (hi - lo) + 1.0
    for _ in range(max_iters):
        mid = 0.5 * (lo + hi)
        if float(np.dot(p, _lengths_at(mid, a, caps, ln_r))) < budget:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * max(1.0, abs(lo), abs(hi)):
            break
    return 0.5 * (lo + hi)


def _solve_core(
    dist: ClassDistribution,
    weights: ImportanceWeights,
    config: StorageConfig,
    opts: SolverOptions,
) -> AllocationPlan:
    p = dist.probs
    logw = np.asarray(weights.log_values, dtype=float)
    caps = config.lengths_array(dist.n)
    ln_r = math.log(config.radix)
    T = config.budget

    solvable = np.isfinite(logw) & (caps > 0.0)
    if np.any(solvable):
        cap_solv = float(np.sum(p[solvable] * caps[solvable]))  # inf when unbounded
    else:
        cap_solv = 0.0
    budget = min(T, cap_solv)

    a = _thresholds(logw, caps, ln_r)

    if budget <= 0.0:
        l = np.zeros(dist.n)
    elif budget >= cap_solv:  # every solvable class saturates
        l = np.where(solvable, caps, 0.0)
    else:
        u = _bisect_water_level(p, a, caps, budget, ln_r, opts.max_bisection_iters)
        l = _lengths_at(u, a, caps, ln_r)
        interior, saturated, _ = _partition_masks(l, caps)
        fit = _Partitioned(p, logw, caps, budget, interior, saturated, ln_r)
        if fit.ok and np.all(fit.interior_lengths >= -_CLIP_TOL) and np.all(
            fit.interior_lengths <= caps[interior] + _CLIP_TOL
        ):
            l = l.copy()
            l[interior] = np.clip(fit.interior_lengths, 0.0, caps[interior])
            l[saturated] = caps[saturated]
            l[~interior & ~saturated] = 0.0
        # else: partition disagreed at a breakpoint; keep the bisection lengths
        if abs(float(np.dot(p, l)) - budget) > opts.budget_tolerance:
            raise NoConvergence(
                f"budget residual {float(np.dot(p, l)) - budget:.3e} exceeds "
                f"tolerance {opts.budget_tolerance:.1e}"
            )
    return _plan_from_lengths(dist, weights, config, l)


def _plan_from_lengths(
    dist: ClassDistribution,
    weights: ImportanceWeights,
    config: StorageConfig,
    l: np.ndarray,
) -> AllocationPlan:
    """Derive clip sets, multiplier, and water level from final lengths."""
    p = dist.probs
    logw = np.asarray(weights.log_values, dtype=float)
    caps = config.lengths_array(dist.n)
    ln_r = math.log(config.radix)
    achieved = float(np.dot(p, l))
    interior, saturated, zero = _partition_masks(l, caps)

    fit = _Partitioned(p, logw, caps, achieved, interior, saturated, ln_r)
    if fit.ok:
        log_mult = fit.log_multiplier
    else:
        # no interior class pins the multiplier; report a boundary value
        a = _thresholds(logw, caps, ln_r)
        zero_a = a[zero & np.isfinite(a)]
        if zero_a.size:
            log_mult = float(np.max(zero_a))
        elif np.any(saturated):
            log_mult = float(np.min(a[saturated] - caps[saturated] * ln_r))
        else:
            log_mult = math.inf

    # water level in the shared-length picture: interior l_i = beta + ln(W_i)/ln r
    corr = 0.0
    if isinstance(config.original_lengths, Uniform) and config.original_lengths.length > 0:
        corr = math.log1p(-math.exp(-config.original_lengths.length * ln_r))
    beta = (math.log(ln_r) - (log_mult + corr)) / ln_r if math.isfinite(log_mult) else -math.inf
    try:
        mult = math.exp(log_mult)
    except OverflowError:
        mult = math.inf
    return AllocationPlan(
        continuous_lengths=_frozen_array(l),
        multiplier=mult,
        log_multiplier=float(log_mult),
        water_level=float(beta),
        interior_set=tuple(np.flatnonzero(interior).tolist()),
        saturated_set=tuple(np.flatnonzero(saturated).tolist()),
        zero_set=tuple(np.flatnonzero(zero).tolist()),
        achieved_budget=achieved,
    )


def _check_inputs(dist, weights, config, kind):
    if weights.n != dist.n:
        raise KindLengthMismatch(f"{weights.n} weights for {dist.n} classes")
    if config.system_kind is not kind:
        raise KindLengthMismatch(f"expected a {kind.value} config, got {config.system_kind.value}")
    if config.budget < 0.0:
        raise NegativeBudget(f"budget {config.budget} is negative")
    cap = config.capacity(dist)
    if config.budget > cap + _CLIP_TOL:
        raise BudgetExceedsCapacity(f"budget {config.budget} exceeds expected capacity {cap}")


def solve_general(
    dist: ClassDistribution,
    weights: ImportanceWeights,
    config: StorageConfig,
    opts: SolverOptions = SolverOptions(),
) -> AllocationPlan:
    """Optimal lengths for per-class original lengths (the general system).

    The returned plan meets the budget with equality whenever every weight is
    positive and 0 < T < sum(p_i L_i); zero-weight classes are pre-assigned
    zero storage, and any budget beyond the remaining classes' capacity is
    reported as unspent in ``achieved_budget``.
    """
    _check_inputs(dist, weights, config, SystemKind.GENERAL)
    return _solve_core(dist, weights, config, opts)


def solve_ideal(
    dist: ClassDistribution,
    weights: ImportanceWeights,
    config: StorageConfig,
    opts: SolverOptions = SolverOptions(),
) -> AllocationPlan:
    """Optimal lengths when every class shares one original length.

    ``opts.algorithm`` picks the water-level bisection, the recursive
    peeling solver, or both; with both, the achieved errors must agree to
    1e-9 relative or :class:`NoConvergence` is raised.
    """
    _check_inputs(dist, weights, config, SystemKind.IDEAL)
    if opts.algorithm is Algorithm.RECURSIVE:
        return solve_recursive(dist, weights, config, opts)
    plan = _solve_core(dist, weights, config, opts)
    if opts.algorithm is Algorithm.BOTH:
        other = solve_recursive(dist, weights, config, opts)
        from .distortion import rwre  # local import avoids a cycle at module load

        e1 = rwre(dist, weights, config, plan)
        e2 = rwre(dist, weights, config, other)
        if abs(e1 - e2) > 1e-9 * max(1.0, abs(e1)):
            raise NoConvergence(f"solver cross-check disagreement: {e1!r} vs {e2!r}")
    return plan


def solve_quantification(
    dist: ClassDistribution,
    weights: ImportanceWeights,
    config: StorageConfig,
    opts: SolverOptions = SolverOptions(),
) -> AllocationPlan:
    """Optimal lengths for unbounded originals (quantified real samples)."""
    _check_inputs(dist, weights, config, SystemKind.QUANTIFICATION)
    return _solve_core(dist, weights, config, opts)


_DISPATCH = {
    SystemKind.GENERAL: solve_general,
    SystemKind.IDEAL: solve_ideal,
    SystemKind.QUANTIFICATION: solve_quantification,
}


def solve(
    dist: ClassDistribution,
    weights: ImportanceWeights,
    config: StorageConfig,
    opts: SolverOptions = SolverOptions(),
) -> AllocationPlan:
    """Dispatch to the solver matching ``config.system_kind``."""
    return _DISPATCH[config.system_kind](dist, weights, config, opts)


def water_level_bisection(
    dist: ClassDistribution,
    weights: ImportanceWeights,
    lengths: Sequence[float],
    T: float,
    r: int,
    opts: SolverOptions = SolverOptions(),
) -> tuple[float, ClipSets]:
    """Bisect the multiplier until the clipped budget matches T.

    Returns the multiplier and which classes clip at each bound. This is the
    bare numerical step without the closed-form polish, kept as a public
    primitive; the clipped budget is monotone in the multiplier, which
    guarantees convergence.

    Raises
    ------
    NoConvergence
        The budget residual still exceeds ``opts.budget_tolerance`` after
        ``opts.max_bisection_iters`` iterations (the tolerance is too tight
        for the floating-point scale of the instance).
    """
    p = dist.probs
    caps = np.asarray(lengths, dtype=float)
    if caps.shape != (dist.n,) or weights.n != dist.n:
        raise KindLengthMismatch("distribution, weights, and lengths must agree in size")
    if T < 0.0:
        raise NegativeBudget(f"budget {T} is negative")
    capacity = float(np.sum(p * caps))
    if T > capacity + _CLIP_TOL:
        raise BudgetExceedsCapacity(f"budget {T} exceeds expected capacity {capacity}")
    ln_r = math.log(r)
    logw = np.asarray(weights.log_values, dtype=float)
    a = _thresholds(logw, caps, ln_r)
    solvable = np.isfinite(a)
    if not np.any(solvable):
        return math.inf, ClipSets(interior=(), saturated=(), zero=tuple(range(dist.n)))
    cap_solv = float(np.sum(p[solvable] * caps[solvable]))
    budget = min(T, cap_solv)
    if budget <= 0.0:
        u = float(-np.max(a[solvable]))
    elif budget >= cap_solv:
        u = float(np.max(caps[solvable] * ln_r - a[solvable]))
    else:
        u = _bisect_water_level(p, a, caps, budget, ln_r, opts.max_bisection_iters)
    l = _lengths_at(u, a, caps, ln_r)
    if abs(float(np.dot(p, l)) - budget) > opts.budget_tolerance:
        raise NoConvergence(
            f"residual {float(np.dot(p, l)) - budget:.3e} after {opts.max_bisection_iters} iterations"
        )
    interior, saturated, zero = _partition_masks(l, caps)
    try:
        mult = math.exp(-u)
    except OverflowError:
        mult = math.inf
    return mult, ClipSets(
        interior=tuple(np.flatnonzero(interior).tolist()),
        saturated=tuple(np.flatnonzero(saturated).tolist()),
        zero=tuple(np.flatnonzero(zero).tolist()),
    )


# --------------------------------------------------------------------------
# recursive peeling solver
# --------------------------------------------------------------------------

def solve_recursive(
    dist: ClassDistribution,
    weights: ImportanceWeights,
    config: StorageConfig,
    opts: SolverOptions = SolverOptions(),
) -> AllocationPlan:
    """Shared-length solver that recursively peels extreme classes.

    Classes are sorted by descending weight. Each window either solves with
    every class strictly inside [0, L] in closed form, or branches: drop the
    least important class to zero storage, or saturate the most important one
    at L, and keep the branch with the smaller achieved error. The budget
    handed to a window is always the original budget minus the storage of the
    saturated prefix, so windows memoize on their index pair alone. The
    result is re-permuted to the caller's class order.
    """
    _check_inputs(dist, weights, config, SystemKind.IDEAL)
    assert isinstance(config.original_lengths, Uniform)
    L = float(config.original_lengths.length)
    ln_r = math.log(config.radix)

    order = np.argsort(-np.asarray(weights.log_values), kind="stable")
    p = dist.probs[order]
    logw = np.asarray(weights.log_values)[order]
    wshift = np.exp(logw - np.max(logw))

    solvable = np.isfinite(logw)
    m = int(np.sum(solvable))  # zero-weight classes sort last and stay at zero
    cap_solv = float(np.sum(p[:m]) * L)
    budget = min(config.budget, cap_solv)

    prefix_pl = np.concatenate([[0.0], np.cumsum(p * L)])
    prefix_p = np.concatenate([[0.0], np.cumsum(p)])
    prefix_plogw = np.concatenate([[0.0], np.cumsum(np.where(solvable, p * logw, 0.0))])

    def window_error(lo: int, lengths: tuple[float, ...]) -> float:
        arr = np.asarray(lengths)
        df = _distortion_array(np.full(arr.size, L), np.clip(arr, 0.0, L), config.radix)
        return float(np.dot(p[lo : lo + arr.size] * wshift[lo : lo + arr.size], df))

    cache: dict[tuple[int, int], Optional[tuple[float, ...]]] = {}

    def best_window(lo: int, hi: int) -> Optional[tuple[float, ...]]:
        key = (lo, hi)
        if key in cache:
            return cache[key]
        t = budget - prefix_pl[lo]
        width_cap = prefix_pl[hi + 1] - prefix_pl[lo]
        if t < -_CLIP_TOL or t > width_cap + _CLIP_TOL:
            cache[key] = None
            return None
        if lo == hi:
            l_single = t / p[lo]
            result = (
                (min(max(l_single, 0.0), L),)
                if -_CLIP_TOL <= l_single <= L + _CLIP_TOL
                else None
            )
            cache[key] = result
            return result
        share = prefix_p[hi + 1] - prefix_p[lo]
        mean_logw = (prefix_plogw[hi + 1] - prefix_plogw[lo]) / share
        inner = t / share + (logw[lo : hi + 1] - mean_logw) / ln_r
        if np.all(inner >= -_CLIP_TOL) and np.all(inner <= L + _CLIP_TOL):
            result = tuple(np.clip(inner, 0.0, L).tolist())
            cache[key] = result
            return result
        candidates: list[tuple[float, ...]] = []
        drop_last = best_window(lo, hi - 1)
        if drop_last is not None:
            candidates.append(drop_last + (0.0,))
        fill_first = best_window(lo + 1, hi)
        if fill_first is not None:
            candidates.append((L,) + fill_first)
        if not candidates:
            cache[key] = None
            return None
        errs = [window_error(lo, cand) for cand in candidates]
        result = candidates[int(np.argmin(errs))]
        cache[key] = result
        return result

    lengths_sorted = np.zeros(dist.n)
    if m > 0 and budget > 0.0:
        window = best_window(0, m - 1)
        if window is None:
            raise NoConvergence("recursive solver found no feasible branch")
        lengths_sorted[:m] = window

    lengths = np.empty(dist.n)
    lengths[order] = lengths_sorted
    return _plan_from_lengths(dist, weights, config, lengths)


def round_plan(
    plan: AllocationPlan,
    dist: ClassDistribution,
    config: StorageConfig,
) -> AllocationPlan:
    """Populate integer lengths: floor each continuous length, clip to [0, L_i].

    Values within 1e-9 of an integer snap to it before flooring so solver
    noise cannot drop a digit at exact-integer points. Flooring only shrinks
    lengths, so the integer plan never overspends the budget (beyond the
    snap slack) and its error is at least the continuous one. Leftover
    budget is not redistributed.
    """
    l = np.asarray(plan.continuous_lengths, dtype=float)
    nearest = np.round(l)
    snapped = np.where(np.abs(l - nearest) <= 1e-9, nearest, l)
    caps = config.lengths_array(dist.n)
    ints = np.minimum(np.maximum(np.floor(snapped), 0.0), caps)
    return dataclasses.replace(plan, integer_lengths=_frozen_array(ints.astype(np.int64), dtype=np.int64))
