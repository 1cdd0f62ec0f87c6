"""Core domain types shared by the solvers, closed forms, and oracles.

All types are immutable after construction and safe to share across threads.
Arrays handed to constructors are copied and marked read-only.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import (
    EmptyDistribution,
    KindLengthMismatch,
    NegativeBudget,
    NonPositiveProbability,
    NotNormalized,
    RadixTooSmall,
)

#: tolerance on |sum(p) - 1| accepted before renormalizing
PROB_TOL = 1e-9


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


class SystemKind(enum.Enum):
    """Which storage model a config describes."""

    GENERAL = "general"          # per-class original lengths
    IDEAL = "ideal"              # one shared original length
    QUANTIFICATION = "quantification"  # unbounded originals (real samples)


@dataclass(frozen=True)
class Uniform:
    """Every class has the same original length, in digits."""

    length: int


@dataclass(frozen=True)
class PerClass:
    """One original length per class, in digits."""

    lengths: tuple[int, ...]


@dataclass(frozen=True)
class Unbounded:
    """Original lengths treated as infinite (quantified real samples)."""


LengthSpec = Union[Uniform, PerClass, Unbounded]


@dataclass(frozen=True, eq=False)
class ClassDistribution:
    """Validated probabilities of the event classes in a data sequence.

    Attributes
    ----------
    probs : np.ndarray
        Strictly positive probabilities normalized to sum to one.
    argmin_index, argmax_index : int
        Indices of the rarest and the most common class. Ties resolve to
        the lowest index so the result is deterministic.
    """

    probs: np.ndarray
    argmin_index: int
    argmax_index: int

    @property
    def n(self) -> int:
        return int(self.probs.size)

    def __repr__(self) -> str:  # compact, probs dominate
        return f"ClassDistribution({np.array2string(self.probs, precision=6)})"


def validate_distribution(probs: Sequence[float]) -> ClassDistribution:
    """Validate and normalize a probability vector.

    Raises
    ------
    EmptyDistribution
        No classes given.
    NonPositiveProbability
        Some p_i <= 0 (zero-probability classes are rejected because the
        parameter-free importance weight diverges there).
    NotNormalized
        |sum(p) - 1| > 1e-9. Inputs inside the tolerance are renormalized
        by dividing by their sum.
    """
    arr = np.asarray(probs, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise EmptyDistribution("need a one-dimensional, nonempty probability vector")
    if np.any(~np.isfinite(arr)) or np.any(arr <= 0.0):
        raise NonPositiveProbability(f"all probabilities must be finite and > 0, got {arr}")
    total = float(arr.sum())
    if abs(total - 1.0) > PROB_TOL:
        raise NotNormalized(f"probabilities sum to {total!r}, not 1 within {PROB_TOL}")
    arr = arr / total
    return ClassDistribution(
        probs=_frozen_array(arr),
        argmin_index=int(np.argmin(arr)),
        argmax_index=int(np.argmax(arr)),
    )


@dataclass(frozen=True)
class StorageConfig:
    """Radix, original lengths, budget, and system kind of a storage system.

    The budget is the expected number of stored digits per record, so it is
    a real number; only per-class lengths are integers.
    """

    radix: int
    original_lengths: LengthSpec
    budget: float
    system_kind: SystemKind

    def lengths_array(self, n: int) -> np.ndarray:
        """Original lengths as a float vector of size n (inf if unbounded)."""
        spec = self.original_lengths
        if isinstance(spec, Uniform):
            return np.full(n, float(spec.length))
        if isinstance(spec, PerClass):
            if len(spec.lengths) != n:
                raise KindLengthMismatch(
                    f"config has {len(spec.lengths)} per-class lengths, distribution has {n} classes"
                )
            return np.array(spec.lengths, dtype=float)
        return np.full(n, np.inf)

    def capacity(self, dist: ClassDistribution) -> float:
        """Expected original storage sum(p_i * L_i); inf when unbounded."""
        if isinstance(self.original_lengths, Unbounded):
            return float("inf")
        return float(np.dot(dist.probs, self.lengths_array(dist.n)))


_KIND_TO_SPEC = {
    SystemKind.GENERAL: PerClass,
    SystemKind.IDEAL: Uniform,
    SystemKind.QUANTIFICATION: Unbounded,
}


def make_config(
    radix: int,
    lengths: LengthSpec,
    budget: float,
    kind: SystemKind,
) -> StorageConfig:
    """Build a validated :class:`StorageConfig`.

    Raises
    ------
    RadixTooSmall, NegativeBudget, KindLengthMismatch
    """
    if int(radix) != radix or radix < 2:
        raise RadixTooSmall(f"radix must be an integer >= 2, got {radix!r}")
    if not np.isfinite(budget) or budget < 0.0:
        raise NegativeBudget(f"budget must be finite and >= 0, got {budget!r}")
    expected = _KIND_TO_SPEC[kind]
    if not isinstance(lengths, expected):
        raise KindLengthMismatch(
            f"{kind.value} systems need {expected.__name__} lengths, got {type(lengths).__name__}"
        )
    if isinstance(lengths, Uniform):
        if int(lengths.length) != lengths.length or lengths.length < 0:
            raise KindLengthMismatch(f"uniform length must be a nonnegative integer, got {lengths.length!r}")
        lengths = Uniform(int(lengths.length))
    elif isinstance(lengths, PerClass):
        if len(lengths.lengths) == 0:
            raise KindLengthMismatch("per-class lengths must be nonempty")
        if any(int(L) != L or L < 0 for L in lengths.lengths):
            raise KindLengthMismatch(f"per-class lengths must be nonnegative integers, got {lengths.lengths!r}")
        lengths = PerClass(tuple(int(L) for L in lengths.lengths))
    return StorageConfig(int(radix), lengths, float(budget), kind)


@dataclass(frozen=True, eq=False)
class ImportanceWeights:
    """Per-class importance weights plus their log values.

    ``log_values`` is authoritative in the solvers: parameter-free weights
    can underflow to 0.0 in ``values`` while their logs stay finite.
    ``rule`` is one of ``"mim"``, ``"nmim"``, ``"explicit"``; ``coeff`` is
    the importance coefficient for the ``"mim"`` rule, else None.
    """

    values: np.ndarray
    log_values: np.ndarray
    rule: str
    coeff: Optional[float] = None

    @property
    def n(self) -> int:
        return int(self.values.size)


def explicit_weights(values: Sequence[float]) -> ImportanceWeights:
    """Wrap user-supplied nonnegative weights (at least one positive)."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise EmptyDistribution("need a one-dimensional, nonempty weight vector")
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0):
        raise NonPositiveProbability(f"weights must be finite and >= 0, got {arr}")
    if not np.any(arr > 0.0):
        raise NonPositiveProbability("at least one weight must be positive")
    with np.errstate(divide="ignore"):
        logs = np.log(arr)
    return ImportanceWeights(_frozen_array(arr), _frozen_array(logs), rule="explicit")


@dataclass(frozen=True, eq=False)
class AllocationPlan:
    """Result of a storage-space allocation solve.

    ``continuous_lengths`` is the relaxed optimum; ``integer_lengths`` is
    populated by :func:`impalloc.allocator.round_plan` (floor, clipped to
    [0, L_i]). ``interior_set`` / ``saturated_set`` / ``zero_set`` partition
    the class indices. ``multiplier`` is the budget multiplier (its log is
    kept separately because extreme weights push the plain value out of
    float range) and ``water_level`` is the common pool height: an interior
    class stores water_level - ln(1/W_i)/ln r digits.
    """

    continuous_lengths: np.ndarray
    multiplier: float
    log_multiplier: float
    water_level: float
    interior_set: tuple[int, ...]
    saturated_set: tuple[int, ...]
    zero_set: tuple[int, ...]
    achieved_budget: float
    integer_lengths: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return int(self.continuous_lengths.size)
