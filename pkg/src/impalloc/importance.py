"""Importance weights and scalar importance functionals.

Two weight families share one shape: W_i proportional to exp(x_i) with
x_i = coeff * (1 - p_i) for the parametric rule (MIM) and x_i = (1 - p_i)/p_i
for the parameter-free rule (NMIM). Everything is evaluated in shifted
log-domain so coefficients up to 1e3 and probabilities down to 1e-6 never
overflow.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .model import ClassDistribution, ImportanceWeights, _frozen_array

__all__ = [
    "collision_mass",
    "renyi2_entropy",
    "mim_weights",
    "nmim_weights",
    "mim_functional",
    "nmim_functional",
    "ImportanceFunctionals",
    "importance_functionals",
]


def collision_mass(dist: ClassDistribution) -> float:
    """Sum of squared class probabilities, in [1/n, 1].

    Equals exp(-H2) for the order-2 Renyi entropy H2; an interior class
    with p_i equal to this value keeps exactly the budget-average length.
    """
    return float(np.dot(dist.probs, dist.probs))


def renyi2_entropy(dist: ClassDistribution) -> float:
    """Order-2 Renyi entropy, -ln(sum p_i^2)."""
    return float(-np.log(collision_mass(dist)))


def _normalized_from_exponents(exponents: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return (weights, log_weights) for W_i = exp(x_i)/sum_j exp(x_j)."""
    logs = exponents - logsumexp(exponents)
    return np.exp(logs), logs


def mim_weights(dist: ClassDistribution, coeff: float) -> ImportanceWeights:
    """Parametric importance weights W_i = exp(coeff*(1-p_i)), normalized.

    coeff = 0 gives uniform weights; coeff -> +inf concentrates all weight
    on the rarest class and coeff -> -inf on the most common one.
    """
    if not np.isfinite(coeff):
        raise ValueError(f"importance coefficient must be finite, got {coeff!r}")
    vals, logs = _normalized_from_exponents(coeff * (1.0 - dist.probs))
    return ImportanceWeights(_frozen_array(vals), _frozen_array(logs), rule="mim", coeff=float(coeff))


def nmim_weights(dist: ClassDistribution) -> ImportanceWeights:
    """Parameter-free importance weights W_i = exp((1-p_i)/p_i), normalized.

    Strictly decreasing in p_i, so rarer classes always weigh more.
    """
    vals, logs = _normalized_from_exponents((1.0 - dist.probs) / dist.probs)
    return ImportanceWeights(_frozen_array(vals), _frozen_array(logs), rule="nmim")


def mim_functional(dist: ClassDistribution, coeff: float) -> float:
    """ln sum_i p_i exp(coeff*(1-p_i)), the parametric importance score."""
    return float(logsumexp(np.log(dist.probs) + coeff * (1.0 - dist.probs)))


def nmim_functional(dist: ClassDistribution) -> float:
    """ln sum_i p_i exp((1-p_i)/p_i), the parameter-free importance score.

    Always >= n - 1, with equality only at the uniform distribution; the
    value is dominated by the smallest probability once it is small.
    """
    return float(logsumexp(np.log(dist.probs) + (1.0 - dist.probs) / dist.probs))


@dataclass(frozen=True)
class ImportanceFunctionals:
    """Bundle of the scalar functionals for one distribution."""

    gamma_p: float      # sum of squared probabilities
    mim_value: float    # parametric score at the given coefficient
    nmim_value: float   # parameter-free score
    renyi2: float       # order-2 Renyi entropy


def importance_functionals(dist: ClassDistribution, coeff: float) -> ImportanceFunctionals:
    return ImportanceFunctionals(
        gamma_p=collision_mass(dist),
        mim_value=mim_functional(dist, coeff),
        nmim_value=nmim_functional(dist),
        renyi2=renyi2_entropy(dist),
    )
