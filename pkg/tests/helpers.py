"""Shared test utilities: random instances and stationarity measurement."""

import math

import numpy as np

from impalloc import (
    SystemKind,
    Uniform,
    explicit_weights,
    make_config,
    mim_weights,
    nmim_weights,
    validate_distribution,
)


def random_distribution(rng, n, p_floor=1e-4):
    """Dirichlet draw with a floor on the smallest probability."""
    while True:
        p = rng.dirichlet(np.ones(n))
        if p.min() >= p_floor:
            return validate_distribution(p)


def random_instance(rng, max_n=8, max_len=20, radices=(2, 10)):
    """One random shared-length problem: (dist, weights, config)."""
    n = int(rng.integers(1, max_n + 1))
    dist = random_distribution(rng, n)
    L = int(rng.integers(1, max_len + 1))
    r = int(rng.choice(radices))
    T = float(rng.random() * L)
    rule = int(rng.integers(0, 3))
    if rule == 0:
        weights = mim_weights(dist, float(rng.uniform(-40.0, 40.0)))
    elif rule == 1:
        weights = nmim_weights(dist)
    else:
        weights = explicit_weights(rng.random(n) + 1e-3)
    config = make_config(r, Uniform(L), T, SystemKind.IDEAL)
    return dist, weights, config


def interior_log_marginal_spread(plan, dist, weights, config):
    """Max deviation of the per-digit marginal value across interior classes.

    Returns None when fewer than two classes are interior. At an optimum the
    marginal value W_i r**-l_i / (1 - r**-L_i) is a constant of the plan, so
    the log-spread measures stationarity directly.
    """
    interior = list(plan.interior_set)
    if len(interior) < 2:
        return None
    caps = config.lengths_array(dist.n)
    ln_r = math.log(config.radix)
    tail = np.log1p(-np.exp(-caps[interior] * ln_r))
    logs = (
        np.asarray(weights.log_values)[interior]
        - plan.continuous_lengths[interior] * ln_r
        - tail
    )
    return float(np.max(logs) - np.min(logs))
