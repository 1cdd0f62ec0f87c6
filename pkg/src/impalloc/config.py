"""JSON experiment-config ingestion with field-addressed errors."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Union

from .errors import AllocError, ConfigError
from .importance import mim_weights, nmim_weights
from .model import (
    ClassDistribution,
    ImportanceWeights,
    PerClass,
    StorageConfig,
    SystemKind,
    Unbounded,
    Uniform,
    explicit_weights,
    make_config,
    validate_distribution,
)

__all__ = ["ExperimentConfig", "config_from_dict", "load_config"]


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    """One fully validated experiment: distribution, storage, weights, seed."""

    dist: ClassDistribution
    storage: StorageConfig
    weights: ImportanceWeights
    weights_spec: dict
    seed: Optional[int]
    raw: dict
    sha256: str

    def rebuild_weights(self, coeff: float) -> ImportanceWeights:
        """Weights at a different importance coefficient (parametric rule only)."""
        if self.weights_spec.get("kind") != "mim":
            raise ConfigError("weights.kind", "coefficient sweeps need the 'mim' rule")
        return mim_weights(self.dist, coeff)


def _require(doc: dict, field: str, types, choices=None):
    if field not in doc:
        raise ConfigError(field, "missing")
    value = doc[field]
    if not isinstance(value, types):
        raise ConfigError(field, f"expected {types}, got {type(value).__name__}")
    if choices is not None and value not in choices:
        raise ConfigError(field, f"expected one of {sorted(choices)}, got {value!r}")
    return value


def config_from_dict(doc: dict, *, sha256: str = "") -> ExperimentConfig:
    """Validate a config document into domain types.

    Raises
    ------
    ConfigError
        The message names the offending field.
    """
    if not isinstance(doc, dict):
        raise ConfigError("<root>", "config must be a JSON object")

    system = _require(doc, "system", str, {"general", "ideal", "quantification"})
    kind = SystemKind(system)

    radix = _require(doc, "radix", int)
    budget = _require(doc, "budget", (int, float))

    raw_len: Any = doc.get("original_length", "unbounded" if kind is SystemKind.QUANTIFICATION else None)
    if kind is SystemKind.QUANTIFICATION:
        if raw_len not in (None, "unbounded"):
            raise ConfigError("original_length", "quantification systems use 'unbounded'")
        lengths: Union[Uniform, PerClass, Unbounded] = Unbounded()
    elif kind is SystemKind.IDEAL:
        if not isinstance(raw_len, int):
            raise ConfigError("original_length", f"ideal systems need one integer, got {raw_len!r}")
        lengths = Uniform(raw_len)
    else:
        if not isinstance(raw_len, list) or not all(isinstance(x, int) for x in raw_len):
            raise ConfigError("original_length", f"general systems need a list of integers, got {raw_len!r}")
        lengths = PerClass(tuple(raw_len))

    probs = _require(doc, "distribution", list)
    try:
        dist = validate_distribution(probs)
    except AllocError as exc:
        raise ConfigError("distribution", str(exc)) from exc

    try:
        storage = make_config(radix, lengths, float(budget), kind)
    except AllocError as exc:
        raise ConfigError("radix/original_length/budget", str(exc)) from exc

    wspec = _require(doc, "weights", dict)
    wkind = wspec.get("kind")
    if wkind not in {"mim", "nmim", "explicit"}:
        raise ConfigError("weights.kind", f"expected mim, nmim, or explicit, got {wkind!r}")
    try:
        if wkind == "mim":
            if "varpi" not in wspec or not isinstance(wspec["varpi"], (int, float)):
                raise ConfigError("weights.varpi", "mim weights need a numeric 'varpi'")
            weights = mim_weights(dist, float(wspec["varpi"]))
        elif wkind == "nmim":
            weights = nmim_weights(dist)
        else:
            values = wspec.get("values")
            if not isinstance(values, list):
                raise ConfigError("weights.values", "explicit weights need a 'values' list")
            weights = explicit_weights(values)
            if len(values) != dist.n:
                raise ConfigError("weights.values", f"{len(values)} weights for {dist.n} classes")
    except ConfigError:
        raise
    except AllocError as exc:
        raise ConfigError("weights", str(exc)) from exc

    seed = doc.get("seed")
    if seed is not None and not isinstance(seed, int):
        raise ConfigError("seed", f"expected an integer, got {seed!r}")

    return ExperimentConfig(
        dist=dist,
        storage=storage,
        weights=weights,
        weights_spec=dict(wspec),
        seed=seed,
        raw=dict(doc),
        sha256=sha256 or hashlib.sha256(json.dumps(doc, sort_keys=True).encode()).hexdigest(),
    )


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """Read and validate a JSON config file."""
    data = Path(path).read_bytes()
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ConfigError("<root>", f"invalid JSON: {exc}") from exc
    return config_from_dict(doc, sha256=hashlib.sha256(data).hexdigest())
