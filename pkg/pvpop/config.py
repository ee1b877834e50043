"""Scenario and run configuration.

Plain dataclasses with per-family defaults; YAML files and CLI flags are
validated into these before anything runs.
"""

from __future__ import annotations

import copy
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from pvpop.errors import ConfigError
from pvpop.kernels import DEFAULT_QUADRATURE_ORDER, MAX_SEED

DEFAULT_SEED = 2137
DEFAULT_ALPHA = 0.05

FAMILIES = (
    "binary-two-sample",
    "binary-one-sample",
    "normal-jeffreys",
    "normal-nig-vague",
    "normal-nig-informative",
    "normal-nonnormal",
    "mvn",
)

NONNORMAL_DISTRIBUTIONS = ("gamma", "beta", "mixture")
GAMMA_CONVENTIONS = ("shape-scale", "shape-rate")
BINOMIAL_TWO_SIDED = ("doubled", "minlike")

# θ ~ N(theta_mean, theta_var), ν ~ N(nu_mean, nu_var) truncated at zero
_NORMAL_GENERATOR = {
    "theta_mean": 0.0,
    "theta_var": 0.05,
    "nu_mean": 1.0,
    "nu_var": 0.05,
}

SCENARIO_DEFAULTS: dict[str, dict[str, Any]] = {
    "binary-two-sample": {
        "prior_E": [0.2, 0.8],
        "prior_S": [0.2, 0.8],
    },
    "binary-one-sample": {
        "p0": 0.2,
        "prior": [1.0, 1.0],
        "binomial_two_sided": "doubled",
    },
    "normal-jeffreys": dict(_NORMAL_GENERATOR),
    "normal-nig-vague": {
        **_NORMAL_GENERATOR,
        "theta0": 0.0,
        "nu0": 100.0,
        "alpha": 0.01,
        "beta": 0.01,
    },
    "normal-nig-informative": {
        **_NORMAL_GENERATOR,
        "theta0_offset": 0.01,
        "nu0": 0.01,
        "alpha": 0.01,
        "beta": 0.01,
    },
    "normal-nonnormal": {
        "distribution": "gamma",
        "gamma_shape": 2.0,
        "gamma_param": 0.5,
        "gamma_convention": "shape-scale",
        "beta_a": 0.5,
        "beta_b": 0.5,
        "mixture_means": [-1.0, 1.0],
        "mixture_var": 1.0,
        "recenter_low": 0.0,
        "recenter_high": 1.0,
    },
    "mvn": {
        "sigma": [[1.0, 0.3], [0.3, 1.0]],
        "mu_var": 0.05,
        "prior_scale": 1000.0,
        "n_contrasts": 2,
    },
}

_TOP_LEVEL_KEYS = ("family", "n", "reps", "seed", "params")


def _positive(params: dict, *keys: str) -> None:
    for key in keys:
        value = params[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key} must be a number, got {value!r}")
        if not (math.isfinite(value) and value > 0):
            raise ConfigError(f"{key} must be positive, got {value!r}")


def _finite(params: dict, *keys: str) -> None:
    for key in keys:
        value = params[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key} must be a number, got {value!r}")
        if not math.isfinite(value):
            raise ConfigError(f"{key} must be finite, got {value!r}")


def _beta_pair(params: dict, key: str) -> None:
    value = params[key]
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
        or not all(math.isfinite(v) and v > 0 for v in value)
    ):
        raise ConfigError(f"{key} must be a pair of positive numbers [a, b], got {value!r}")


def _choice(params: dict, key: str, options: tuple[str, ...]) -> None:
    if params[key] not in options:
        raise ConfigError(f"{key} must be one of {', '.join(options)}, got {params[key]!r}")


def _validate_params(family: str, params: dict) -> None:
    if family == "binary-two-sample":
        _beta_pair(params, "prior_E")
        _beta_pair(params, "prior_S")
    elif family == "binary-one-sample":
        _finite(params, "p0")
        if not 0.0 < params["p0"] < 1.0:
            raise ConfigError(f"p0 must lie in (0, 1), got {params['p0']!r}")
        _beta_pair(params, "prior")
        _choice(params, "binomial_two_sided", BINOMIAL_TWO_SIDED)
    elif family == "normal-nonnormal":
        _choice(params, "distribution", NONNORMAL_DISTRIBUTIONS)
        _choice(params, "gamma_convention", GAMMA_CONVENTIONS)
        _positive(params, "gamma_shape", "gamma_param", "beta_a", "beta_b", "mixture_var")
        _finite(params, "recenter_low", "recenter_high")
        if not params["recenter_low"] < params["recenter_high"]:
            raise ConfigError("recenter_low must be smaller than recenter_high")
        means = params["mixture_means"]
        if not isinstance(means, (list, tuple)) or len(means) < 1:
            raise ConfigError(f"mixture_means must be a non-empty list, got {means!r}")
        indexed = {f"mixture_means[{i}]": m for i, m in enumerate(means)}
        _finite(indexed, *indexed)
    elif family == "mvn":
        sigma = params["sigma"]
        if (
            not isinstance(sigma, (list, tuple))
            or not sigma
            or not all(isinstance(row, (list, tuple)) and len(row) == len(sigma) for row in sigma)
        ):
            raise ConfigError(f"sigma must be a square list-of-lists matrix, got {sigma!r}")
        try:
            matrix = np.asarray(sigma, dtype=float)
            np.linalg.cholesky(matrix)
        except (TypeError, ValueError, np.linalg.LinAlgError) as exc:
            raise ConfigError(f"sigma must be a positive-definite matrix: {exc}") from exc
        if not np.allclose(matrix, matrix.T, rtol=1e-12, atol=1e-12):
            raise ConfigError("sigma must be symmetric")
        _positive(params, "mu_var", "prior_scale")
        k = params["n_contrasts"]
        if isinstance(k, bool) or not isinstance(k, int) or not 1 <= k <= len(sigma):
            raise ConfigError(f"n_contrasts must be an integer in [1, {len(sigma)}], got {k!r}")
    if family.startswith("normal-") and family != "normal-nonnormal":
        _finite(params, "theta_mean", "nu_mean")
        _positive(params, "theta_var", "nu_var")
        if family == "normal-nig-vague":
            _finite(params, "theta0")
            _positive(params, "nu0", "alpha", "beta")
        elif family == "normal-nig-informative":
            _finite(params, "theta0_offset")
            _positive(params, "nu0", "alpha", "beta")


def _count(value, name: str, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ConfigError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return value


@dataclass(frozen=True)
class ScenarioSpec:
    """One simulation scenario: family, per-arm size, replications, seed and family parameters."""

    family: str
    n: int
    reps: int
    seed: int = DEFAULT_SEED
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown family {self.family!r}; expected one of {', '.join(FAMILIES)}")
        minimum_n = 0 if self.family == "binary-one-sample" else 1
        if self.family.startswith("normal-"):
            minimum_n = 2
        _count(self.n, "n", minimum_n)
        _count(self.reps, "reps", 1)
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed <= MAX_SEED:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        merged = copy.deepcopy(SCENARIO_DEFAULTS[self.family])
        unknown = sorted(set(self.params) - set(merged))
        if unknown:
            raise ConfigError(
                f"unknown parameter(s) for {self.family}: {', '.join(unknown)}"
            )
        merged.update(copy.deepcopy(dict(self.params)))
        _validate_params(self.family, merged)
        object.__setattr__(self, "params", merged)

    @classmethod
    def from_mapping(cls, mapping: dict) -> "ScenarioSpec":
        if not isinstance(mapping, dict):
            raise ConfigError(f"scenario must be a mapping, got {type(mapping).__name__}")
        unknown = sorted(set(mapping) - set(_TOP_LEVEL_KEYS))
        if unknown:
            raise ConfigError(f"unknown scenario key(s): {', '.join(unknown)}")
        for key in ("family", "n", "reps"):
            if key not in mapping:
                raise ConfigError(f"scenario is missing required key {key!r}")
        params = mapping.get("params") or {}
        if not isinstance(params, dict):
            raise ConfigError("params must be a mapping")
        return cls(
            family=mapping["family"],
            n=mapping["n"],
            reps=mapping["reps"],
            seed=mapping.get("seed", DEFAULT_SEED),
            params=params,
        )

    def replace(self, **changes) -> "ScenarioSpec":
        """Copy with top-level fields or (via ``params``) parameters overridden."""
        data = self.snapshot()
        params = dict(data["params"])
        params.update(changes.pop("params", {}))
        data.update(changes)
        data["params"] = params
        return ScenarioSpec.from_mapping(data)

    def snapshot(self) -> dict:
        return {
            "family": self.family,
            "n": self.n,
            "reps": self.reps,
            "seed": self.seed,
            "params": copy.deepcopy(self.params),
        }


def load_scenario_file(path: str | os.PathLike) -> ScenarioSpec:
    """Read a YAML scenario file (schema in README)."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file {path}: {exc}") from exc
    try:
        mapping = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from exc
    return ScenarioSpec.from_mapping(mapping or {})


def parse_override(text: str) -> tuple[str, Any]:
    """Parse a ``KEY=VALUE`` override; the value is read as YAML (numbers, lists, strings)."""
    key, sep, raw = text.partition("=")
    key = key.strip()
    if not sep or not key:
        raise ConfigError(f"override must look like KEY=VALUE, got {text!r}")
    try:
        value = yaml.safe_load(raw)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse value of {key}: {exc}") from exc
    return key, value


@dataclass
class RunConfig:
    """Cross-cutting settings shared by every subcommand."""

    seed: int = DEFAULT_SEED
    alpha: float = DEFAULT_ALPHA
    quadrature_order: int = DEFAULT_QUADRATURE_ORDER
    n_workers: int = 1
    conventions: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed <= MAX_SEED:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        _count(self.quadrature_order, "quadrature_order", 2)
        _count(self.n_workers, "n_workers", 0)

    def snapshot(self) -> dict:
        """Return a YAML-serialisable snapshot."""
        return {
            "seed": self.seed,
            "alpha": self.alpha,
            "quadrature_order": self.quadrature_order,
            "n_workers": self.n_workers,
            "conventions": copy.deepcopy(self.conventions),
        }
