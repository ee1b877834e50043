"""Exact operating characteristics of two-arm binary trial designs.

Type I error and power are double sums over every outcome pair
(y_E, y_S) in {0..n}², weighted by binomial probabilities, of a rejection
indicator. The frequentist indicator is Z > z_α; the Bayesian one is
Pr(p_E > p_S | y_E, y_S) > η.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from pvpop.binary import (
    DEFAULT_TWO_SAMPLE_PRIOR,
    BetaParams,
    beta_posterior,
    quantile_nodes,
    transform_second_arm,
    transformed_superiority,
)
from pvpop.errors import DomainError, NumericError
from pvpop.kernels import (
    DEFAULT_QUADRATURE_ORDER,
    binomial_pmf,
    gauss_legendre,
    std_normal_quantile,
)
from pvpop.worker import BatchWorker

logger = logging.getLogger(__name__)

RULES = ("frequentist", "bayesian")
DEFAULT_ETA_STEP = 1e-4
GRID_STEP = 0.01
ENUMERATION_TOLERANCE = 1e-10

_STRIPE_ROWS = 8


def _check_open_probability(value: float, name: str) -> None:
    if not (isinstance(value, (int, float)) and 0.0 < value < 1.0):
        raise DomainError(f"{name} must lie in (0, 1), got {value!r}")


def sample_size(alpha: float, target_power: float, p_S: float, p_E_alt: float) -> int:
    """Per-arm n = (z_α + z_β)² / δ² · {p_E(1-p_E) + p_S(1-p_S)}, rounded up."""
    _check_open_probability(alpha, "alpha")
    _check_open_probability(target_power, "target_power")
    _check_open_probability(p_S, "p_S")
    _check_open_probability(p_E_alt, "p_E_alt")
    delta = p_E_alt - p_S
    if delta == 0.0:
        raise DomainError("p_E_alt must differ from p_S")
    z_alpha = std_normal_quantile(1.0 - alpha)
    z_beta = std_normal_quantile(target_power)
    variance = p_E_alt * (1.0 - p_E_alt) + p_S * (1.0 - p_S)
    raw = (z_alpha + z_beta) ** 2 / delta**2 * variance
    # absorb rounding noise so an exact integer is not bumped up
    return max(1, math.ceil(raw - 1e-9))


@dataclass(frozen=True)
class DesignSpec:
    """Trial design; ``n`` defaults to :func:`sample_size`, ``eta`` to 1 - alpha."""

    alpha: float
    target_power: float
    p_S: float
    p_E_alt: float
    n: int | None = None
    priors: tuple[BetaParams, BetaParams] = (DEFAULT_TWO_SAMPLE_PRIOR, DEFAULT_TWO_SAMPLE_PRIOR)
    eta: float | None = None
    quadrature_order: int = DEFAULT_QUADRATURE_ORDER

    def __post_init__(self):
        _check_open_probability(self.alpha, "alpha")
        _check_open_probability(self.target_power, "target_power")
        _check_open_probability(self.p_S, "p_S")
        _check_open_probability(self.p_E_alt, "p_E_alt")
        if not self.p_S < self.p_E_alt:
            raise DomainError(f"need p_S < p_E_alt, got {self.p_S} and {self.p_E_alt}")
        if self.n is None:
            object.__setattr__(
                self, "n", sample_size(self.alpha, self.target_power, self.p_S, self.p_E_alt)
            )
        elif isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n!r}")
        if self.eta is None:
            object.__setattr__(self, "eta", 1.0 - self.alpha)
        else:
            _check_open_probability(self.eta, "eta")
        if len(self.priors) != 2 or not all(isinstance(p, BetaParams) for p in self.priors):
            raise DomainError("priors must be a pair of BetaParams (experimental, standard)")

    @property
    def delta(self) -> float:
        return self.p_E_alt - self.p_S


@dataclass(frozen=True)
class ErrorRates:
    type1: float
    type2: float
    power: float = field(init=False)

    def __post_init__(self):
        for name in ("type1", "type2"):
            value = getattr(self, name)
            if not (0.0 <= value <= 1.0):
                raise NumericError(f"{name} = {value!r} is not a probability")
        object.__setattr__(self, "power", 1.0 - self.type2)


@dataclass(frozen=True)
class Calibration:
    """Result of :func:`calibrate_eta`: the chosen η and the exact type I error it attains."""

    eta: float
    achieved_type1: float
    target_type1: float
    step: float


# ---------------------------------------------------------------------------
# Outcome-pair matrices
# ---------------------------------------------------------------------------


def _superiority_stripe(task) -> np.ndarray:
    """Rows of Pr(X_i > Y_j) for X_i ~ Beta(a_i, b_i), integrating over the Y quantiles."""
    row_a, row_b, col_a, col_b, order = task
    rule = gauss_legendre(order)
    cols = [BetaParams(a, b) for a, b in zip(col_a, col_b)]
    q, qc, weights = quantile_nodes(cols, rule)
    return transformed_superiority(np.asarray(row_a), np.asarray(row_b), q, qc, weights)


def _pairwise_superiority(rows_a, rows_b, cols_a, cols_b, order: int, n_workers: int) -> np.ndarray:
    tasks = [
        (rows_a[i : i + _STRIPE_ROWS], rows_b[i : i + _STRIPE_ROWS], cols_a, cols_b, order)
        for i in range(0, len(rows_a), _STRIPE_ROWS)
    ]
    stripes = BatchWorker(_superiority_stripe, tasks, n_workers).run()
    return np.vstack(stripes)


@lru_cache(maxsize=8)
def _superiority_matrix(
    n: int, prior_E: BetaParams, prior_S: BetaParams, order: int, n_workers: int
) -> np.ndarray:
    counts = range(n + 1)
    post_E = [beta_posterior(prior_E, y, n) for y in counts]
    post_S = [beta_posterior(prior_S, y, n) for y in counts]
    aE = np.array([p.a for p in post_E])
    bE = np.array([p.b for p in post_E])
    aS = np.array([p.a for p in post_S])
    bS = np.array([p.b for p in post_S])

    logger.info("evaluating posterior superiority for %d outcome pairs", (n + 1) ** 2)
    over_S = _pairwise_superiority(aE, bE, aS, bS, order, n_workers)
    if prior_E == prior_S:
        over_E = over_S
    else:
        over_E = _pairwise_superiority(aS, bS, aE, bE, order, n_workers)

    use_S = transform_second_arm(aE[:, None], bE[:, None], aS[None, :], bS[None, :])
    matrix = np.where(use_S, over_S, 1.0 - over_E.T)
    matrix.setflags(write=False)
    return matrix


def posterior_superiority_matrix(
    n: int,
    priors: tuple[BetaParams, BetaParams] = (DEFAULT_TWO_SAMPLE_PRIOR, DEFAULT_TWO_SAMPLE_PRIOR),
    quadrature_order: int = DEFAULT_QUADRATURE_ORDER,
    n_workers: int = 1,
) -> np.ndarray:
    """(n+1)×(n+1) read-only matrix of Pr(p_E > p_S | y_E, y_S), indexed [y_E, y_S].

    Cached per (n, priors, order) since every error sum for a design reuses it.
    """
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    return _superiority_matrix(int(n), priors[0], priors[1], int(quadrature_order), n_workers)


def z_matrix(n: int) -> np.ndarray:
    """Two-sample Z for every (y_E, y_S), with 0 for degenerate pairs and ±inf for unequal extremes."""
    p = np.arange(n + 1) / n
    p_e = p[:, None]
    p_s = p[None, :]
    diff = p_e - p_s
    variance = (p_e * (1.0 - p_e) + p_s * (1.0 - p_s)) / n
    with np.errstate(divide="ignore", invalid="ignore"):
        z = diff / np.sqrt(variance)
        z = np.where(variance > 0.0, z, np.sign(diff) * np.inf)
    return np.where((variance <= 0.0) & (diff == 0.0), 0.0, z)


def rejection_region(design: DesignSpec, rule: str, n_workers: int = 1) -> np.ndarray:
    """Boolean (n+1)×(n+1) matrix, True where the rule declares superiority."""
    if rule == "frequentist":
        return z_matrix(design.n) > std_normal_quantile(1.0 - design.alpha)
    if rule == "bayesian":
        matrix = posterior_superiority_matrix(
            design.n, design.priors, design.quadrature_order, n_workers
        )
        return matrix > design.eta
    raise DomainError(f"rule must be one of {', '.join(RULES)}, got {rule!r}")


def _outcome_weights(n: int, p_E: float, p_S: float) -> np.ndarray:
    y = np.arange(n + 1)
    weights = np.outer(binomial_pmf(y, n, p_E), binomial_pmf(y, n, p_S))
    total = math.fsum(weights.ravel())
    if abs(total - 1.0) > ENUMERATION_TOLERANCE:
        raise NumericError(
            f"outcome probabilities sum to {total!r} for n={n}, p_E={p_E}, p_S={p_S}"
        )
    return weights


def rejection_probability(region: np.ndarray, p_E: float, p_S: float) -> float:
    """Σ P(y_E | p_E) P(y_S | p_S) over the region, summed exactly."""
    n = region.shape[0] - 1
    weights = _outcome_weights(n, p_E, p_S)
    return min(1.0, math.fsum(weights[region]))


def exact_error_rates(design: DesignSpec, rule: str, n_workers: int = 1) -> ErrorRates:
    region = rejection_region(design, rule, n_workers)
    logger.info("enumerating %s error rates at n=%d", rule, design.n)
    type1 = rejection_probability(region, design.p_S, design.p_S)
    power = rejection_probability(region, design.p_E_alt, design.p_S)
    return ErrorRates(type1=type1, type2=max(0.0, 1.0 - power))


def default_grid(design: DesignSpec) -> list[float]:
    """p_S, p_S + 0.01, ..., p_S + 2δ (kept below 1)."""
    steps = int(round(2.0 * design.delta / GRID_STEP))
    grid = [round(design.p_S + k * GRID_STEP, 10) for k in range(steps + 1)]
    return [p for p in grid if p < 1.0]


def power_curve(
    design: DesignSpec, rule: str, grid=None, n_workers: int = 1
) -> list[tuple[float, float]]:
    """Rejection probability at each alternative p_E in ``grid``; at p_E = p_S this is type I error."""
    grid = default_grid(design) if grid is None else list(grid)
    for p in grid:
        if not (0.0 <= p <= 1.0):
            raise DomainError(f"grid values must lie in [0, 1], got {p!r}")
    region = rejection_region(design, rule, n_workers)
    return [(p, rejection_probability(region, p, design.p_S)) for p in grid]


def calibrate_eta(
    design: DesignSpec,
    target_type1: float | None = None,
    step: float = DEFAULT_ETA_STEP,
    n_workers: int = 1,
) -> Calibration:
    """Smallest η on the grid {step, 2·step, ...} whose exact Bayesian type I error <= target.

    The outcome space is discrete, so the attained level is generally below
    the target; it is reported alongside η.
    """
    target = design.alpha if target_type1 is None else target_type1
    _check_open_probability(target, "target_type1")
    if not (0.0 < step < 1.0):
        raise DomainError(f"step must lie in (0, 1), got {step!r}")

    matrix = posterior_superiority_matrix(
        design.n, design.priors, design.quadrature_order, n_workers
    )
    weights = _outcome_weights(design.n, design.p_S, design.p_S).ravel()
    values = matrix.ravel()
    order = np.argsort(values, kind="stable")
    sorted_values = values[order]
    # tail[k] = null mass of the k largest posterior probabilities
    tail = np.concatenate(([0.0], np.cumsum(weights[order][::-1])))

    n_steps = int(round(1.0 / step))
    grid = np.arange(1, n_steps) * step
    above = len(values) - np.searchsorted(sorted_values, grid, side="right")
    feasible = np.flatnonzero(tail[above] <= target + ENUMERATION_TOLERANCE)
    if feasible.size == 0:
        raise NumericError(f"no η on the grid keeps type I error <= {target}")

    # confirm with the exact sum, stepping up if cumulative rounding misjudged the boundary
    for index in feasible:
        eta = round(float(grid[index]), 12)
        achieved = rejection_probability(matrix > eta, design.p_S, design.p_S)
        if achieved <= target:
            logger.info("calibrated eta=%g (type I %.6g, target %g)", eta, achieved, target)
            return Calibration(eta=eta, achieved_type1=achieved, target_type1=target, step=step)
    raise NumericError(f"no η on the grid keeps type I error <= {target}")


def oc_table(design: DesignSpec, grid=None, n_workers: int = 1) -> list[dict]:
    """Rows of (p_E, rule, type1_or_power), frequentist first, then Bayesian."""
    rows = []
    for rule in RULES:
        for p_E, value in power_curve(design, rule, grid, n_workers):
            rows.append({"p_E": p_E, "rule": rule, "type1_or_power": value})
    return rows
