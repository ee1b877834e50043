"""Frequentist and Bayesian tests for one- and two-sample binomial data."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betaincinv

from pvpop.errors import DegenerateDataError, DomainError, InvariantViolation, NumericError
from pvpop.kernels import (
    QuadratureRule,
    _incbeta,
    binomial_lower_tail,
    binomial_pmf,
    binomial_upper_tail,
    gauss_legendre,
    regularized_incomplete_beta,
    std_normal_cdf,
    std_normal_quantile,
)

TWO_SIDED_CONVENTIONS = ("doubled", "minlike")
_MINLIKE_RELATIVE_TOL = 1e-7


def _check_count(value, name: str, upper: int | None = None) -> None:
    if int(value) != value or value < 0:
        raise DomainError(f"{name} must be a non-negative integer, got {value!r}")
    if upper is not None and value > upper:
        raise DomainError(f"{name} must not exceed n={upper}, got {value!r}")


@dataclass(frozen=True)
class BetaParams:
    """Beta(a, b) prior or posterior."""

    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise DomainError(f"Beta parameters must be finite, got ({self.a}, {self.b})")
        if self.a <= 0.0 or self.b <= 0.0:
            raise DomainError(f"Beta parameters must be positive, got ({self.a}, {self.b})")

    def cdf(self, x):
        return regularized_incomplete_beta(self.a, self.b, x)


@dataclass(frozen=True)
class TwoArmBinomialData:
    """Responders out of ``n`` per arm, experimental (E) and standard (S)."""

    n: int
    y_E: int
    y_S: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n!r}")
        _check_count(self.y_E, "y_E", self.n)
        _check_count(self.y_S, "y_S", self.n)

    @property
    def p_hat_E(self) -> float:
        return self.y_E / self.n

    @property
    def p_hat_S(self) -> float:
        return self.y_S / self.n

    def swapped(self) -> "TwoArmBinomialData":
        return TwoArmBinomialData(self.n, self.y_S, self.y_E)


@dataclass(frozen=True)
class OneArmBinomialData:
    """Responders out of ``n`` in a single arm, tested against reference rate p0."""

    n: int
    y_E: int
    p0: float

    def __post_init__(self):
        _check_count(self.n, "n")
        _check_count(self.y_E, "y_E", self.n)
        if not (0.0 < self.p0 < 1.0):
            raise DomainError(f"p0 must lie in (0, 1), got {self.p0!r}")


@dataclass(frozen=True)
class TestReport:
    """Paired frequentist and Bayesian summaries for one dataset.

    ``statistic`` is None for exact tests.
    """

    __test__ = False

    statistic: float | None
    p_one: float
    p_two: float
    pop_one: float
    pop_two: float

    def __post_init__(self):
        for name in ("p_one", "p_two", "pop_one", "pop_two"):
            value = getattr(self, name)
            if not (0.0 <= value <= 1.0):
                raise InvariantViolation(f"{name} = {value!r} is not a probability")

    def as_row(self) -> dict[str, float | None]:
        return {
            "statistic": self.statistic,
            "p_one": self.p_one,
            "p_two": self.p_two,
            "pop_one": self.pop_one,
            "pop_two": self.pop_two,
        }


DEFAULT_TWO_SAMPLE_PRIOR = BetaParams(0.2, 0.8)
DEFAULT_ONE_SAMPLE_PRIOR = BetaParams(1.0, 1.0)


# ---------------------------------------------------------------------------
# Frequentist side
# ---------------------------------------------------------------------------


def is_degenerate(data: TwoArmBinomialData) -> bool:
    """True when both sample proportions are the same value in {0, 1}."""
    return data.y_E == data.y_S and data.y_E in (0, data.n)


def two_sample_z(data: TwoArmBinomialData, *, strict: bool = False) -> float:
    """Unpooled two-proportion Z statistic.

    Degenerate data (equal proportions both 0 or both 1) give Z = 0 unless
    ``strict`` is set, in which case DegenerateDataError is raised. Unequal
    proportions with zero variance give Z = ±inf.
    """
    p_e, p_s = data.p_hat_E, data.p_hat_S
    numerator = p_e - p_s
    variance = (p_e * (1.0 - p_e) + p_s * (1.0 - p_s)) / data.n
    if variance <= 0.0:
        if numerator == 0.0:
            if strict:
                raise DegenerateDataError(
                    f"Z undefined for y_E = y_S = {data.y_E} with n = {data.n}"
                )
            return 0.0
        return math.copysign(math.inf, numerator)
    return numerator / math.sqrt(variance)


def p_one_sided(z: float) -> float:
    """Upper-tail p-value 1 - Φ(z)."""
    if math.isnan(z):
        raise DomainError("z must not be NaN")
    if math.isinf(z):
        return 0.0 if z > 0 else 1.0
    return std_normal_cdf(-z)


def p_two_sided(z: float) -> float:
    """Two-sided p-value 2 - 2Φ(|z|)."""
    if math.isnan(z):
        raise DomainError("z must not be NaN")
    if math.isinf(z):
        return 0.0
    return min(1.0, 2.0 * std_normal_cdf(-abs(z)))


def z_rejects(z: float, alpha: float) -> bool:
    """One-sided Z-test decision: reject when Z > z_alpha."""
    return z > std_normal_quantile(1.0 - alpha)


def exact_binomial_p_one(data: OneArmBinomialData) -> float:
    """Exact binomial p-value Pr(Y >= y_E | p0) for H1: p_E > p0."""
    return binomial_upper_tail(data.y_E, data.n, data.p0)


def exact_binomial_p_two(data: OneArmBinomialData, convention: str = "doubled") -> float:
    """Two-sided exact binomial p-value.

    ``doubled``: 2 * min(upper tail, lower tail), capped at 1.
    ``minlike``: total mass of outcomes no more likely than the observed one.
    """
    if convention == "doubled":
        upper = binomial_upper_tail(data.y_E, data.n, data.p0)
        lower = binomial_lower_tail(data.y_E, data.n, data.p0)
        return min(1.0, 2.0 * min(upper, lower))
    if convention == "minlike":
        pmf = np.atleast_1d(binomial_pmf(np.arange(data.n + 1), data.n, data.p0))
        observed = pmf[data.y_E]
        as_extreme = pmf[pmf <= observed * (1.0 + _MINLIKE_RELATIVE_TOL)]
        return min(1.0, math.fsum(as_extreme))
    raise DomainError(
        f"unknown two-sided convention {convention!r}; expected one of {TWO_SIDED_CONVENTIONS}"
    )


# ---------------------------------------------------------------------------
# Bayesian side
# ---------------------------------------------------------------------------


def beta_posterior(prior: BetaParams, y: int, n: int) -> BetaParams:
    """Conjugate update Beta(a + y, b + n - y)."""
    _check_count(n, "n")
    _check_count(y, "y", n)
    return BetaParams(prior.a + y, prior.b + n - y)


def pop_two_from_one(pop_one: float) -> float:
    """2[1 - max{Pr(H0), Pr(H1)}] for a null with zero posterior point mass."""
    return min(1.0, 2.0 * min(pop_one, 1.0 - pop_one))


def quantile_nodes(posts: list[BetaParams], rule: QuadratureRule):
    """Beta quantiles (and their complements) of each posterior at the rule's nodes."""
    u, uc, weights = rule.normal_scale()
    a = np.array([p.a for p in posts])[:, None]
    b = np.array([p.b for p in posts])[:, None]
    q = betaincinv(a, b, u[None, :])
    qc = betaincinv(b, a, uc[None, :])
    if not (np.all(np.isfinite(q)) and np.all(np.isfinite(qc))):
        raise NumericError("Beta quantile evaluation failed at quadrature nodes")
    return q, qc, weights


def transformed_superiority(a, b, q, qc, weights) -> np.ndarray:
    """∫ Pr(X > Q_B(u)) du for X ~ Beta(a, b), one value per quantile row of B.

    ``q``/``qc`` hold the quantiles of each B at the rule's nodes on (0, 1),
    shape ``(k, order)``. Scalar ``a``/``b`` give shape ``(k,)``; 1-D arrays
    of length r give ``(r, k)``. The survival function of X is evaluated as
    I_{1-x}(b, a).
    """
    a = np.asarray(a, dtype=float)[..., None, None]
    b = np.asarray(b, dtype=float)[..., None, None]
    survival = _incbeta(b, a, qc, q)
    return np.clip(survival @ weights, 0.0, 1.0)


def _beta_variance(a, b):
    total = np.add(a, b)
    return np.multiply(a, b) / (total * total * (total + 1.0))


def transform_second_arm(aE, bE, aS, bS):
    """Whether to integrate over the quantiles of the S posterior rather than E.

    The outer integral runs over the narrower posterior, so the inner
    survival function changes slowly on the normal scale. Broadcasts.
    """
    return _beta_variance(aS, bS) <= _beta_variance(aE, bE)


def prob_pE_greater_pS(
    postE: BetaParams, postS: BetaParams, rule: QuadratureRule | None = None
) -> float:
    """Pr(p_E > p_S) for independent Beta posteriors.

    The outer integral over p_S is taken after substituting u = F_S(p_S),
    i.e. ∫₀¹ [1 - I_{Q_S(u)}(postE)] du, which leaves a bounded integrand even
    when a Beta density is singular at an endpoint. The u integral is then
    taken on the normal scale, u = Φ(t), over the narrower of the two
    posteriors (E and S trade places when E is narrower).
    """
    rule = rule or gauss_legendre()
    if transform_second_arm(postE.a, postE.b, postS.a, postS.b):
        q, qc, weights = quantile_nodes([postS], rule)
        return float(transformed_superiority(postE.a, postE.b, q, qc, weights)[0])
    q, qc, weights = quantile_nodes([postE], rule)
    return float(1.0 - transformed_superiority(postS.a, postS.b, q, qc, weights)[0])


def _posteriors(
    data: TwoArmBinomialData, priors: tuple[BetaParams, BetaParams]
) -> tuple[BetaParams, BetaParams]:
    prior_e, prior_s = priors
    return (
        beta_posterior(prior_e, data.y_E, data.n),
        beta_posterior(prior_s, data.y_S, data.n),
    )


def pop_one_two_sample(
    data: TwoArmBinomialData,
    priors: tuple[BetaParams, BetaParams] = (DEFAULT_TWO_SAMPLE_PRIOR, DEFAULT_TWO_SAMPLE_PRIOR),
    rule: QuadratureRule | None = None,
) -> float:
    """PoP₁ = Pr(p_E <= p_S | y_E, y_S)."""
    return 1.0 - prob_pE_greater_pS(*_posteriors(data, priors), rule)


def pop_two_two_sample(
    data: TwoArmBinomialData,
    priors: tuple[BetaParams, BetaParams] = (DEFAULT_TWO_SAMPLE_PRIOR, DEFAULT_TWO_SAMPLE_PRIOR),
    rule: QuadratureRule | None = None,
) -> float:
    """PoP₂ = 2·min{Pr(p_E > p_S), Pr(p_E < p_S)}."""
    return pop_two_from_one(pop_one_two_sample(data, priors, rule))


def bayes_superiority(
    data: TwoArmBinomialData,
    eta: float,
    priors: tuple[BetaParams, BetaParams] = (DEFAULT_TWO_SAMPLE_PRIOR, DEFAULT_TWO_SAMPLE_PRIOR),
    rule: QuadratureRule | None = None,
) -> bool:
    """Bayesian decision: declare superiority when Pr(p_E > p_S | data) > eta."""
    return prob_pE_greater_pS(*_posteriors(data, priors), rule) > eta


def bayes_clt_pop_one(data: TwoArmBinomialData) -> float:
    """Large-sample normal approximation Φ(-Z) to PoP₁."""
    return p_one_sided(two_sample_z(data))


def pop_one_sample(
    data: OneArmBinomialData, prior: BetaParams = DEFAULT_ONE_SAMPLE_PRIOR
) -> tuple[float, float]:
    """(PoP₁, PoP₂) for H0: p_E <= p0 under a Beta prior."""
    post = beta_posterior(prior, data.y_E, data.n)
    pop_one = post.cdf(data.p0)
    return pop_one, pop_two_from_one(pop_one)


def prob_pE_greater_p0(
    data: OneArmBinomialData, prior: BetaParams = DEFAULT_ONE_SAMPLE_PRIOR
) -> float:
    """Pr(p_E > p0 | y_E), the single-arm promise probability."""
    return 1.0 - pop_one_sample(data, prior)[0]


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


def two_sample_report(
    data: TwoArmBinomialData,
    priors: tuple[BetaParams, BetaParams] = (DEFAULT_TWO_SAMPLE_PRIOR, DEFAULT_TWO_SAMPLE_PRIOR),
    rule: QuadratureRule | None = None,
) -> TestReport:
    z = two_sample_z(data)
    pop_one = pop_one_two_sample(data, priors, rule)
    return TestReport(
        statistic=z,
        p_one=p_one_sided(z),
        p_two=p_two_sided(z),
        pop_one=pop_one,
        pop_two=pop_two_from_one(pop_one),
    )


def one_sample_report(
    data: OneArmBinomialData,
    prior: BetaParams = DEFAULT_ONE_SAMPLE_PRIOR,
    convention: str = "doubled",
) -> TestReport:
    pop_one, pop_two = pop_one_sample(data, prior)
    return TestReport(
        statistic=None,
        p_one=exact_binomial_p_one(data),
        p_two=exact_binomial_p_two(data, convention),
        pop_one=pop_one,
        pop_two=pop_two,
    )
