"""Paired normal data: known-variance Z test, Student t test and their Bayesian counterparts.

Differences x_i = y_Ei - y_Si are modelled as N(θ, ν). The known-variance
case fixes ν = 2 (unit variance per arm).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from pvpop.binary import TestReport, p_one_sided, p_two_sided, pop_two_from_one
from pvpop.errors import DegenerateDataError, DomainError
from pvpop.kernels import Sampler, std_normal_cdf, student_t_cdf

KNOWN_DIFFERENCE_VARIANCE = 2.0


@dataclass(frozen=True)
class PairedNormalData:
    """Summary of paired differences: size, sample mean and sum of squared deviations."""

    n: int
    theta_hat: float
    ssd: float
    x: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n!r}")
        if not math.isfinite(self.theta_hat):
            raise DomainError(f"theta_hat must be finite, got {self.theta_hat!r}")
        if not (math.isfinite(self.ssd) and self.ssd >= 0.0):
            raise DomainError(f"ssd must be finite and non-negative, got {self.ssd!r}")

    @classmethod
    def from_values(cls, x) -> "PairedNormalData":
        """Summarise raw differences.

        The mean is taken first and the squared deviations are corrected by
        the residual sum (two-pass), which keeps ssd accurate for large n.
        """
        arr = np.asarray(x, dtype=float).ravel()
        if arr.size == 0:
            raise DomainError("at least one difference is required")
        if not np.all(np.isfinite(arr)):
            raise DomainError("differences must be finite")
        n = int(arr.size)
        theta_hat = float(np.mean(arr))
        dev = arr - theta_hat
        ssd = float(np.dot(dev, dev) - np.sum(dev) ** 2 / n)
        arr.setflags(write=False)
        return cls(n=n, theta_hat=theta_hat, ssd=max(ssd, 0.0), x=arr)

    @classmethod
    def from_arms(cls, y_E, y_S) -> "PairedNormalData":
        e = np.asarray(y_E, dtype=float).ravel()
        s = np.asarray(y_S, dtype=float).ravel()
        if e.shape != s.shape:
            raise DomainError(
                f"paired arms must have equal length, got {e.size} and {s.size}"
            )
        return cls.from_values(e - s)

    @classmethod
    def from_summary(cls, n: int, theta_hat: float, ssd: float = 0.0) -> "PairedNormalData":
        return cls(n=n, theta_hat=float(theta_hat), ssd=float(ssd))


@dataclass(frozen=True)
class NormalInvChiSqParams:
    """N-Inv-χ²(location, kappa, df, scale2): ν ~ Scaled-Inv-χ²(df, scale2), θ|ν ~ N(location, ν/kappa)."""

    location: float
    kappa: float
    df: float
    scale2: float

    def __post_init__(self):
        if not math.isfinite(self.location):
            raise DomainError(f"location must be finite, got {self.location!r}")
        for name in ("kappa", "df", "scale2"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise DomainError(f"{name} must be positive, got {value!r}")

    def marginal_t(self) -> tuple[float, float, float]:
        """(df, location, scale) of the Student-t marginal of θ."""
        return self.df, self.location, math.sqrt(self.scale2 / self.kappa)


@dataclass(frozen=True)
class NigParams:
    """Normal-inverse-gamma: ν ~ Inv-Gamma(alpha, beta), θ|ν ~ N(theta0, ν/nu0)."""

    theta0: float
    nu0: float
    alpha: float
    beta: float

    def __post_init__(self):
        if not math.isfinite(self.theta0):
            raise DomainError(f"theta0 must be finite, got {self.theta0!r}")
        for name in ("nu0", "alpha", "beta"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise DomainError(f"{name} must be positive, got {value!r}")

    def marginal_t(self) -> tuple[float, float, float]:
        return 2.0 * self.alpha, self.theta0, math.sqrt(self.beta / (self.alpha * self.nu0))


DEFAULT_NIG_PRIOR = NigParams(theta0=0.0, nu0=100.0, alpha=0.01, beta=0.01)


# ---------------------------------------------------------------------------
# Known variance
# ---------------------------------------------------------------------------


def z_known_var(theta_hat: float, n: int) -> float:
    """θ̂ / sqrt(2 / n)."""
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    if not math.isfinite(theta_hat):
        raise DomainError(f"theta_hat must be finite, got {theta_hat!r}")
    return theta_hat * math.sqrt(n / KNOWN_DIFFERENCE_VARIANCE)


def pop_known_var_flat_prior(theta_hat: float, n: int) -> tuple[float, float]:
    """(PoP₁, PoP₂) under a flat prior, where θ | D ~ N(θ̂, 2/n).

    Pr(θ <= 0 | D) = Φ(-θ̂ sqrt(n/2)) is evaluated through the same Z as the
    frequentist test, so both sides agree exactly.
    """
    z = z_known_var(theta_hat, n)
    pop_one = std_normal_cdf(-z)
    return pop_one, p_two_sided(z)


def known_var_report(theta_hat: float, n: int) -> TestReport:
    z = z_known_var(theta_hat, n)
    pop_one, pop_two = pop_known_var_flat_prior(theta_hat, n)
    return TestReport(
        statistic=z,
        p_one=p_one_sided(z),
        p_two=p_two_sided(z),
        pop_one=pop_one,
        pop_two=pop_two,
    )


# ---------------------------------------------------------------------------
# Unknown variance
# ---------------------------------------------------------------------------


def t_statistic(data: PairedNormalData) -> float:
    """T = θ̂ / sqrt(ssd / ((n - 1) n))."""
    if data.n < 2:
        raise DomainError(f"the t statistic needs n >= 2, got n={data.n}")
    if data.ssd <= 0.0:
        raise DegenerateDataError("all differences are equal; the t statistic is undefined")
    return data.theta_hat / math.sqrt(data.ssd / ((data.n - 1) * data.n))


def t_p_values(t: float, df: float) -> tuple[float, float]:
    """(one-sided, two-sided) p-values for a t statistic."""
    p_one = student_t_cdf(-t, df)
    p_two = min(1.0, 2.0 * student_t_cdf(-abs(t), df))
    return p_one, p_two


def jeffreys_posterior(data: PairedNormalData) -> NormalInvChiSqParams:
    """Posterior under p(θ, ν) ∝ ν^(-3/2): N-Inv-χ²(θ̂, n, n, ssd/n)."""
    if data.ssd <= 0.0:
        raise DegenerateDataError("all differences are equal; the posterior is improper")
    return NormalInvChiSqParams(
        location=data.theta_hat, kappa=data.n, df=data.n, scale2=data.ssd / data.n
    )


def nig_posterior(prior: NigParams, data: PairedNormalData | None) -> NigParams:
    """Conjugate normal-inverse-gamma update. ``None`` data returns the prior."""
    if data is None:
        return prior
    n = data.n
    nu_n = prior.nu0 + n
    shrink = n * prior.nu0 / nu_n
    return NigParams(
        theta0=(prior.theta0 * prior.nu0 + n * data.theta_hat) / nu_n,
        nu0=nu_n,
        alpha=prior.alpha + n / 2.0,
        beta=prior.beta + data.ssd / 2.0 + shrink * (data.theta_hat - prior.theta0) ** 2 / 2.0,
    )


def pop_theta_leq_zero(posterior: NormalInvChiSqParams | NigParams) -> float:
    """PoP₁ = Pr(θ <= 0 | D) from the Student-t marginal of θ."""
    if not isinstance(posterior, (NormalInvChiSqParams, NigParams)):
        raise DomainError(f"unsupported posterior type {type(posterior).__name__}")
    df, location, scale = posterior.marginal_t()
    return student_t_cdf(-location / scale, df)


def sample_posterior(
    posterior: NormalInvChiSqParams | NigParams, size: int, sampler: Sampler
) -> tuple[np.ndarray, np.ndarray]:
    """Joint draws (θ, ν) from a conjugate posterior: ν from its marginal, then θ | ν."""
    if isinstance(posterior, NormalInvChiSqParams):
        chi2 = sampler.gamma(posterior.df / 2.0, 2.0, size)
        nu = posterior.df * posterior.scale2 / chi2
        location, precision = posterior.location, posterior.kappa
    elif isinstance(posterior, NigParams):
        nu = posterior.beta / sampler.gamma(posterior.alpha, 1.0, size)
        location, precision = posterior.theta0, posterior.nu0
    else:
        raise DomainError(f"unsupported posterior type {type(posterior).__name__}")
    theta = location + np.sqrt(nu / precision) * sampler.normal(0.0, 1.0, size)
    return theta, nu


def t_test_report(data: PairedNormalData, prior: str | NigParams = "jeffreys") -> TestReport:
    """Student t test next to PoP under Jeffreys' prior or a NIG prior."""
    t = t_statistic(data)
    p_one, p_two = t_p_values(t, data.n - 1)
    if isinstance(prior, NigParams):
        posterior = nig_posterior(prior, data)
    elif prior == "jeffreys":
        posterior = jeffreys_posterior(data)
    else:
        raise DomainError(f"prior must be 'jeffreys' or NigParams, got {prior!r}")
    pop_one = pop_theta_leq_zero(posterior)
    return TestReport(
        statistic=t,
        p_one=p_one,
        p_two=p_two,
        pop_one=pop_one,
        pop_two=pop_two_from_one(pop_one),
    )
