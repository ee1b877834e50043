"""Intersection–union tests on linear contrasts of a multivariate normal mean, with known Σ."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve, cholesky

from pvpop.binary import TestReport, p_one_sided, p_two_sided, pop_two_from_one
from pvpop.errors import DomainError
from pvpop.kernels import std_normal_cdf

VAGUE_PRIOR_SCALE = 1000.0


def _as_spd(matrix, name: str) -> np.ndarray:
    arr = np.array(matrix, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DomainError(f"{name} must be a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    if not np.allclose(arr, arr.T, rtol=1e-12, atol=1e-12):
        raise DomainError(f"{name} must be symmetric")
    try:
        cholesky(arr, lower=True)
    except LinAlgError as exc:
        raise DomainError(f"{name} must be positive definite") from exc
    arr.setflags(write=False)
    return arr


def _as_vector(values, dim: int, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float).ravel()
    if arr.size != dim:
        raise DomainError(f"{name} must have length {dim}, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class MvnSample:
    """Sample mean of n draws from N_p(μ, Σ) with Σ known."""

    n: int
    xbar: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n!r}")
        sigma = _as_spd(self.sigma, "sigma")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "xbar", _as_vector(self.xbar, sigma.shape[0], "xbar"))

    @property
    def dim(self) -> int:
        return self.sigma.shape[0]

    @classmethod
    def from_draws(cls, draws, sigma) -> "MvnSample":
        arr = np.asarray(draws, dtype=float)
        if arr.ndim != 2 or arr.shape[0] < 1:
            raise DomainError("draws must be an (n, p) array with n >= 1")
        return cls(n=arr.shape[0], xbar=arr.mean(axis=0), sigma=sigma)


@dataclass(frozen=True, eq=False)
class ContrastSet:
    """K nonzero contrast vectors, stored as rows."""

    contrasts: np.ndarray

    def __post_init__(self):
        arr = np.array(self.contrasts, dtype=float)
        if arr.ndim == 1:
            arr = arr[None, :]
        if arr.ndim != 2 or arr.shape[0] < 1:
            raise DomainError("at least one contrast vector is required")
        if not np.all(np.isfinite(arr)):
            raise DomainError("contrasts must be finite")
        if np.any(~arr.any(axis=1)):
            raise DomainError("contrast vectors must be nonzero")
        arr.setflags(write=False)
        object.__setattr__(self, "contrasts", arr)

    def __len__(self) -> int:
        return self.contrasts.shape[0]

    def __iter__(self):
        return iter(self.contrasts)


def unit_contrasts(dim: int, k: int | None = None) -> ContrastSet:
    """c_k = e_k for k = 1..K (K defaults to ``dim``)."""
    k = dim if k is None else k
    if not (1 <= k <= dim):
        raise DomainError(f"need 1 <= K <= p, got K={k}, p={dim}")
    return ContrastSet(np.eye(dim)[:k])


@dataclass(frozen=True, eq=False)
class MvnPrior:
    mu0: np.ndarray
    sigma0: np.ndarray

    def __post_init__(self):
        sigma0 = _as_spd(self.sigma0, "sigma0")
        object.__setattr__(self, "sigma0", sigma0)
        object.__setattr__(self, "mu0", _as_vector(self.mu0, sigma0.shape[0], "mu0"))

    @classmethod
    def vague(cls, dim: int, scale: float = VAGUE_PRIOR_SCALE) -> "MvnPrior":
        return cls(mu0=np.zeros(dim), sigma0=scale * np.eye(dim))


@dataclass(frozen=True, eq=False)
class MvnPosterior:
    mu_n: np.ndarray
    sigma_n: np.ndarray = field(repr=False)

    def __post_init__(self):
        sigma_n = _as_spd(self.sigma_n, "sigma_n")
        object.__setattr__(self, "sigma_n", sigma_n)
        object.__setattr__(self, "mu_n", _as_vector(self.mu_n, sigma_n.shape[0], "mu_n"))


def _check_contrast(sample_dim: int, contrast) -> np.ndarray:
    c = _as_vector(contrast, sample_dim, "contrast")
    if not c.any():
        raise DomainError("contrast vector must be nonzero")
    return c


def sasabuchi_z(sample: MvnSample, contrast) -> float:
    """Z_k = c'X̄ / sqrt(c'Σc / n)."""
    c = _check_contrast(sample.dim, contrast)
    variance = float(c @ sample.sigma @ c) / sample.n
    return float(c @ sample.xbar) / math.sqrt(variance)


def iut_decision(p_values, alpha: float) -> bool:
    """Intersection–union rule: reject only if every component p-value is below alpha."""
    values = list(p_values)
    if not values:
        raise DomainError("at least one p-value is required")
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    return all(p < alpha for p in values)


def mvn_posterior(prior: MvnPrior, sample: MvnSample) -> MvnPosterior:
    """Conjugate update for μ with known Σ.

    With A = Σ₀ + Σ/n:
        μₙ = Σ₀ A⁻¹ X̄ + (1/n) Σ A⁻¹ μ₀
        Σₙ = (1/n) Σ A⁻¹ Σ₀
    using a Cholesky solve against A.
    """
    if prior.sigma0.shape != sample.sigma.shape:
        raise DomainError(
            f"prior dimension {prior.sigma0.shape[0]} does not match sample dimension {sample.dim}"
        )
    sigma_over_n = sample.sigma / sample.n
    a = prior.sigma0 + sigma_over_n
    try:
        factor = cho_factor(a, lower=True)
    except LinAlgError as exc:
        raise DomainError("Σ₀ + Σ/n is not positive definite") from exc
    mu_n = prior.sigma0 @ cho_solve(factor, sample.xbar) + sigma_over_n @ cho_solve(
        factor, prior.mu0
    )
    sigma_n = sigma_over_n @ cho_solve(factor, prior.sigma0)
    sigma_n = (sigma_n + sigma_n.T) / 2.0
    return MvnPosterior(mu_n=mu_n, sigma_n=sigma_n)


def pop_contrast(posterior: MvnPosterior, contrast) -> tuple[float, float]:
    """(PoP₁, PoP₂) for H0: c'μ <= 0, from c'μ | D ~ N(c'μₙ, c'Σₙc)."""
    c = _check_contrast(posterior.mu_n.size, contrast)
    mean = float(c @ posterior.mu_n)
    sd = math.sqrt(float(c @ posterior.sigma_n @ c))
    pop_one = std_normal_cdf(-mean / sd)
    return pop_one, pop_two_from_one(pop_one)


def mvn_report(
    sample: MvnSample, contrasts: ContrastSet, prior: MvnPrior | None = None
) -> list[TestReport]:
    """One report per contrast, in contrast order."""
    prior = prior or MvnPrior.vague(sample.dim)
    posterior = mvn_posterior(prior, sample)
    reports = []
    for c in contrasts:
        z = sasabuchi_z(sample, c)
        pop_one, pop_two = pop_contrast(posterior, c)
        reports.append(
            TestReport(
                statistic=z,
                p_one=p_one_sided(z),
                p_two=p_two_sided(z),
                pop_one=pop_one,
                pop_two=pop_two,
            )
        )
    return reports


def iut_rejects(reports: list[TestReport], alpha: float, sided: str = "one") -> tuple[bool, bool]:
    """(frequentist, Bayesian) IUT decisions from per-contrast reports."""
    if sided == "one":
        return (
            iut_decision([r.p_one for r in reports], alpha),
            iut_decision([r.pop_one for r in reports], alpha),
        )
    if sided == "two":
        return (
            iut_decision([r.p_two for r in reports], alpha),
            iut_decision([r.pop_two for r in reports], alpha),
        )
    raise DomainError(f"sided must be 'one' or 'two', got {sided!r}")
