"""Special functions, distribution helpers, quadrature and seeded samplers.

Every other module builds on these. Functions accept scalars or numpy arrays
and return a ``float`` for scalar input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import betaln, gammaln, ndtr, ndtri, xlog1py, xlogy

from pvpop.errors import DomainError, NumericError

BETA_CF_MAX_ITER = 5000
BETA_CF_EPS = 1e-14
DEFAULT_QUADRATURE_ORDER = 64
NORMAL_SCALE_HALF_WIDTH = 8.0
MAX_SEED = 2**64 - 1

_TINY = 1e-300
_MAX_REJECTION_ROUNDS = 1000


def _as_result(values: np.ndarray):
    """Return a float for 0-d results, the array otherwise."""
    if np.ndim(values) == 0:
        return float(values)
    return values


def _require_finite(x: np.ndarray, name: str) -> None:
    if not np.all(np.isfinite(x)):
        raise DomainError(f"{name} must be finite, got {x!r}")


# ---------------------------------------------------------------------------
# Normal distribution
# ---------------------------------------------------------------------------


def std_normal_cdf(x):
    """Standard normal CDF Φ(x).

    Uses the Cephes ``ndtr`` rational/erfc evaluation, accurate to a few ulp
    across the real line (far tails included).
    """
    arr = np.asarray(x, dtype=float)
    _require_finite(arr, "x")
    return _as_result(ndtr(arr))


def std_normal_quantile(p):
    """Inverse of :func:`std_normal_cdf` on the open unit interval."""
    arr = np.asarray(p, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise DomainError(f"p must lie in (0, 1), got {p!r}")
    return _as_result(ndtri(arr))


# ---------------------------------------------------------------------------
# Regularized incomplete beta
# ---------------------------------------------------------------------------


def _beta_continued_fraction(a: np.ndarray, b: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Modified Lentz evaluation of the incomplete-beta continued fraction.

    Vectorised: iterates until every element has converged, or raises.
    """
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    d = np.where(np.abs(d) < _TINY, _TINY, d)
    d = 1.0 / d
    h = d.copy()
    converged = np.zeros(x.shape, dtype=bool)
    for m in range(1, BETA_CF_MAX_ITER + 1):
        m2 = 2.0 * m
        # even step
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _TINY, _TINY, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _TINY, _TINY, c)
        d = 1.0 / d
        h = h * d * c
        # odd step
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _TINY, _TINY, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _TINY, _TINY, c)
        d = 1.0 / d
        delta = d * c
        h = h * delta
        converged |= np.abs(delta - 1.0) < BETA_CF_EPS
        if converged.all():
            return h
    worst = np.flatnonzero(~converged.ravel())[0]
    raise NumericError(
        "incomplete beta continued fraction did not converge in "
        f"{BETA_CF_MAX_ITER} iterations (a={a.ravel()[worst]!r}, "
        f"b={b.ravel()[worst]!r}, x={x.ravel()[worst]!r})"
    )


def _log_beta_front(a, b, x, xc):
    """log of x**a * (1-x)**b / B(a, b), with log1p where it is more accurate."""
    with np.errstate(divide="ignore"):
        log_x = np.where(x < 0.5, np.log(np.maximum(x, _TINY)), np.log1p(-xc))
        log_xc = np.where(xc < 0.5, np.log(np.maximum(xc, _TINY)), np.log1p(-x))
    return a * log_x + b * log_xc - betaln(a, b)


def _incbeta(a, b, x, xc) -> np.ndarray:
    """I_x(a, b) given both x and its complement xc = 1 - x (unchecked)."""
    a, b, x, xc = np.broadcast_arrays(
        np.asarray(a, dtype=float),
        np.asarray(b, dtype=float),
        np.asarray(x, dtype=float),
        np.asarray(xc, dtype=float),
    )
    out = np.empty(x.shape, dtype=float)
    lower = x <= 0.0
    upper = xc <= 0.0
    inner = ~(lower | upper)
    out[lower] = 0.0
    out[upper] = 1.0

    direct = inner & (x < a / (a + b))
    swapped = inner & ~direct
    if direct.any():
        aa, bb, xx, cc = a[direct], b[direct], x[direct], xc[direct]
        front = np.exp(_log_beta_front(aa, bb, xx, cc))
        out[direct] = front * _beta_continued_fraction(aa, bb, xx) / aa
    if swapped.any():
        # I_x(a, b) = 1 - I_{1-x}(b, a)
        aa, bb, xx, cc = b[swapped], a[swapped], xc[swapped], x[swapped]
        front = np.exp(_log_beta_front(aa, bb, xx, cc))
        out[swapped] = 1.0 - front * _beta_continued_fraction(aa, bb, xx) / aa
    return np.clip(out, 0.0, 1.0)


def regularized_incomplete_beta(a, b, x):
    """Regularized incomplete beta function I_x(a, b).

    Evaluated by continued fraction, switching to the reflected fraction
    ``1 - I_{1-x}(b, a)`` when ``x >= a / (a + b)``. Also the Beta(a, b) CDF.
    """
    a_arr = np.asarray(a, dtype=float)
    b_arr = np.asarray(b, dtype=float)
    x_arr = np.asarray(x, dtype=float)
    for name, arr in (("a", a_arr), ("b", b_arr), ("x", x_arr)):
        _require_finite(arr, name)
    if np.any(a_arr <= 0.0) or np.any(b_arr <= 0.0):
        raise DomainError(f"a and b must be positive, got a={a!r}, b={b!r}")
    if np.any(x_arr < 0.0) or np.any(x_arr > 1.0):
        raise DomainError(f"x must lie in [0, 1], got {x!r}")
    return _as_result(_incbeta(a_arr, b_arr, x_arr, 1.0 - x_arr))


# ---------------------------------------------------------------------------
# Student t
# ---------------------------------------------------------------------------


def student_t_cdf(x, df):
    """CDF of Student's t with ``df`` degrees of freedom (df may be non-integer)."""
    x_arr = np.asarray(x, dtype=float)
    df_arr = np.asarray(df, dtype=float)
    if np.any(np.isnan(x_arr)):
        raise DomainError(f"x must not be NaN, got {x!r}")
    _require_finite(df_arr, "df")
    if np.any(df_arr <= 0.0):
        raise DomainError(f"df must be positive, got {df!r}")
    x_arr, df_arr = np.broadcast_arrays(x_arr, df_arr)
    x2 = x_arr * x_arr
    with np.errstate(over="ignore", invalid="ignore"):
        w = np.where(np.isinf(x2), 0.0, df_arr / (df_arr + x2))
        wc = np.where(np.isinf(x2), 1.0, x2 / (df_arr + x2))
    tail = 0.5 * _incbeta(0.5 * df_arr, 0.5, w, wc)
    return _as_result(np.where(x_arr > 0.0, 1.0 - tail, tail))


# ---------------------------------------------------------------------------
# Binomial
# ---------------------------------------------------------------------------


def _check_binomial(y, n: int, p: float) -> np.ndarray:
    if int(n) != n or n < 0:
        raise DomainError(f"n must be a non-negative integer, got {n!r}")
    if not (0.0 <= p <= 1.0):
        raise DomainError(f"p must lie in [0, 1], got {p!r}")
    y_arr = np.asarray(y)
    if np.any(y_arr != np.floor(y_arr)):
        raise DomainError(f"y must be integer counts, got {y!r}")
    if np.any(y_arr < 0) or np.any(y_arr > n):
        raise DomainError(f"y must lie in [0, n={n}], got {y!r}")
    return y_arr.astype(float)


def binomial_pmf(y, n: int, p: float):
    """Binomial probability mass, computed in log space."""
    y_arr = _check_binomial(y, n, p)
    log_pmf = (
        gammaln(n + 1.0)
        - gammaln(y_arr + 1.0)
        - gammaln(n - y_arr + 1.0)
        + xlogy(y_arr, p)
        + xlog1py(n - y_arr, -p)
    )
    return _as_result(np.exp(log_pmf))


def binomial_upper_tail(y: int, n: int, p: float) -> float:
    """Pr(Y >= y) for Y ~ Binomial(n, p), by direct summation of the pmf."""
    _check_binomial(max(min(y, n), 0), n, p)
    if y <= 0:
        return 1.0
    if y > n:
        return 0.0
    return min(1.0, math.fsum(binomial_pmf(np.arange(y, n + 1), n, p)))


def binomial_lower_tail(y: int, n: int, p: float) -> float:
    """Pr(Y <= y) for Y ~ Binomial(n, p)."""
    _check_binomial(max(min(y, n), 0), n, p)
    if y >= n:
        return 1.0
    if y < 0:
        return 0.0
    return min(1.0, math.fsum(binomial_pmf(np.arange(0, y + 1), n, p)))


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Gauss-type rule on (-1, 1)."""

    nodes: np.ndarray
    weights: np.ndarray
    order: int

    def __post_init__(self):
        if len(self.nodes) != self.order or len(self.weights) != self.order:
            raise DomainError("nodes and weights must both have length `order`")
        if np.any(np.diff(self.nodes) <= 0.0):
            raise DomainError("quadrature nodes must be strictly increasing")
        if np.any(self.weights <= 0.0):
            raise DomainError("quadrature weights must be positive")
        if abs(math.fsum(self.weights) - 2.0) > 1e-12:
            raise DomainError("quadrature weights must sum to 2")

    def normal_scale(
        self, half_width: float = NORMAL_SCALE_HALF_WIDTH
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Probabilities for integrating over (0, 1) on the normal scale.

        Nodes are spread over t in [-half_width, half_width] and mapped to
        u = Φ(t), so ∫₀¹ g(u) du = ∫ g(Φ(t)) φ(t) dt. Returns ``(u, 1 - u,
        weights)`` with both tails of u resolved and weights summing to 1.
        """
        t = half_width * self.nodes
        density = np.exp(-0.5 * t * t) / math.sqrt(2.0 * math.pi)
        weights = half_width * self.weights * density
        return ndtr(t), ndtr(-t), weights / math.fsum(weights)

    def integrate(self, func, lower: float = -1.0, upper: float = 1.0) -> float:
        """Integrate a vectorised ``func`` over [lower, upper] by affine map."""
        half = (upper - lower) / 2.0
        points = lower + half * (self.nodes + 1.0)
        return float(half * np.dot(self.weights, func(points)))


@lru_cache(maxsize=16)
def gauss_legendre(order: int = DEFAULT_QUADRATURE_ORDER) -> QuadratureRule:
    """Gauss–Legendre rule exact for polynomials of degree <= 2*order - 1."""
    if int(order) != order or order < 2:
        raise DomainError(f"quadrature order must be an integer >= 2, got {order!r}")
    nodes, weights = leggauss(int(order))
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(nodes=nodes, weights=weights, order=int(order))


# ---------------------------------------------------------------------------
# Seeded samplers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RngSeed:
    """Master seed; replication ``i`` draws from stream ``i`` of this seed."""

    seed: int

    def __post_init__(self):
        if int(self.seed) != self.seed or not (0 <= self.seed <= MAX_SEED):
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")

    def sampler(self, stream: int | None = None) -> "Sampler":
        return Sampler(self.seed, stream)


@dataclass(eq=False)
class Sampler:
    """Seeded random stream (PCG64).

    Streams are split deterministically: stream ``k`` of master seed ``s`` is
    ``SeedSequence(s, spawn_key=(k,))``, so a replication's draws depend only
    on ``(seed, k)`` and never on scheduling.
    """

    seed: int
    stream: int | None = None
    _rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        RngSeed(self.seed)
        if self.stream is None:
            seq = np.random.SeedSequence(self.seed)
        else:
            if self.stream < 0:
                raise DomainError(f"stream index must be non-negative, got {self.stream!r}")
            seq = np.random.SeedSequence(self.seed, spawn_key=(int(self.stream),))
        self._rng = np.random.Generator(np.random.PCG64(seq))

    def uniform(self, low: float = 0.0, high: float = 1.0, size=None):
        if not high > low:
            raise DomainError(f"uniform needs low < high, got ({low}, {high})")
        return self._rng.uniform(low, high, size)

    def integers(self, low: int, high: int, size=None):
        """Uniform integers on the closed range [low, high]."""
        if high < low:
            raise DomainError(f"integers needs low <= high, got ({low}, {high})")
        return self._rng.integers(low, high, size=size, endpoint=True)

    def normal(self, mean: float = 0.0, sd: float = 1.0, size=None):
        if not sd > 0.0:
            raise DomainError(f"normal sd must be positive, got {sd!r}")
        return self._rng.normal(mean, sd, size)

    def beta(self, a: float, b: float, size=None):
        if not (a > 0.0 and b > 0.0):
            raise DomainError(f"beta shapes must be positive, got ({a}, {b})")
        return self._rng.beta(a, b, size)

    def gamma(self, shape: float, scale: float = 1.0, size=None):
        """Gamma draws in the shape–scale convention (mean = shape * scale)."""
        if not (shape > 0.0 and scale > 0.0):
            raise DomainError(f"gamma shape and scale must be positive, got ({shape}, {scale})")
        return self._rng.gamma(shape, scale, size)

    def truncated_normal(self, mean: float, sd: float, lower: float = 0.0, size=None):
        """Normal draws conditioned on ``> lower``, by rejection."""
        if not sd > 0.0:
            raise DomainError(f"normal sd must be positive, got {sd!r}")
        shape = () if size is None else size
        draws = np.asarray(self._rng.normal(mean, sd, shape), dtype=float)
        for _ in range(_MAX_REJECTION_ROUNDS):
            rejected = draws <= lower
            if not rejected.any():
                return _as_result(draws)
            if draws.ndim == 0:
                draws = np.asarray(self._rng.normal(mean, sd), dtype=float)
            else:
                draws[rejected] = self._rng.normal(mean, sd, int(rejected.sum()))
        raise NumericError(
            f"truncated normal N({mean}, {sd}^2) > {lower}: acceptance rate too low"
        )

    def multivariate_normal(self, mean, cov, size=None):
        return self._rng.multivariate_normal(mean, cov, size, method="cholesky")
