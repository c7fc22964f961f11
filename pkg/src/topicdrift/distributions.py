"""Elementary probability distributions: log-densities and seeded samplers.

Every distribution validates its parameters on construction and exposes
``log_density`` (natural log) and ``sample``.  Samplers take an explicit
``numpy.random.Generator`` so runs are reproducible and nothing in this
module holds mutable state.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import OutOfSupportError, ParameterError

PROB_VECTOR_TOL = 1e-12


def _as_prob_vector(mu, name):
    mu = np.asarray(mu, dtype=float)
    if mu.ndim != 1 or mu.size == 0:
        raise ParameterError(f"{name} must be a nonempty 1-d probability vector")
    if np.any(mu < 0.0) or np.any(mu > 1.0):
        raise ParameterError(f"{name} entries must lie in [0, 1]")
    if abs(mu.sum() - 1.0) > PROB_VECTOR_TOL:
        raise ParameterError(f"{name} must sum to 1 (got {mu.sum()!r})")
    return mu


def _check_probability(p, name):
    if not (0.0 <= p <= 1.0):
        raise ParameterError(f"{name} must lie in [0, 1], got {p!r}")


def _check_positive(x, name):
    if not (x > 0.0) or not math.isfinite(x):
        raise ParameterError(f"{name} must be finite and > 0, got {x!r}")


@dataclass(frozen=True)
class Uniform:
    """Continuous uniform on [a, b]."""

    a: float
    b: float

    def __post_init__(self):
        if not (self.a < self.b):
            raise ParameterError(f"Uniform requires a < b, got [{self.a}, {self.b}]")

    def log_density(self, x):
        if not (self.a <= x <= self.b):
            raise OutOfSupportError(f"{x!r} outside [{self.a}, {self.b}]")
        return -math.log(self.b - self.a)

    def sample(self, rng, n):
        return rng.uniform(self.a, self.b, size=n)

    def mean(self):
        return 0.5 * (self.a + self.b)


@dataclass(frozen=True)
class Bernoulli:
    """Single binary trial with success probability mu."""

    mu: float

    def __post_init__(self):
        _check_probability(self.mu, "mu")

    def log_density(self, x):
        if x not in (0, 1):
            raise OutOfSupportError(f"Bernoulli support is {{0, 1}}, got {x!r}")
        p = self.mu if x == 1 else 1.0 - self.mu
        return math.log(p) if p > 0.0 else -math.inf

    def sample(self, rng, n):
        return (rng.random(n) < self.mu).astype(np.int64)

    def mean(self):
        return self.mu


@dataclass(frozen=True)
class Binomial:
    """Number of successes in n_trials independent Bernoulli(mu) trials."""

    n_trials: int
    mu: float

    def __post_init__(self):
        if self.n_trials < 0:
            raise ParameterError("n_trials must be >= 0")
        _check_probability(self.mu, "mu")

    def log_density(self, x):
        if x != int(x) or not (0 <= x <= self.n_trials):
            raise OutOfSupportError(f"{x!r} outside {{0..{self.n_trials}}}")
        x = int(x)
        choose = gammaln(self.n_trials + 1) - gammaln(x + 1) - gammaln(self.n_trials - x + 1)
        with np.errstate(divide="ignore"):
            return float(choose + x * np.log(self.mu) + (self.n_trials - x) * np.log1p(-self.mu))

    def sample(self, rng, n):
        return rng.binomial(self.n_trials, self.mu, size=n)

    def mean(self):
        return self.n_trials * self.mu


@dataclass(frozen=True)
class Multinomial:
    """Counts over K outcomes after n_trials draws; n_trials=1 is categorical."""

    n_trials: int
    mu: np.ndarray

    def __post_init__(self):
        if self.n_trials < 1:
            raise ParameterError("n_trials must be >= 1")
        object.__setattr__(self, "mu", _as_prob_vector(self.mu, "mu"))

    def log_density(self, x):
        m = np.asarray(x)
        if m.shape != self.mu.shape or np.any(m < 0) or np.any(m != np.floor(m)):
            raise OutOfSupportError("x must be a nonnegative integer count vector over K outcomes")
        if m.sum() != self.n_trials:
            raise OutOfSupportError(f"counts must sum to n_trials={self.n_trials}")
        m = m.astype(float)
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(m > 0, m * np.log(self.mu), 0.0)
        if np.any(np.isnan(terms)):  # m_k > 0 where mu_k == 0
            return -math.inf
        coeff = gammaln(self.n_trials + 1) - gammaln(m + 1).sum()
        return float(coeff + terms.sum())

    def sample(self, rng, n):
        return rng.multinomial(self.n_trials, self.mu, size=n)

    def mean(self):
        return self.n_trials * self.mu


@dataclass(frozen=True)
class Beta:
    """Beta distribution on [0, 1] with shape parameters a, b."""

    a: float
    b: float

    def __post_init__(self):
        _check_positive(self.a, "a")
        _check_positive(self.b, "b")

    def log_density(self, x):
        if not (0.0 <= x <= 1.0):
            raise OutOfSupportError(f"{x!r} outside [0, 1]")
        norm = gammaln(self.a + self.b) - gammaln(self.a) - gammaln(self.b)
        with np.errstate(divide="ignore"):
            return float(norm + (self.a - 1.0) * np.log(x) + (self.b - 1.0) * np.log1p(-x))

    def sample(self, rng, n):
        return rng.beta(self.a, self.b, size=n)

    def mean(self):
        return self.a / (self.a + self.b)


@dataclass(frozen=True)
class Dirichlet:
    """Dirichlet over the K-simplex with concentration vector alpha."""

    alpha: np.ndarray

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=float)
        if alpha.ndim != 1 or alpha.size == 0 or np.any(alpha <= 0.0):
            raise ParameterError("alpha entries must be strictly positive")
        object.__setattr__(self, "alpha", alpha)

    def log_density(self, x):
        mu = np.asarray(x, dtype=float)
        if mu.shape != self.alpha.shape:
            raise OutOfSupportError("point dimension does not match alpha")
        if np.any(mu < 0.0) or abs(mu.sum() - 1.0) > 1e-9:
            raise OutOfSupportError("point must lie on the probability simplex")
        norm = gammaln(self.alpha.sum()) - gammaln(self.alpha).sum()
        with np.errstate(divide="ignore"):
            return float(norm + np.sum((self.alpha - 1.0) * np.log(mu)))

    def sample(self, rng, n):
        return rng.dirichlet(self.alpha, size=n)

    def mean(self):
        return self.alpha / self.alpha.sum()


@dataclass(frozen=True)
class Gaussian:
    """Univariate normal with mean and variance."""

    mean_: float
    variance: float

    def __post_init__(self):
        _check_positive(self.variance, "variance")

    def log_density(self, x):
        return -0.5 * math.log(2.0 * math.pi * self.variance) - (x - self.mean_) ** 2 / (2.0 * self.variance)

    def sample(self, rng, n):
        return rng.normal(self.mean_, math.sqrt(self.variance), size=n)

    def mean(self):
        return self.mean_


@dataclass(frozen=True)
class Gamma:
    """Gamma distribution with shape a and rate b."""

    a: float
    b: float

    def __post_init__(self):
        _check_positive(self.a, "a")
        _check_positive(self.b, "b")

    def log_density(self, x):
        if x < 0.0:
            raise OutOfSupportError(f"{x!r} outside [0, inf)")
        with np.errstate(divide="ignore"):
            return float(self.a * np.log(self.b) - gammaln(self.a) + (self.a - 1.0) * np.log(x) - self.b * x)

    def sample(self, rng, n):
        return rng.gamma(self.a, 1.0 / self.b, size=n)

    def mean(self):
        return self.a / self.b


def log_density(dist, x):
    """Natural-log density/mass of ``dist`` at ``x``."""
    return dist.log_density(x)


def sample(dist, rng, n):
    """Draw ``n`` i.i.d. points from ``dist`` using the caller's generator."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    return dist.sample(rng, n)


def softmax_map(phi):
    """Map unconstrained natural parameters onto the probability simplex.

    Subtracts the maximum before exponentiating, so adding a constant to
    every entry leaves the output unchanged and large inputs cannot
    overflow.
    """
    phi = np.asarray(phi, dtype=float)
    if phi.size == 0 or not np.all(np.isfinite(phi)):
        raise ParameterError("softmax_map requires a nonempty finite vector")
    shifted = phi - phi.max()
    e = np.exp(shifted)
    return e / e.sum()
