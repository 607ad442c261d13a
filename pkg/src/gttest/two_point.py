"""The two-point law that drives the non-uniformity results.

X takes ``sqrt(p/q)`` with probability q and ``-sqrt(q/p)`` with probability p,
so ``X = (p - xi)/sqrt(pq)`` with xi ~ Bernoulli(p).  For a sample of size n
the self-normalised sum is ``g(S)`` where S ~ Binomial(n, p) counts the
negative observations and ``g(k) = (np - k)/sqrt(np^2 + (q - p)k)`` is strictly
decreasing.  Every tail probability of t* is therefore a binomial cdf value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import DomainError
from .laws import DiscreteLaw, binomial_pmf
from .statistic import Sample


@dataclass(frozen=True)
class TwoPointLaw:
    n: int
    p: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n}")
        if not 0.0 < self.p <= 0.5:
            raise DomainError(f"p must lie in (0, 1/2], got {self.p}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "p", float(self.p))

    @property
    def q(self) -> float:
        return 1.0 - self.p

    @property
    def high(self) -> float:
        """The frequent (positive) atom."""
        return math.sqrt(self.p / self.q)

    @property
    def low(self) -> float:
        """The rare (negative) atom."""
        return -math.sqrt(self.q / self.p)


def g_map(law: TwoPointLaw, k):
    """``(np - k)/sqrt(np^2 + (q - p)k)``; accepts a scalar or an array of counts."""
    k_arr = np.asarray(k, dtype=float)
    if np.any(k_arr < 0):
        raise DomainError("k must be nonnegative")
    n, p, q = law.n, law.p, law.q
    rad = n * p * p + (q - p) * k_arr
    if np.any(rad <= 0):
        raise DomainError("nonpositive radicand in g")
    out = (n * p - k_arr) / np.sqrt(rad)
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=512)
def bernoulli_sum_law(law: TwoPointLaw) -> DiscreteLaw:
    """Binomial(n, p) law of the negative-observation count, atoms listed from k = n down to 0."""
    probs = binomial_pmf(law.n, law.p)
    k = np.arange(law.n + 1, dtype=float)
    return DiscreteLaw(k[::-1], probs[::-1])


@lru_cache(maxsize=512)
def exact_tstar_law(law: TwoPointLaw) -> DiscreteLaw:
    """Exact law of t*: atom ``g(k)`` carries the Binomial(n, p) mass at k."""
    k = np.arange(law.n + 1)
    return DiscreteLaw(g_map(law, k), binomial_pmf(law.n, law.p))


def tstar_tail_exact(law: TwoPointLaw, x: float) -> float:
    """``P(t* >= x) = P(S <= k(x))`` with ``k(x) = max{k : g(k) >= x}``."""
    d = exact_tstar_law(law)
    count = int(np.count_nonzero(d.values >= x))  # values decrease, so these are k <= k(x)
    return min(1.0, math.fsum(d.probs[:count].tolist()))


def adversarial_p(x: float, n: int) -> float:
    """The p for which the second-largest value of t* equals ``x`` (0 <= x <= 1, n > 3)."""
    if int(n) != n or n <= 3:
        raise DomainError(f"n must be an integer > 3, got {n}")
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x must lie in [0, 1], got {x}")
    return (1.0 + x * math.sqrt(1.0 - 1.0 / n) / math.sqrt(1.0 - x * x / n)) / n


class TwoPointMoments(NamedTuple):
    mean: float
    variance: float
    mu3: float
    mu1: float


def two_point_moments(law: TwoPointLaw) -> TwoPointMoments:
    p, q = law.p, law.q
    root_pq = math.sqrt(p * q)
    return TwoPointMoments(0.0, 1.0, (p * p + q * q) / root_pq, 2.0 * root_pq)


def draw_two_point(law: TwoPointLaw, rng: np.random.Generator, shape) -> np.ndarray:
    xi = rng.random(shape) < law.p
    return np.where(xi, law.low, law.high)


def sample_two_point(law: TwoPointLaw, seed: int, count: int) -> Sample:
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    return Sample(draw_two_point(law, np.random.default_rng(seed), count))


@dataclass(frozen=True, eq=False)
class MixtureLaw:
    """``X = tau*eta + (1 - tau)(p - xi)/sqrt(pq)`` with tau ~ Bernoulli(c/n).

    ``eta_law`` must be a complete law with mean 0 and variance 1.
    """

    n: int
    p: float
    c: float
    eta_law: DiscreteLaw

    def __post_init__(self):
        TwoPointLaw(self.n, self.p)
        if not 0.0 <= self.c <= self.n:
            raise DomainError(f"c/n must lie in [0, 1], got c={self.c}, n={self.n}")
        mean, var = self.eta_law.moments()
        if abs(mean) > 1e-9 or abs(var - 1.0) > 1e-9:
            raise DomainError(f"eta law must have mean 0 and variance 1, got ({mean}, {var})")

    @property
    def two_point(self) -> TwoPointLaw:
        return TwoPointLaw(self.n, self.p)


def draw_mixture(law: MixtureLaw, rng: np.random.Generator, shape) -> np.ndarray:
    # the degenerate mixtures consume the generator exactly like their pure components
    if law.c == 0:
        return draw_two_point(law.two_point, rng, shape)
    if law.c == law.n:
        return law.eta_law.sample(rng, shape)
    tau = rng.random(shape) < law.c / law.n
    base = draw_two_point(law.two_point, rng, shape)
    eta = law.eta_law.sample(rng, shape)
    return np.where(tau, eta, base)


def sample_mixture_remark2(
    n: int, p: float, c: float, eta_law: DiscreteLaw, seed: int, count: int
) -> Sample:
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    law = MixtureLaw(n, p, c, eta_law)
    return Sample(draw_mixture(law, np.random.default_rng(seed), count))


RADEMACHER = DiscreteLaw(np.array([1.0, -1.0]), np.array([0.5, 0.5]))
