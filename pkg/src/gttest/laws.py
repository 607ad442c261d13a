"""Finite discrete laws and log-space binomial / Poisson mass functions.

The mass functions use Loader's saddle-point decomposition
(``stirlerr`` + ``bd0``), which keeps every term O(1) in log space and gives
near machine-precision relative accuracy for n up to ~1e7.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .errors import DomainError

LOG_2PI = math.log(2.0 * math.pi)
MASS_TOLERANCE = 1e-12

_S0 = 1.0 / 12
_S1 = 1.0 / 360
_S2 = 1.0 / 1260
_S3 = 1.0 / 1680
_S4 = 1.0 / 1188


def stirlerr(n):
    """``log(n!) - log(sqrt(2 pi n) (n/e)^n)`` for n >= 1, elementwise."""
    n = np.asarray(n, dtype=float)
    out = np.empty_like(n)
    small = n <= 15
    if np.any(small):
        ns = n[small]
        out[small] = (
            np.array([math.lgamma(v + 1.0) for v in ns.ravel()]).reshape(ns.shape)
            - (ns + 0.5) * np.log(ns)
            + ns
            - 0.5 * LOG_2PI
        )
    big = ~small
    if np.any(big):
        nb = n[big]
        nn = nb * nb
        r = np.where(
            nb > 500,
            (_S0 - _S1 / nn) / nb,
            np.where(
                nb > 80,
                (_S0 - (_S1 - _S2 / nn) / nn) / nb,
                np.where(
                    nb > 35,
                    (_S0 - (_S1 - (_S2 - _S3 / nn) / nn) / nn) / nb,
                    (_S0 - (_S1 - (_S2 - (_S3 - _S4 / nn) / nn) / nn) / nn) / nb,
                ),
            ),
        )
        out[big] = r
    return out


def bd0(x, m):
    """Deviance term ``x log(x/m) + m - x``, accurate when x is close to m."""
    x, m = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(m, dtype=float))
    out = np.empty(x.shape)
    close = np.abs(x - m) < 0.1 * (x + m)
    far = ~close
    if np.any(far):
        xf, mf = x[far], m[far]
        out[far] = xf * np.log(xf / mf) + mf - xf
    if np.any(close):
        xc, mc = x[close], m[close]
        v = (xc - mc) / (xc + mc)
        s = (xc - mc) * v
        ej = 2.0 * xc * v
        v2 = v * v
        for j in range(1, 200):
            ej = ej * v2
            s_new = s + ej / (2 * j + 1)
            if np.array_equal(s_new, s):
                break
            s = s_new
        out[close] = s
    return out


def binomial_logpmf(n: int, p: float, k=None):
    """Log of the Binomial(n, p) mass at ``k`` (default: all of 0..n)."""
    if n < 0 or int(n) != n:
        raise DomainError(f"n must be a nonnegative integer, got {n}")
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    k = np.arange(n + 1, dtype=float) if k is None else np.asarray(k, dtype=float)
    q = 1.0 - p
    out = np.full(k.shape, -np.inf)
    out[k == 0] = n * math.log1p(-p)
    out[k == n] = n * math.log(p)
    inner = (k > 0) & (k < n)
    if np.any(inner):
        ki = k[inner]
        lc = (
            stirlerr(n)
            - stirlerr(ki)
            - stirlerr(n - ki)
            - bd0(ki, n * p)
            - bd0(n - ki, n * q)
        )
        lf = LOG_2PI + np.log(ki) + np.log1p(-ki / n)
        out[inner] = lc - 0.5 * lf
    return out


def binomial_pmf(n: int, p: float, k=None):
    return np.exp(binomial_logpmf(n, p, k))


def poisson_logpmf(lam: float, k):
    if not lam > 0 or not math.isfinite(lam):
        raise DomainError(f"Poisson parameter must be positive and finite, got {lam}")
    k = np.asarray(k, dtype=float)
    if np.any(k < 0):
        raise DomainError("Poisson support is the nonnegative integers")
    out = np.empty(k.shape)
    zero = k == 0
    out[zero] = -lam
    pos = ~zero
    if np.any(pos):
        kp = k[pos]
        out[pos] = -stirlerr(kp) - bd0(kp, lam) - 0.5 * (LOG_2PI + np.log(kp))
    return out


def poisson_pmf(lam: float, k):
    """``exp(-lam) lam^k / k!`` computed in log space (scalar or array ``k``)."""
    out = np.exp(poisson_logpmf(lam, k))
    return float(out) if out.ndim == 0 else out


def poisson_table(lam: float, tail_tolerance: float, k_min: int = 0):
    """Poisson masses on 0..K and the exact upper tail beyond K.

    K is the smallest index >= ``k_min`` whose upper-tail mass
    ``P(pi > K)`` is at most ``tail_tolerance``.  The tail is summed from the
    far end rather than taken as ``1 - cdf``, so it carries no cancellation.
    """
    if not tail_tolerance > 0:
        raise DomainError(f"tail_tolerance must be positive, got {tail_tolerance}")
    k_max = int(math.ceil(lam + 40.0 * math.sqrt(lam) + 60.0)) + int(k_min)
    pmf = poisson_pmf(lam, np.arange(k_max + 1))
    # tails[j] = P(pi > j) up to the (negligible) mass beyond k_max
    tails = np.concatenate([np.cumsum(pmf[::-1])[::-1][1:], [0.0]])
    ok = np.nonzero(tails <= tail_tolerance)[0]
    k_cut = max(int(ok[0]), int(k_min))
    return pmf[: k_cut + 1], float(tails[k_cut])


@dataclass(frozen=True, eq=False)
class DiscreteLaw:
    """Atoms with strictly decreasing (possibly infinite) values.

    ``tail_mass`` is truncated mass known to sit strictly below the smallest
    atom; ``defect`` is mass attached to no real value at all.  The three
    pieces sum to one.
    """

    values: np.ndarray
    probs: np.ndarray
    tail_mass: float = 0.0
    defect: float = 0.0

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        probs = np.array(self.probs, dtype=float)
        if values.ndim != 1 or values.shape != probs.shape:
            raise DomainError("values and probs must be 1-d arrays of equal length")
        if np.any(np.isnan(values)):
            raise DomainError("atom values must not be NaN")
        if np.any(probs < 0) or self.tail_mass < 0 or self.defect < 0:
            raise DomainError("probabilities must be nonnegative")
        if values.size > 1 and not np.all(np.diff(values) < 0):
            raise DomainError("atom values must be strictly decreasing")
        total = float(probs.sum()) + self.tail_mass + self.defect
        if abs(total - 1.0) > MASS_TOLERANCE:
            raise DomainError(f"total mass {total!r} differs from 1")
        values.setflags(write=False)
        probs.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "tail_mass", float(self.tail_mass))
        object.__setattr__(self, "defect", float(self.defect))

    @classmethod
    def from_atoms(
        cls, atoms: Iterable[tuple[float, float]], tail_mass: float = 0.0, defect: float = 0.0
    ) -> "DiscreteLaw":
        """Build a law from unordered (value, prob) pairs, merging equal values."""
        merged: dict[float, float] = {}
        for v, pr in atoms:
            merged[float(v)] = merged.get(float(v), 0.0) + float(pr)
        keys = sorted(merged, reverse=True)
        return cls(np.array(keys), np.array([merged[k] for k in keys]), tail_mass, defect)

    def __len__(self) -> int:
        return int(self.values.size)

    def atoms(self) -> list[tuple[float, float]]:
        return list(zip(self.values.tolist(), self.probs.tolist()))

    @property
    def missing_mass(self) -> float:
        return self.tail_mass + self.defect

    def prob_ge(self, x: float) -> float:
        """``P(V >= x)`` from the atoms (truncated tail and defect are excluded)."""
        return float(self.probs[self.values >= x].sum())

    def prob_gt(self, x: float) -> float:
        return float(self.probs[self.values > x].sum())

    def prob_lt(self, x: float) -> float:
        """``P(V < x)``; the truncated tail counts once ``x`` exceeds the last atom."""
        out = float(self.probs[self.values < x].sum())
        if self.values.size == 0 or x > self.values[-1]:
            out += self.tail_mass
        return out

    def prob_le(self, x: float) -> float:
        out = float(self.probs[self.values <= x].sum())
        if self.values.size == 0 or x >= self.values[-1]:
            out += self.tail_mass
        return out

    def moments(self) -> tuple[float, float]:
        """Mean and variance; only defined for complete laws with finite atoms."""
        if self.missing_mass > 0 or not np.all(np.isfinite(self.values)):
            raise DomainError("moments require a complete law with finite atoms")
        mean = float(np.dot(self.values, self.probs))
        var = float(np.dot((self.values - mean) ** 2, self.probs))
        return mean, var

    def pushforward(self, f: Callable[[np.ndarray], np.ndarray]) -> "DiscreteLaw":
        """Law of ``f(V)`` for an injective ``f``; missing masses are carried over as defect
        unless ``f`` is increasing, in which case the truncated tail keeps its meaning."""
        new_values = np.asarray(f(self.values), dtype=float)
        order = np.argsort(-new_values, kind="stable")
        increasing = bool(np.all(order == np.arange(order.size)))
        if increasing:
            return DiscreteLaw(new_values, self.probs, self.tail_mass, self.defect)
        return DiscreteLaw(
            new_values[order], self.probs[order], 0.0, self.tail_mass + self.defect
        )

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        if self.missing_mass > 0 or not np.all(np.isfinite(self.values)):
            raise DomainError("can only sample from a complete law with finite atoms")
        return rng.choice(self.values, size=size, p=self.probs / self.probs.sum())


def total_variation(a: DiscreteLaw, b: DiscreteLaw) -> float:
    """Half the l1 distance between two laws, matching atoms by exact value.

    Missing mass (truncated tail or defect) is treated as disjoint from the
    other law's atoms, which is exact when the truncation point lies beyond
    the other law's support and an upper bound otherwise.
    """
    pa = dict(zip(a.values.tolist(), a.probs.tolist()))
    pb = dict(zip(b.values.tolist(), b.probs.tolist()))
    support = pa.keys() | pb.keys()
    diff = math.fsum(abs(pa.get(v, 0.0) - pb.get(v, 0.0)) for v in support)
    return 0.5 * (diff + a.missing_mass + b.missing_mass)
