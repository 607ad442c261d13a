"""Reference computations that share no code with the package."""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy import integrate, stats


def brute_force_tstar_law(n: int, p: float, merge_tol: float = 1e-11) -> dict[float, float]:
    """Law of t* by enumerating all 2^n two-point outcomes.

    t* is computed from the raw observations (sum over root sum of squares),
    not from the count map.  Outcomes whose t* values agree to ``merge_tol``
    are pooled, since different summation orders differ in the last bits.
    """
    q = 1.0 - p
    hi, lo = math.sqrt(p / q), -math.sqrt(q / p)
    outcomes = []
    for bits in itertools.product((0, 1), repeat=n):
        xs = [lo if b else hi for b in bits]
        t = math.sqrt(math.fsum(v * v for v in xs))
        k = sum(bits)
        outcomes.append((math.fsum(xs) / t, p**k * q ** (n - k)))
    outcomes.sort(reverse=True)
    law: dict[float, float] = {}
    anchor = None
    for v, pr in outcomes:
        if anchor is None or anchor - v > merge_tol:
            anchor = v
            law[anchor] = 0.0
        law[anchor] += pr
    return law


def binomial_cdf_direct(n: int, p: float, k: int) -> float:
    return math.fsum(math.comb(n, j) * p**j * (1 - p) ** (n - j) for j in range(k + 1))


def student_sf_direct(df: int, x: float) -> float:
    """Student tail by integrating the density itself over [x, inf)."""
    c = math.gamma((df + 1) / 2) / (math.sqrt(math.pi * df) * math.gamma(df / 2)) if df < 300 else math.exp(
        math.lgamma((df + 1) / 2) - math.lgamma(df / 2)
    ) / math.sqrt(math.pi * df)
    f = lambda t: c * (1 + t * t / df) ** (-(df + 1) / 2)  # noqa: E731
    val, _ = integrate.quad(f, x, np.inf, epsabs=1e-14, epsrel=1e-12, limit=400)
    return val


def scipy_student_sf(df: int, x: float) -> float:
    return float(stats.t.sf(x, df))


def scipy_normal_sf(x: float) -> float:
    return float(stats.norm.sf(x))


def quantile_by_bisection(sf, p: float, lo: float = -50.0, hi: float = 50.0) -> float:
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if sf(mid) > p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
