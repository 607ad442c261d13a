"""Poisson-based approximation to the law of t* under the two-point model.

Replacing the binomial count S by a Poisson(np) count in ``t* = g(S)`` gives
the law Y; letting np -> lambda with n -> infinity gives the defective law
``Y_lambda = (lambda - pi)/sqrt(pi)`` with an atom at +infinity.  Because g is
injective, the total-variation distance between t* and Y is exactly the
binomial/Poisson distance, which is bounded in closed form by :func:`tv_bound`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError
from .laws import DiscreteLaw, binomial_pmf, poisson_pmf, poisson_table, total_variation
from .two_point import TwoPointLaw, exact_tstar_law, g_map

DEFAULT_TAIL_TOLERANCE = 1e-12

__all__ = [
    "PoissonYLaw",
    "TvBoundInputs",
    "CriticalValues",
    "poisson_pmf",
    "y_law",
    "defective_y_law",
    "y_critical_values",
    "tv_binomial_poisson_exact",
    "tv_bound",
    "tv_tstar_vs_y_exact",
    "eta_student_law",
]


@dataclass(frozen=True)
class PoissonYLaw:
    n: int
    p: float

    def __post_init__(self):
        TwoPointLaw(self.n, self.p)  # same domain

    @property
    def lam(self) -> float:
        return self.n * self.p

    @property
    def two_point(self) -> TwoPointLaw:
        return TwoPointLaw(self.n, self.p)


def _check_tail_tolerance(tol: float) -> None:
    if not 0.0 < tol <= 1e-6:
        raise DomainError(f"tail_tolerance must lie in (0, 1e-6], got {tol}")


def y_law(
    law: PoissonYLaw, tail_tolerance: float = DEFAULT_TAIL_TOLERANCE, k_min: int = 0
) -> DiscreteLaw:
    """Atoms ``(g(k), Poisson(np)(k))`` for k = 0..K.

    K is the first index >= ``k_min`` past which the Poisson tail is at most
    ``tail_tolerance``; that tail is stored as ``tail_mass`` (it lies below g(K)).
    """
    _check_tail_tolerance(tail_tolerance)
    pmf, tail = poisson_table(law.lam, tail_tolerance, k_min)
    values = g_map(law.two_point, np.arange(pmf.size))
    return DiscreteLaw(np.atleast_1d(values), pmf, tail_mass=tail)


def defective_y_law(lam: float, tail_tolerance: float = DEFAULT_TAIL_TOLERANCE) -> DiscreteLaw:
    """Atom ``(+inf, e^-lam)`` followed by ``((lam - k)/sqrt(k), Poisson(lam)(k))`` for k >= 1."""
    if not lam > 0:
        raise DomainError(f"lambda must be positive, got {lam}")
    _check_tail_tolerance(tail_tolerance)
    pmf, tail = poisson_table(lam, tail_tolerance, k_min=1)
    k = np.arange(1, pmf.size, dtype=float)
    values = np.concatenate([[math.inf], (lam - k) / np.sqrt(k)])
    return DiscreteLaw(values, pmf, tail_mass=tail)


class CriticalValues(NamedTuple):
    c_minus: float
    c_plus: float
    degenerate: bool


def discrete_critical_values(
    d: DiscreteLaw, upper_mass: float, lower_mass: float
) -> CriticalValues:
    """Conservative quantiles of a discrete law.

    ``c_plus`` is the smallest atom v with ``P(V > v) <= upper_mass`` and
    ``c_minus`` the largest atom v with ``P(V < v) <= lower_mass``.
    """
    probs = d.probs
    above = np.concatenate([[0.0], np.cumsum(probs)[:-1]])  # P(V > v_i)
    below = np.concatenate([np.cumsum(probs[::-1])[::-1][1:], [0.0]]) + d.tail_mass  # P(V < v_i)
    up_ok = np.nonzero(above <= upper_mass)[0]
    lo_ok = np.nonzero(below <= lower_mass)[0]
    c_plus = float(d.values[up_ok[-1]])
    c_minus = float(d.values[lo_ok[0]]) if lo_ok.size else float(d.values[-1])
    return CriticalValues(c_minus, c_plus, c_minus >= c_plus)


def y_critical_values(
    law: PoissonYLaw, eps: float, tail_tolerance: float = DEFAULT_TAIL_TOLERANCE
) -> CriticalValues:
    """Two-sided critical values with at most ``eps/2`` of Y-mass outside on each side."""
    if not 0.0 < eps <= 1.0:
        raise DomainError(f"eps must lie in (0, 1], got {eps}")
    return discrete_critical_values(y_law(law, tail_tolerance), eps / 2, eps / 2)


def tv_binomial_poisson_exact(n: int, p: float, truncation: float = DEFAULT_TAIL_TOLERANCE) -> float:
    """Total-variation distance between Binomial(n, p) and Poisson(np).

    Poisson mass above n has no binomial counterpart and is counted in full,
    including the summed tail beyond the truncation point.
    """
    if not 0.0 < truncation <= 1e-10:
        raise DomainError(f"truncation must lie in (0, 1e-10], got {truncation}")
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    b = binomial_pmf(n, p)
    pois, tail = poisson_table(n * p, truncation, k_min=n)
    diff = np.abs(b - pois[: n + 1])
    return 0.5 * (math.fsum(diff.tolist()) + math.fsum(pois[n + 1 :].tolist()) + tail)


@dataclass(frozen=True)
class TvBoundInputs:
    n: int
    p: float

    def __post_init__(self):
        TwoPointLaw(self.n, self.p)

    @property
    def delta(self) -> float:
        return -math.expm1(-self.n * self.p) * self.p

    @property
    def delta_star(self) -> float:
        return -math.expm1(-self.n * self.p) * self.p ** 2

    @property
    def eps_n(self) -> float:
        """``min{1, (2 pi floor((n-1)p))^(-1/2) + 2(1 - e^-np) p / (1 - 1/n)}``."""
        m = math.floor((self.n - 1) * self.p)
        if m == 0 or self.n == 1:
            return 1.0
        value = (2.0 * math.pi * m) ** -0.5 + 2.0 * self.delta / (1.0 - 1.0 / self.n)
        return min(1.0, value)


def tv_bound(inputs: TvBoundInputs) -> float:
    """``3p/(4e) + 2 delta^2 + 2 delta* eps_n``."""
    return 3.0 * inputs.p / (4.0 * math.e) + 2.0 * inputs.delta ** 2 + 2.0 * inputs.delta_star * inputs.eps_n


def tv_tstar_vs_y_exact(law: TwoPointLaw, truncation: float = DEFAULT_TAIL_TOLERANCE) -> float:
    """Exact total variation between the law of t* and Y, merged on their common support."""
    y = y_law(PoissonYLaw(law.n, law.p), truncation, k_min=law.n)
    return total_variation(exact_tstar_law(law), y)


def eta_student_law(
    n: int, p: float, tail_tolerance: float = DEFAULT_TAIL_TOLERANCE
) -> DiscreteLaw:
    """Law of ``(np - pi)/sqrt(pi (1 - pi/n))``, the t-scale image of Y.

    k = 0 maps to +inf and k = n to -inf; for k > n the radicand is negative,
    so that Poisson mass is recorded as ``defect``.
    """
    PoissonYLaw(n, p)
    _check_tail_tolerance(tail_tolerance)
    lam = n * p
    pmf, tail = poisson_table(lam, tail_tolerance, k_min=n)
    k = np.arange(1, n, dtype=float)
    middle = (lam - k) / np.sqrt(k * (1.0 - k / n))
    if n == 1:
        values = np.array([math.inf, -math.inf])
    else:
        values = np.concatenate([[math.inf], middle, [-math.inf]])
    defect = math.fsum(pmf[n + 1 :].tolist()) + tail
    return DiscreteLaw(values, pmf[: n + 1], defect=defect)
