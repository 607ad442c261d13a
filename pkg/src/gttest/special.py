"""Normal and Student distribution functions and their analytic tail bounds.

The normal functions are thin wrappers over the C library ``erfc`` (absolute
error near machine precision, and relative accuracy in the far tail).  The
Student tail is obtained by adaptive quadrature of the density, so it can be
checked directly against the closed-form sandwich returned by
:func:`student_sf_bounds`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import integrate

from .errors import DomainError, NumericalError

SQRT2 = math.sqrt(2.0)
SQRT2PI = math.sqrt(2.0 * math.pi)
INV_SQRT2PI = 1.0 / SQRT2PI

# math.gamma overflows for arguments above ~171.6
_GAMMA_DIRECT_MAX_DF = 340


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances handed to the adaptive integrator.

    ``abs_tolerance`` bounds the absolute error of the returned probability;
    ``rel_tolerance`` keeps far-tail values accurate relative to their size.
    """

    abs_tolerance: float = 1e-12
    rel_tolerance: float = 1e-12
    max_subdivisions: int = 200

    def __post_init__(self):
        if not self.abs_tolerance > 0:
            raise DomainError(f"abs_tolerance must be positive, got {self.abs_tolerance}")
        if not self.rel_tolerance > 0:
            raise DomainError(f"rel_tolerance must be positive, got {self.rel_tolerance}")
        if self.max_subdivisions < 1:
            raise DomainError(f"max_subdivisions must be >= 1, got {self.max_subdivisions}")


DEFAULT_QUADRATURE = QuadratureConfig()


@dataclass(frozen=True)
class StudentDf:
    """Degrees of freedom of a Student distribution."""

    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"degrees of freedom must be a positive integer, got {self.n}")


def _df(df: StudentDf | int) -> int:
    return df.n if isinstance(df, StudentDf) else StudentDf(df).n


def _finite(x: float, name: str = "x") -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x}")
    return x


# -- standard normal ---------------------------------------------------------


def std_normal_pdf(x: float) -> float:
    x = _finite(x)
    return INV_SQRT2PI * math.exp(-0.5 * x * x)


def std_normal_cdf(x: float) -> float:
    x = _finite(x)
    return 0.5 * math.erfc(-x / SQRT2)


def std_normal_sf(x: float) -> float:
    """Upper tail ``1 - Phi(x)``, evaluated without cancellation."""
    x = _finite(x)
    return 0.5 * math.erfc(x / SQRT2)


def _bisect_decreasing(f, target: float, lo: float, hi: float) -> float:
    # f is nonincreasing on [lo, hi] with f(lo) >= target >= f(hi)
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if f(mid) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def std_normal_sf_inv(p: float) -> float:
    """Return ``x`` with ``Phi_c(x) = p`` by bracketed bisection."""
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    if p == 0.5:
        return 0.0
    return _bisect_decreasing(std_normal_sf, p, -40.0, 40.0)


# -- Gamma and Student --------------------------------------------------------


def gamma_fn(y: float) -> float:
    y = float(y)
    if not y > 0 or not math.isfinite(y):
        raise DomainError(f"gamma_fn requires a finite y > 0, got {y}")
    return math.gamma(y)


def student_t_constant(df: StudentDf | int) -> float:
    """Normalising constant ``Gamma((n+1)/2) / (sqrt(pi n) Gamma(n/2))``."""
    n = _df(df)
    if n <= _GAMMA_DIRECT_MAX_DF:
        ratio = math.gamma((n + 1) / 2) / math.gamma(n / 2)
    else:
        ratio = math.exp(math.lgamma((n + 1) / 2) - math.lgamma(n / 2))
    return ratio / math.sqrt(math.pi * n)


def student_t_pdf(df: StudentDf | int, x: float) -> float:
    n = _df(df)
    x = _finite(x)
    return student_t_constant(n) * math.exp(-0.5 * (n + 1) * math.log1p(x * x / n))


def student_t_sf(
    df: StudentDf | int, x: float, cfg: QuadratureConfig = DEFAULT_QUADRATURE
) -> float:
    """Upper tail of Student's distribution by adaptive quadrature.

    With ``t = sqrt(n) tan(theta)`` the tail becomes
    ``C_n sqrt(n) * int_{theta0}^{pi/2} cos(theta)^(n-1) dtheta``.  The
    integrand is divided by its value at ``theta0`` so that the integrator's
    tolerances act on an O(1) quantity, which keeps far-tail values accurate
    relative to their magnitude.

    Raises :class:`NumericalError` if the integrator reports non-convergence.
    """
    n = _df(df)
    x = _finite(x)
    if x == 0.0:
        return 0.5
    if x < 0.0:
        return 1.0 - student_t_sf(n, -x, cfg)

    theta0 = math.atan(x / math.sqrt(n))
    log_cos0 = math.log(math.cos(theta0))
    half_pi = 0.5 * math.pi

    def integrand(theta: float) -> float:
        c = math.cos(theta)
        if c <= 0.0:
            return 0.0 if n > 1 else 1.0
        return math.exp((n - 1) * (math.log(c) - log_cos0))

    prefactor = student_t_constant(n) * math.sqrt(n)
    value, abserr, info, *rest = integrate.quad(
        integrand,
        theta0,
        half_pi,
        epsabs=cfg.abs_tolerance / prefactor,
        epsrel=cfg.rel_tolerance,
        limit=cfg.max_subdivisions,
        full_output=1,
    )
    if rest:
        # quad appends a message only when ier > 0
        raise NumericalError(
            f"Student tail quadrature did not converge (df={n}, x={x})",
            {"message": rest[0], "abserr": abserr, "neval": info.get("neval"), "last": info.get("last")},
        )
    return prefactor * math.exp((n - 1) * log_cos0) * value


def student_t_sf_inv(
    df: StudentDf | int, p: float, cfg: QuadratureConfig = DEFAULT_QUADRATURE
) -> float:
    """Return ``x`` with ``Psi_n^c(x) = p`` by bracketed bisection."""
    n = _df(df)
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    if p == 0.5:
        return 0.0
    if p > 0.5:
        return -student_t_sf_inv(n, 1.0 - p, cfg)
    hi = 1.0
    while student_t_sf(n, hi, cfg) > p:
        hi *= 2.0
    return _bisect_decreasing(lambda t: student_t_sf(n, t, cfg), p, 0.0, hi)


# -- analytic bounds ----------------------------------------------------------


def student_sf_bounds(df: StudentDf | int, x: float) -> tuple[float, float]:
    """Closed-form sandwich ``lower <= Psi_n^c(x) <= upper`` for n > 1, x > 0.

    lower = sqrt(2 pi) C_n / sqrt(1 + 1/n) * Phi_c(x sqrt(1 + 1/n))
    upper = C_n / ((1 - 1/n) x) * (1 + x^2/n)^(-(n-1)/2)
    """
    n = _df(df)
    x = _finite(x)
    if n <= 1:
        raise DomainError("student_sf_bounds requires n > 1 (the upper bound degenerates at n = 1)")
    if not x > 0:
        raise DomainError(f"student_sf_bounds requires x > 0, got {x}")
    cn = student_t_constant(n)
    s = math.sqrt(1.0 + 1.0 / n)
    lower = SQRT2PI * cn / s * std_normal_sf(x * s)
    upper = cn / ((1.0 - 1.0 / n) * x) * math.exp(-0.5 * (n - 1) * math.log1p(x * x / n))
    return lower, upper


def student_sf_exp_bounds(df: StudentDf | int, x: float) -> tuple[float, float]:
    """Cruder Gaussian-type envelope of the Student tail, valid for 0 < x <= sqrt(n).

    lower = C_n exp(-x^2 (1+1/n)/2) / ((1+x)(1+1/n))
    upper = C_n exp(-x^2 (1-1/n)/4) / (x (1-1/n))
    """
    n = _df(df)
    x = _finite(x)
    if n <= 1:
        raise DomainError("student_sf_exp_bounds requires n > 1")
    if not 0 < x <= math.sqrt(n):
        raise DomainError(f"student_sf_exp_bounds requires 0 < x <= sqrt(n), got {x}")
    cn = student_t_constant(n)
    lower = cn * math.exp(-0.5 * x * x * (1 + 1 / n)) / ((1 + x) * (1 + 1 / n))
    upper = cn * math.exp(-0.25 * x * x * (1 - 1 / n)) / (x * (1 - 1 / n))
    return lower, upper


def mills_ratio_bounds(x: float) -> tuple[float, float]:
    """Bounds ``1/(1+x) < Phi_c(x)/phi(x) < 1/x`` for x > 0."""
    x = _finite(x)
    if not x > 0:
        raise DomainError(f"mills_ratio_bounds requires x > 0, got {x}")
    return 1.0 / (1.0 + x), 1.0 / x
