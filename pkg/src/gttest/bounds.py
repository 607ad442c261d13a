"""Accuracy bounds for candidate approximations to the law of t*, and the selection rule.

Each candidate comes with a computable bound ``r_n`` on the distance between
the law of t* and the candidate distribution.  The candidate with the smallest
bound is selected; it is usable only if that bound is below a user threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import ClassVar, Iterable, Union

import numpy as np

from .errors import DegenerateSampleError, DomainError, RangeError
from .poisson_limit import TvBoundInputs, tv_bound
from .statistic import MomentEstimates, SampleLike, as_sample, sample_moments

DEFAULT_C_STAR = 0.5
DEFAULT_JSW_A = 1.0

# tolerance on the JSW validity cutoff, so x = cutoff itself is not rejected by rounding
_CUTOFF_SLACK = 1e-12


@dataclass(frozen=True)
class Normal:
    kind: ClassVar[str] = "normal"
    order: ClassVar[int] = 0

    def describe(self) -> dict:
        return {"kind": self.kind}


@dataclass(frozen=True)
class StudentT:
    df: int
    kind: ClassVar[str] = "student_t"
    order: ClassVar[int] = 1

    def __post_init__(self):
        if int(self.df) != self.df or self.df < 1:
            raise DomainError(f"df must be a positive integer, got {self.df}")

    def describe(self) -> dict:
        return {"kind": self.kind, "df": self.df}


@dataclass(frozen=True)
class PoissonY:
    n: int
    p_hat: float
    kind: ClassVar[str] = "poisson_y"
    order: ClassVar[int] = 2

    def __post_init__(self):
        if not 0.0 < self.p_hat <= 0.5:
            raise DomainError(f"p_hat must lie in (0, 1/2], got {self.p_hat}")

    def describe(self) -> dict:
        return {"kind": self.kind, "n": self.n, "p_hat": self.p_hat}


CandidateApprox = Union[Normal, StudentT, PoissonY]


@dataclass(frozen=True)
class AccuracyReport:
    candidate: CandidateApprox
    r_n: float
    inputs: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (self.r_n >= 0 and math.isfinite(self.r_n)):
            raise DomainError(f"r_n must be finite and nonnegative, got {self.r_n}")


@dataclass(frozen=True)
class JswConfig:
    A: float = DEFAULT_JSW_A

    def __post_init__(self):
        if not self.A > 0:
            raise DomainError(f"A must be positive, got {self.A}")


def _moment_inputs(m: MomentEstimates) -> dict:
    return {
        "n": m.n,
        "sigma_hat": m.sigma_hat,
        "mu1_hat": m.mu1_hat,
        "mu3_hat": m.mu3_hat,
    }


def _require_scale(m: MomentEstimates) -> None:
    if not m.sigma_hat > 0:
        raise DegenerateSampleError("sigma_hat = 0: moment-based bounds are undefined")


def normal_bound_cor2(m: MomentEstimates, n: int) -> AccuracyReport:
    """``(6.4 mu3/sigma^3 + 2 mu1/sigma) / sqrt(n)`` (the o(n^-1/2) remainder is dropped)."""
    _require_scale(m)
    s = m.sigma_hat
    r = (6.4 * m.mu3_hat / s**3 + 2.0 * m.mu1_hat / s) / math.sqrt(n)
    return AccuracyReport(Normal(), r, _moment_inputs(m))


def jsw_validity_cutoff(m: MomentEstimates, n: int) -> float:
    _require_scale(m)
    return (m.sigma_hat**3 * math.sqrt(n) / m.mu3_hat) ** (1.0 / 3.0)


def _check_jsw_range(m: MomentEstimates, n: int, x: float) -> None:
    if x < 0:
        raise RangeError(f"x must be nonnegative, got {x}")
    limit = m.sigma_hat**3 * math.sqrt(n) / m.mu3_hat
    if x**3 > limit * (1.0 + _CUTOFF_SLACK):
        raise RangeError(f"x = {x} lies beyond the validity cutoff {limit ** (1 / 3)}")


def jsw_bound(m: MomentEstimates, n: int, x: float, cfg: JswConfig = JswConfig()) -> float:
    """``A (1+x)^2 exp(-x^2/2) mu3 / (sigma^3 sqrt(n))``, valid for ``x^3 <= sigma^3 sqrt(n)/mu3``."""
    _require_scale(m)
    _check_jsw_range(m, n, x)
    return cfg.A * (1 + x) ** 2 * math.exp(-0.5 * x * x) * m.mu3_hat / (m.sigma_hat**3 * math.sqrt(n))


def jsw_ratio_bound(m: MomentEstimates, n: int, x: float, cfg: JswConfig = JswConfig()) -> float:
    """Relative form ``A (1+x)^3 mu3 / (sigma^3 sqrt(n))`` bounding ``|P(t* >= x)/Phi_c(x) - 1|``."""
    _require_scale(m)
    _check_jsw_range(m, n, x)
    return cfg.A * (1 + x) ** 3 * m.mu3_hat / (m.sigma_hat**3 * math.sqrt(n))


def poisson_y_bound(n: int, p_hat: float) -> AccuracyReport:
    """Total-variation bound for the Poisson-Y candidate.

    Total variation dominates the Kolmogorov distance, so the value is a valid
    ``r_n`` for the sup-distance as well.
    """
    inputs = TvBoundInputs(n, p_hat)
    return AccuracyReport(PoissonY(n, p_hat), tv_bound(inputs), {"n": n, "p_hat": p_hat})


def student_bound(
    m: MomentEstimates, n: int, df: int | None = None, c_star: float = DEFAULT_C_STAR
) -> AccuracyReport:
    """Normal bound plus ``c_star / n`` for the Student-to-normal distance.

    ``c_star`` has no published value; the default is a heuristic.
    """
    base = normal_bound_cor2(m, n)
    df = n - 1 if df is None else df
    inputs = dict(base.inputs, c_star=c_star, df=df)
    return AccuracyReport(StudentT(max(df, 1)), base.r_n + c_star / n, inputs)


def estimate_p_hat(s: SampleLike) -> float | None:
    """Estimate p for the Poisson-Y candidate, or ``None`` if the candidate does not apply.

    The Poisson-Y bound is derived for two-point samples only, so the candidate
    is offered only when the sample takes exactly two distinct values.  p is
    then estimated by the fraction of observations below ``mean - sigma_hat``,
    i.e. the share of the rare low atom, and must land in (0, 1/2].
    """
    s = as_sample(s)
    if np.unique(s.values).size != 2:
        return None
    m = sample_moments(s)
    if m.sigma_hat == 0:
        return None
    frac = float(np.count_nonzero(s.values < m.mean - m.sigma_hat)) / s.n
    if not 0.0 < frac <= 0.5:
        return None
    return frac


def select_candidate(reports: Iterable[AccuracyReport]) -> AccuracyReport:
    """Minimal ``r_n``; exact ties go to Normal, then Student, then Poisson-Y."""
    reports = list(reports)
    if not reports:
        raise DomainError("no accuracy reports to select from")
    return min(reports, key=lambda r: (r.r_n, r.candidate.order))


def applicability(report: AccuracyReport, threshold: float) -> bool:
    if not threshold > 0:
        raise DomainError(f"threshold must be positive, got {threshold}")
    return report.r_n < threshold
