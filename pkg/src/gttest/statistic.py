"""Sample moments, Student's statistic and the self-normalised sum.

Student's statistic here uses the plug-in scale ``sigma_hat`` (divisor n), for
which the identity ``t = t* / sqrt(1 - t*^2/n)`` is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Literal, Union

import numpy as np

from .errors import DomainError, UndefinedStatisticError


@dataclass(frozen=True, eq=False)
class Sample:
    """An ordered collection of finite real observations."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float).ravel()
        if v.size == 0:
            raise DomainError("a sample needs at least one observation")
        if not np.all(np.isfinite(v)):
            raise DomainError("sample values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return int(self.values.size)

    def __len__(self) -> int:
        return self.n

    def scaled(self, factor: float) -> "Sample":
        return Sample(self.values * factor)


SampleLike = Union[Sample, Iterable[float], np.ndarray]


def as_sample(s: SampleLike) -> Sample:
    if isinstance(s, Sample):
        return s
    if not isinstance(s, (np.ndarray, list, tuple)):
        s = list(s)
    return Sample(np.asarray(s, dtype=float))


@dataclass(frozen=True)
class MomentEstimates:
    """Plug-in moment estimates; absolute moments are centred at the sample mean."""

    n: int
    mean: float
    sigma_hat: float
    sigma_tilde: float
    mu1_hat: float
    mu3_hat: float


def sample_moments(s: SampleLike) -> MomentEstimates:
    s = as_sample(s)
    n = s.n
    if n < 2:
        raise DomainError(f"moment estimates need n >= 2, got n={n}")
    x = s.values
    if np.ptp(x) == 0.0:
        return MomentEstimates(n, float(x[0]), 0.0, 0.0, 0.0, 0.0)
    mean = float(np.mean(x))
    dev = np.abs(x - mean)
    var_hat = float(np.mean(dev * dev))
    return MomentEstimates(
        n=n,
        mean=mean,
        sigma_hat=math.sqrt(var_hat),
        sigma_tilde=math.sqrt(var_hat * n / (n - 1)),
        mu1_hat=float(np.mean(dev)),
        mu3_hat=float(np.mean(dev**3)),
    )


def zeta_statistic(s: SampleLike, mean0: float, sigma: float) -> float:
    """Z-statistic ``(mean - mean0) sqrt(n) / sigma`` for a known scale."""
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    s = as_sample(s)
    return (float(np.mean(s.values)) - mean0) * math.sqrt(s.n) / sigma


def student_statistic(s: SampleLike, mean0: float) -> float:
    """``(mean - mean0) sqrt(n) / sigma_hat``; signed infinity when only the scale vanishes."""
    m = sample_moments(s)
    num = m.mean - mean0
    if m.sigma_hat == 0.0:
        if num == 0.0:
            raise UndefinedStatisticError("sample is constant and equal to mean0: t is 0/0")
        return math.copysign(math.inf, num)
    return num * math.sqrt(m.n) / m.sigma_hat


def self_normalized_sum(s: SampleLike, mean0: float) -> float:
    """``sum(d) / sqrt(sum(d^2))`` with ``d = x - mean0``; always within [-sqrt(n), sqrt(n)]."""
    s = as_sample(s)
    d = s.values - mean0
    scale = float(np.max(np.abs(d)))
    if scale == 0.0:
        raise UndefinedStatisticError("all observations equal mean0: t* is 0/0")
    d = d / scale  # t* is scale-free; this keeps sum(d^2) clear of under/overflow
    ss = float(np.dot(d, d))
    root_n = math.sqrt(s.n)
    value = float(np.sum(d)) / math.sqrt(ss)
    return min(max(value, -root_n), root_n)


def _one_minus_sq_ratio(y: float, n: int) -> float:
    # 1 - y^2/n, factored to keep precision near |y| = sqrt(n)
    r = y / math.sqrt(n)
    return (1.0 - r) * (1.0 + r)


def t_from_tstar(tstar: float, n: int) -> float:
    root_n = math.sqrt(n)
    if abs(tstar) > root_n:
        raise DomainError(f"|t*| = {abs(tstar)} exceeds sqrt(n) = {root_n}")
    denom = _one_minus_sq_ratio(tstar, n)
    if denom <= 0.0:
        return math.copysign(math.inf, tstar)
    return tstar / math.sqrt(denom)


def tstar_from_t(t: float, n: int) -> float:
    if math.isinf(t):
        return math.copysign(math.sqrt(n), t)
    if math.isnan(t):
        raise DomainError("t must not be NaN")
    # t / sqrt(1 + t^2/n), arranged to avoid overflow of t^2
    a = abs(t)
    root_n = math.sqrt(n)
    if a > root_n:
        return math.copysign(root_n / math.sqrt(1.0 + n / (a * a)), t)
    return t / math.sqrt(1.0 + t * t / n)


Direction = Literal["t-to-tstar", "tstar-to-t"]


def tail_threshold_map(x: float, n: int, direction: Direction) -> float:
    """Threshold transform that preserves upper-tail events between t and t*.

    ``{t >= x} = {t* >= x / sqrt(1 + x^2/n)}`` and
    ``{t* >= y} = {t >= y / sqrt(1 - y^2/n)}`` for x >= 0, 0 <= y <= sqrt(n).
    """
    if not x >= 0:
        raise DomainError(f"threshold must be nonnegative, got {x}")
    if direction == "t-to-tstar":
        return tstar_from_t(x, n)
    if direction == "tstar-to-t":
        if x > math.sqrt(n):
            raise DomainError(f"t* threshold {x} exceeds sqrt(n)")
        return t_from_tstar(x, n)
    raise DomainError(f"unknown direction {direction!r}")
