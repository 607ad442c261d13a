"""Z-test, classical T-test, type-II error, and the generalised T-test.

The generalised test first scores every configured approximating law by an
explicit accuracy bound, keeps the best one, and refuses to decide
(``not_applicable``) if even the best bound is not below the user's threshold.
Decisions are made on the bounded statistic t*; thresholds stated for t are
mapped through the monotone t <-> t* correspondence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

from . import bounds
from .bounds import AccuracyReport, CandidateApprox, Normal, PoissonY, StudentT
from .errors import ConfigurationError, DegenerateSampleError, DomainError, UndefinedStatisticError
from .poisson_limit import PoissonYLaw, discrete_critical_values, y_law
from .special import std_normal_sf, std_normal_sf_inv, student_t_sf_inv
from .statistic import SampleLike, as_sample, sample_moments, self_normalized_sum, tstar_from_t

Sidedness = Literal["two", "one"]
Outcome = Literal["accept_H0", "reject_H0", "not_applicable"]
Alternative = Literal["two_sided", "simple", "less", "greater"]

CANDIDATE_KINDS = ("normal", "student_t", "poisson_y")


@dataclass(frozen=True)
class Hypotheses:
    """H0: E X = a against the stated alternative (``b`` only for ``simple``)."""

    a: float
    alternative: Alternative = "two_sided"
    b: float | None = None

    def __post_init__(self):
        if self.alternative not in ("two_sided", "simple", "less", "greater"):
            raise ConfigurationError(f"unknown alternative {self.alternative!r}")
        if self.alternative == "simple":
            if self.b is None or self.b == self.a:
                raise ConfigurationError("a simple alternative needs b != a")

    @property
    def direction(self) -> Literal["two_sided", "less", "greater"]:
        if self.alternative == "simple":
            return "greater" if self.b > self.a else "less"
        return self.alternative

    @property
    def sidedness(self) -> Sidedness:
        return "two" if self.direction == "two_sided" else "one"


@dataclass(frozen=True)
class TestConfig:
    level: float = 0.05
    applicability_threshold: float = 0.01
    candidates: Sequence[str] = CANDIDATE_KINDS
    sigma_known: float | None = None
    df_convention: Literal["n_minus_1", "n"] = "n_minus_1"
    sub_asymptotic: bool = False
    c_star: float = bounds.DEFAULT_C_STAR
    tail_tolerance: float = 1e-12

    __test__ = False  # not a pytest class

    def __post_init__(self):
        if not 0.0 < self.level < 1.0:
            raise ConfigurationError(f"level must lie in (0, 1), got {self.level}")
        if not 0.0 < self.applicability_threshold < 1.0:
            raise ConfigurationError(
                f"applicability threshold must lie in (0, 1), got {self.applicability_threshold}"
            )
        unknown = set(self.candidates) - set(CANDIDATE_KINDS)
        if unknown:
            raise ConfigurationError(f"unknown candidate kinds: {sorted(unknown)}")
        if self.sigma_known is not None and not self.sigma_known > 0:
            raise ConfigurationError("sigma_known must be positive")
        if self.df_convention not in ("n_minus_1", "n"):
            raise ConfigurationError(f"unknown df convention {self.df_convention!r}")


@dataclass(frozen=True)
class CriticalRegion:
    """Acceptance region ``[accept_lower, accept_upper]`` of ``statistic``; None means unbounded."""

    statistic: str
    accept_lower: float | None
    accept_upper: float | None

    def accepts(self, value: float) -> bool:
        if self.accept_lower is not None and value < self.accept_lower:
            return False
        if self.accept_upper is not None and value > self.accept_upper:
            return False
        return True

    def to_dict(self) -> dict:
        return {"statistic": self.statistic, "accept": [self.accept_lower, self.accept_upper]}


@dataclass(frozen=True)
class TestDecision:
    outcome: Outcome
    statistic_value: float
    statistic_name: str
    critical_region: CriticalRegion | None = None
    chosen_candidate: CandidateApprox | None = None
    accuracy_report: AccuracyReport | None = None
    reports: tuple[AccuracyReport, ...] = ()
    level: float | None = None
    notes: list[str] = field(default_factory=list)

    __test__ = False

    def to_dict(self) -> dict:
        """JSON-ready mapping; infinite statistics are written as the strings "inf"/"-inf"."""
        return {
            "outcome": self.outcome,
            "statistic": _json_number(self.statistic_value),
            "statistic_name": self.statistic_name,
            "critical_region": None if self.critical_region is None else self.critical_region.to_dict(),
            "candidate": None if self.chosen_candidate is None else self.chosen_candidate.describe(),
            "r_n": None if self.accuracy_report is None else self.accuracy_report.r_n,
            "level": self.level,
            "reports": [
                {"candidate": r.candidate.describe(), "r_n": r.r_n, "inputs": r.inputs}
                for r in self.reports
            ],
            "notes": "; ".join(self.notes),
        }


def _json_number(x: float):
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


# -- classical tests ----------------------------------------------------------


def z_critical_value(level: float, sidedness: Sidedness = "two") -> float:
    if not 0.0 < level < 1.0:
        raise DomainError(f"level must lie in (0, 1), got {level}")
    if sidedness == "two":
        return std_normal_sf_inv(level / 2)
    if sidedness == "one":
        return std_normal_sf_inv(level)
    raise DomainError(f"unknown sidedness {sidedness!r}")


def _mean_region(h: Hypotheses, c: float, scale: float, n: int) -> CriticalRegion:
    half = c * scale / math.sqrt(n)
    lo, hi = h.a - half, h.a + half
    if h.direction == "greater":
        lo = None
    elif h.direction == "less":
        hi = None
    return CriticalRegion("mean", lo, hi)


def z_test(s: SampleLike, h: Hypotheses, cfg: TestConfig) -> TestDecision:
    """Known-variance test; accepts on the closed region ``a -/+ c sigma/sqrt(n)``."""
    if cfg.sigma_known is None:
        raise ConfigurationError("the Z-test needs sigma_known")
    s = as_sample(s)
    mean = float(s.values.mean())
    c = z_critical_value(cfg.level, h.sidedness)
    region = _mean_region(h, c, cfg.sigma_known, s.n)
    zeta = (mean - h.a) * math.sqrt(s.n) / cfg.sigma_known
    return TestDecision(
        outcome="accept_H0" if region.accepts(mean) else "reject_H0",
        statistic_value=zeta,
        statistic_name="zeta",
        critical_region=region,
        chosen_candidate=Normal(),
        level=cfg.level,
        notes=[f"critical value c = {c!r}"],
    )


def t_test_classical(
    s: SampleLike,
    h: Hypotheses,
    level: float,
    df_convention: Literal["n_minus_1", "n"] = "n_minus_1",
    scale: Literal["hat", "tilde"] = "hat",
) -> TestDecision:
    """Student-quantile test on the mean with the plug-in (``hat``) or unbiased (``tilde``) scale."""
    s = as_sample(s)
    m = sample_moments(s)
    sigma = m.sigma_hat if scale == "hat" else m.sigma_tilde
    if sigma == 0.0:
        raise UndefinedStatisticError("degenerate sample: the scale estimate is zero")
    df = s.n - 1 if df_convention == "n_minus_1" else s.n
    tail = level / 2 if h.sidedness == "two" else level
    c = student_t_sf_inv(df, tail)
    region = _mean_region(h, c, sigma, s.n)
    t = (m.mean - h.a) * math.sqrt(s.n) / sigma
    return TestDecision(
        outcome="accept_H0" if region.accepts(m.mean) else "reject_H0",
        statistic_value=t,
        statistic_name="t" if scale == "hat" else "t_tilde",
        critical_region=region,
        chosen_candidate=StudentT(df),
        level=level,
        notes=[f"critical value c = {c!r} from Student df = {df}"],
    )


def type2_error_normal(delta: float, n: int, level: float, sidedness: Sidedness = "two") -> float:
    """Type-II error under the normal surrogate for zeta, with ``delta = (a - b)/sigma``."""
    c = z_critical_value(level, sidedness)
    shift = delta * math.sqrt(n)
    if sidedness == "two":
        return max(0.0, std_normal_sf(shift - c) - std_normal_sf(shift + c))
    return std_normal_sf(shift - c)


# -- generalised test ---------------------------------------------------------


def _build_reports(s, m, cfg: TestConfig, notes: list[str]) -> list[AccuracyReport]:
    n = m.n
    reports = []
    for kind in cfg.candidates:
        if kind == "normal":
            reports.append(bounds.normal_bound_cor2(m, n))
        elif kind == "student_t":
            df = n - 1 if cfg.df_convention == "n_minus_1" else n
            reports.append(bounds.student_bound(m, n, df=df, c_star=cfg.c_star))
        elif kind == "poisson_y":
            p_hat = bounds.estimate_p_hat(s)
            if p_hat is None:
                notes.append("poisson_y not offered: the sample is not two-valued with a rare low atom")
            else:
                reports.append(bounds.poisson_y_bound(n, p_hat))
    return reports


def _tstar_region(
    chosen: AccuracyReport, h: Hypotheses, n: int, level: float, cfg: TestConfig
) -> CriticalRegion:
    cand = chosen.candidate
    direction = h.direction
    if isinstance(cand, PoissonY):
        d = y_law(PoissonYLaw(cand.n, cand.p_hat), cfg.tail_tolerance)
        upper = level / 2 if direction == "two_sided" else (level if direction == "greater" else 0.0)
        lower = level / 2 if direction == "two_sided" else (level if direction == "less" else 0.0)
        cv = discrete_critical_values(d, upper, lower)
        lo = None if direction == "greater" else cv.c_minus
        hi = None if direction == "less" else cv.c_plus
        return CriticalRegion("t_star", lo, hi)
    tail = level / 2 if direction == "two_sided" else level
    if isinstance(cand, StudentT):
        c = student_t_sf_inv(cand.df, tail)
    else:
        c = std_normal_sf_inv(tail)
    c_star = tstar_from_t(c, n)
    lo = None if direction == "greater" else -c_star
    hi = None if direction == "less" else c_star
    return CriticalRegion("t_star", lo, hi)


def generalized_t_test(s: SampleLike, h: Hypotheses, cfg: TestConfig) -> TestDecision:
    """Score candidates, pick the best-justified one, then decide on t* (or decline)."""
    if not cfg.candidates:
        raise ConfigurationError("the candidate list is empty")
    s = as_sample(s)
    m = sample_moments(s)
    if m.sigma_hat == 0.0:
        raise DegenerateSampleError("constant sample: accuracy bounds are undefined")
    tstar = self_normalized_sum(s, h.a)
    notes: list[str] = []
    reports = _build_reports(s, m, cfg, notes)

    if not reports:
        notes.append("no candidate approximation is available for this sample")
        return TestDecision("not_applicable", tstar, "t_star", level=cfg.level, notes=notes)

    best = bounds.select_candidate(reports)
    if not bounds.applicability(best, cfg.applicability_threshold):
        notes.append(
            f"smallest accuracy bound {best.r_n:.6g} ({best.candidate.kind}) is not below the "
            f"threshold {cfg.applicability_threshold:g}: the sample is too small or the "
            "candidate list too short"
        )
        return TestDecision(
            "not_applicable", tstar, "t_star", reports=tuple(reports), level=cfg.level, notes=notes
        )

    level = cfg.level
    if cfg.sub_asymptotic:
        level = cfg.level - 2.0 * best.r_n
        if level <= 0.0:
            raise DomainError(
                f"effective level {level:.6g} <= 0: r_n = {best.r_n:.6g} absorbs the whole level"
            )
        notes.append(f"sub-asymptotic level {level:.6g}")

    region = _tstar_region(best, h, s.n, level, cfg)
    return TestDecision(
        outcome="accept_H0" if region.accepts(tstar) else "reject_H0",
        statistic_value=tstar,
        statistic_name="t_star",
        critical_region=region,
        chosen_candidate=best.candidate,
        accuracy_report=best,
        reports=tuple(reports),
        level=level,
        notes=notes,
    )
