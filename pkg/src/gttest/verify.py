"""Exact-enumeration checks of the non-uniformity lower bounds.

Under the two-point law every tail ``P(t* >= x)`` is a binomial cdf value, so
the ratios ``P(t* >= x) / Phi_c(x)`` and ``P(t* >= x) / Psi_n^c(x)`` can be
computed exactly and compared with the closed-form lower bounds:

* small x (0 <= x <= 1): p is tuned so the second-largest atom of t* is x;
* large x (1 <= x <= sqrt(n)): p = 1/n, and the top atom sqrt(n) alone
  carries mass (1 - 1/n)^n.

Monte Carlo estimates from simulated samples serve as an independent check of
the enumeration.
"""

from __future__ import annotations

import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Literal, NamedTuple, Union

import numpy as np
from scipy.special import log_ndtr

from .errors import DomainError
from .special import DEFAULT_QUADRATURE, std_normal_sf, student_t_constant, student_t_sf
from .two_point import (
    MixtureLaw,
    TwoPointLaw,
    adversarial_p,
    draw_mixture,
    draw_two_point,
    exact_tstar_law,
    tstar_tail_exact,
)

Regime = Literal["auto", "small", "large"]

LARGE_X_GAP = math.sqrt(2.0 * math.pi) / math.exp(0.75) - 1.0  # ~0.18403
SMALL_X_FLOOR = 1.01  # holds for n > 12
ARITH_TOL = 1e-10
SNAP_RTOL = 1e-12


@dataclass(frozen=True)
class RatioRecord:
    """One exact tail ratio together with the bounds it is checked against.

    For the normal reference, ``bound_form_a`` and ``bound_form_b`` are the two
    readings of the small-x constant: ``1.25 exp(-1/(2(n-2)))`` and
    ``1.25 exp(-2/(n(1-2/n)^2))``.  For the Student reference both equal the
    asymptotic constant 1.25.  ``proof_bound`` is the explicit large-x lower
    bound on the ratio (NaN in the small-x regime).
    """

    theorem: int
    regime: str
    n: int
    x: float
    p_used: float
    exact_tail: float
    reference_tail: float
    ratio: float
    bound_form_a: float
    bound_form_b: float
    proof_bound: float = math.nan

    def as_row(self) -> dict:
        return asdict(self)


def small_x_grid() -> np.ndarray:
    """[0, 1] in steps of 0.05."""
    return np.round(np.linspace(0.0, 1.0, 21), 12)


def large_x_grid(n: int, count: int = 20) -> np.ndarray:
    """``count`` log-spaced points on [1, sqrt(n)]."""
    return np.geomspace(1.0, math.sqrt(n), count)


def bound_form_a(n: int) -> float:
    return 1.25 * math.exp(-1.0 / (2.0 * (n - 2)))


def bound_form_b(n: int) -> float:
    return 1.25 * math.exp(-2.0 / (n * (1.0 - 2.0 / n) ** 2))


def _check_args(n: int, x: float) -> None:
    if int(n) != n or n <= 3:
        raise DomainError(f"n must be an integer > 3, got {n}")
    if not 0.0 <= x <= math.sqrt(n) * (1 + SNAP_RTOL):
        raise DomainError(f"x must lie in [0, sqrt(n)], got {x}")


def _resolve_regime(x: float, regime: Regime) -> str:
    if regime == "auto":
        return "small" if x <= 1.0 else "large"
    if regime == "small" and x > 1.0:
        raise DomainError("the small-x construction needs x <= 1")
    if regime == "large" and x < 1.0:
        raise DomainError("the large-x construction needs x >= 1")
    return regime


def _snap(law: TwoPointLaw, x: float) -> float:
    """Replace x by an atom of t* lying within relative 1e-12 below it, if any."""
    values = exact_tstar_law(law).values
    close = values[(values <= x) & (x - values <= SNAP_RTOL * max(1.0, abs(x)))]
    return float(close[0]) if close.size else x


def _adversarial_tail(n: int, x: float, regime: str) -> tuple[float, float]:
    p = adversarial_p(x, n) if regime == "small" else 1.0 / n
    law = TwoPointLaw(n, p)
    return p, tstar_tail_exact(law, _snap(law, x))


def _ratio(exact: float, log_reference: float) -> float:
    if exact == 0.0:
        return 0.0
    log_ratio = math.log(exact) - log_reference
    return math.exp(log_ratio) if log_ratio < 709.0 else math.inf


def theorem1_ratio(n: int, x: float, regime: Regime = "auto") -> RatioRecord:
    """Exact ``P(t* >= x) / Phi_c(x)`` under the adversarial two-point law."""
    _check_args(n, x)
    regime = _resolve_regime(x, regime)
    p, exact = _adversarial_tail(n, x, regime)
    log_ref = float(log_ndtr(-x))
    proof = math.nan
    if regime == "large":
        # (sqrt(2 pi)/e) x exp(x^2/2 - 1/(2(n-2)))
        log_proof = 0.5 * math.log(2 * math.pi) - 1.0 + math.log(x) + 0.5 * x * x - 1.0 / (2 * (n - 2))
        proof = math.exp(log_proof) if log_proof < 709.0 else math.inf
    return RatioRecord(
        theorem=1,
        regime=regime,
        n=int(n),
        x=float(x),
        p_used=p,
        exact_tail=exact,
        reference_tail=std_normal_sf(x),
        ratio=_ratio(exact, log_ref),
        bound_form_a=bound_form_a(n),
        bound_form_b=bound_form_b(n),
        proof_bound=proof,
    )


def student_proof_bound(n: int, x: float) -> float:
    """``(1 - 1/n)^(n+1) x (1 + x^2/n)^((n-1)/2) / C_n``, the large-x lower bound vs Student."""
    log_b = (
        (n + 1) * math.log1p(-1.0 / n)
        + math.log(x)
        + 0.5 * (n - 1) * math.log1p(x * x / n)
        - math.log(student_t_constant(n))
    )
    return math.exp(log_b) if log_b < 709.0 else math.inf


def theorem2_ratio(n: int, x: float, regime: Regime = "auto", cfg=DEFAULT_QUADRATURE) -> RatioRecord:
    """Exact ``P(t* >= x) / Psi_n^c(x)`` with the Student tail from quadrature."""
    _check_args(n, x)
    regime = _resolve_regime(x, regime)
    p, exact = _adversarial_tail(n, x, regime)
    ref = student_t_sf(n, x, cfg)
    ratio = _ratio(exact, math.log(ref)) if ref > 0 else math.inf
    return RatioRecord(
        theorem=2,
        regime=regime,
        n=int(n),
        x=float(x),
        p_used=p,
        exact_tail=exact,
        reference_tail=ref,
        ratio=ratio,
        bound_form_a=1.25,
        bound_form_b=1.25,
        proof_bound=student_proof_bound(n, x) if regime == "large" else math.nan,
    )


# -- divergence ---------------------------------------------------------------

XRule = Union[Callable[[int], float], str, float]

_POWER_RULE = re.compile(r"^\s*n\s*(?:\^|\*\*)\s*\(?\s*([0-9.]+)(?:\s*/\s*([0-9.]+))?\s*\)?\s*$")


def parse_x_rule(rule: XRule) -> Callable[[int], float]:
    """Accept a callable, a constant, or a power rule written ``"n^0.25"`` / ``"n^(1/4)"``."""
    if callable(rule):
        return rule
    if isinstance(rule, (int, float)):
        return lambda n, c=float(rule): c
    m = _POWER_RULE.match(rule)
    if m:
        a = float(m.group(1)) / (float(m.group(2)) if m.group(2) else 1.0)
        return lambda n, a=a: float(n) ** a
    try:
        c = float(rule)
    except ValueError:
        raise DomainError(f"cannot parse x rule {rule!r}") from None
    return lambda n: c


def theorem1_divergence(n_list: Iterable[int], x_rule: XRule = "n^0.25") -> list[RatioRecord]:
    """Large-x ratios along ``x_n = x_rule(n)`` with p = 1/n."""
    f = parse_x_rule(x_rule)
    out = []
    for n in n_list:
        x = f(n)
        if not 1.0 <= x <= math.sqrt(n):
            raise DomainError(f"x_rule gives x = {x} outside [1, sqrt(n)] at n = {n}")
        out.append(theorem1_ratio(n, x, regime="large"))
    return out


def is_divergent(records: list[RatioRecord], level: float = 10.0) -> bool:
    """True when the ratios strictly increase and the last one exceeds ``level``."""
    ratios = [r.ratio for r in records]
    increasing = all(b > a for a, b in zip(ratios, ratios[1:]))
    return bool(ratios) and increasing and ratios[-1] > level


# -- grid verification --------------------------------------------------------


@dataclass
class VerificationReport:
    records: list[RatioRecord]
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def _theorem1_for_n(n: int, large_count: int) -> tuple[list[RatioRecord], list[str]]:
    records, failures = [], []
    form_b = bound_form_b(n)
    for x in small_x_grid():
        r = theorem1_ratio(n, float(x), regime="small")
        records.append(r)
        if not r.ratio >= form_b - ARITH_TOL:
            failures.append(f"theorem 1, n={n}, x={x:.4g}: ratio {r.ratio:.6g} < {form_b:.6g}")
        if n > 12 and not r.ratio > SMALL_X_FLOOR:
            failures.append(f"theorem 1, n={n}, x={x:.4g}: ratio {r.ratio:.6g} <= {SMALL_X_FLOOR}")
    for x in large_x_grid(n, large_count):
        r = theorem1_ratio(n, float(x), regime="large")
        records.append(r)
        if not r.ratio - 1.0 >= LARGE_X_GAP - ARITH_TOL:
            failures.append(f"theorem 1, n={n}, x={x:.4g}: ratio - 1 = {r.ratio - 1:.6g} < {LARGE_X_GAP:.6g}")
    return records, failures


def _theorem2_for_n(n: int, large_count: int, drift: float) -> tuple[list[RatioRecord], list[str]]:
    records, failures = [], []
    for x in small_x_grid():
        records.append(theorem2_ratio(n, float(x), regime="small"))
    for x in large_x_grid(n, large_count):
        r = theorem2_ratio(n, float(x), regime="large")
        records.append(r)
        if not r.ratio >= r.proof_bound * (1.0 - ARITH_TOL):
            failures.append(f"theorem 2, n={n}, x={x:.4g}: ratio {r.ratio:.6g} < proof bound {r.proof_bound:.6g}")
    gap = min(abs(r.ratio - 1.0) for r in records)
    if not gap >= 0.25 - drift:
        failures.append(f"theorem 2, n={n}: inf |ratio - 1| = {gap:.6g} < {0.25 - drift:.6g}")
    return records, failures


def _run(task, args_list, workers: int):
    if workers <= 1 or len(args_list) <= 1:
        return [task(*a) for a in args_list]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(task, *zip(*args_list)))


def _collect(results) -> VerificationReport:
    records, failures = [], []
    for recs, fails in results:
        records.extend(recs)
        failures.extend(fails)
    records.sort(key=lambda r: (r.n, r.regime != "small", r.x))
    return VerificationReport(records, failures)


def verify_theorem1(n_values: Iterable[int], large_count: int = 20, workers: int = 1) -> VerificationReport:
    n_values = sorted(set(int(n) for n in n_values))
    return _collect(_run(_theorem1_for_n, [(n, large_count) for n in n_values], workers))


def verify_theorem2(
    n_values: Iterable[int], large_count: int = 20, drift: float = 0.05, workers: int = 1
) -> VerificationReport:
    n_values = sorted(set(int(n) for n in n_values))
    return _collect(_run(_theorem2_for_n, [(n, large_count, drift) for n in n_values], workers))


def negative_side_ratio(n: int, x: float, regime: Regime = "auto") -> float:
    """``P(t* <= -x) / Phi(-x)`` for the sign-flipped adversarial sample, by enumeration."""
    _check_args(n, x)
    regime = _resolve_regime(x, regime)
    p = adversarial_p(x, n) if regime == "small" else 1.0 / n
    law = TwoPointLaw(n, p)
    flipped = exact_tstar_law(law).pushforward(lambda v: -v)
    target = -_snap(law, x)
    exact = math.fsum(flipped.probs[flipped.values <= target].tolist())
    return _ratio(exact, float(log_ndtr(-x)))


# -- mixture of the two-point law ---------------------------------------------


def remark2_ratio(n: int, c: float) -> float:
    """Lower bound ``(1 - c/n)^n q^(n-1) (q + np)`` on ``P(t* >= 0)`` for the mixture at p = 1/n.

    Tends to ``2/e^(1+c)``; divide by ``Phi_c(0) = 1/2`` for the ratio bound
    (see :func:`remark2_ratio_bound`).
    """
    if int(n) != n or n < 2:
        raise DomainError(f"n must be an integer >= 2, got {n}")
    if not 0.0 <= c <= n:
        raise DomainError(f"need 0 <= c <= n, got c={c}")
    q = 1.0 - 1.0 / n
    return math.exp(n * math.log1p(-c / n) if c < n else -math.inf) * q ** (n - 1) * (q + 1.0)


def remark2_ratio_bound(n: int, c: float) -> float:
    """Lower bound on ``P(t* >= 0)/Phi_c(0)``; tends to ``4/e^(1+c)``."""
    return remark2_ratio(n, c) / 0.5


# -- Monte Carlo --------------------------------------------------------------


class MonteCarloEstimate(NamedTuple):
    estimate: float
    std_error: float
    trials: int
    hits: int


_CHUNK_ELEMENTS = 2_000_000


def spawn_seeds(master_seed: int, count: int) -> list[int]:
    """Independent per-task seeds derived deterministically from one master seed."""
    children = np.random.SeedSequence(master_seed).spawn(count)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]


def monte_carlo_tail(
    law: TwoPointLaw | MixtureLaw, x: float, trials: int, seed: int, atol: float = 1e-9
) -> MonteCarloEstimate:
    """Empirical ``P(t* >= x)`` from simulated samples of size ``law.n``.

    Each trial draws a full sample and computes t* from its sums, so the
    estimate is independent of the enumeration path.  ``atol`` absorbs
    rounding when ``x`` coincides with an atom of t*.  Results depend only on
    (law, x, trials, seed).
    """
    if trials < 1000:
        raise DomainError(f"need at least 1000 trials, got {trials}")
    n = law.n
    draw = draw_mixture if isinstance(law, MixtureLaw) else draw_two_point
    rng = np.random.default_rng(seed)
    rows = max(1, _CHUNK_ELEMENTS // n)
    hits = 0
    done = 0
    threshold = x - atol * max(1.0, abs(x))
    while done < trials:
        m = min(rows, trials - done)
        sample = draw(law, rng, (m, n))
        s = sample.sum(axis=1)
        t = np.sqrt(np.einsum("ij,ij->i", sample, sample))
        with np.errstate(invalid="ignore", divide="ignore"):
            tstar = s / t
        hits += int(np.count_nonzero(tstar >= threshold))
        done += m
    est = hits / trials
    return MonteCarloEstimate(est, math.sqrt(est * (1.0 - est) / trials), trials, hits)
