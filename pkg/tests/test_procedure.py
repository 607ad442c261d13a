import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gttest.bounds import Normal, PoissonY, StudentT
from gttest.errors import ConfigurationError, DegenerateSampleError, DomainError, UndefinedStatisticError
from gttest.laws import binomial_pmf
from gttest.procedure import (
    CriticalRegion,
    Hypotheses,
    TestConfig,
    generalized_t_test,
    t_test_classical,
    type2_error_normal,
    z_critical_value,
    z_test,
)
from gttest.special import std_normal_sf
from gttest.two_point import TwoPointLaw, exact_tstar_law, sample_two_point
from oracles import quantile_by_bisection, scipy_normal_sf


@pytest.fixture
def uniform200():
    rng = np.random.default_rng(20240601)
    return rng.uniform(-math.sqrt(3), math.sqrt(3), 200)


@pytest.fixture
def two_point200():
    return sample_two_point(TwoPointLaw(200, 1 / 200), 0, 200)


def test_hypotheses():
    assert Hypotheses(0.0).sidedness == "two"
    assert Hypotheses(0.0, "simple", 1.0).direction == "greater"
    assert Hypotheses(0.0, "simple", -1.0).direction == "less"
    with pytest.raises(ConfigurationError):
        Hypotheses(0.0, "simple", 0.0)
    with pytest.raises(ConfigurationError):
        Hypotheses(0.0, "sideways")


def test_config_validation():
    for kw in [dict(level=0.0), dict(level=1.0), dict(applicability_threshold=1.5), dict(candidates=("x",)), dict(sigma_known=-1.0)]:
        with pytest.raises(ConfigurationError):
            TestConfig(**kw)


def test_z_critical_values():
    assert z_critical_value(0.05, "two") == pytest.approx(1.959963984540054, abs=1e-12)
    assert z_critical_value(0.05, "one") == pytest.approx(quantile_by_bisection(scipy_normal_sf, 0.05), abs=1e-12)
    assert z_critical_value(1 - 1e-12, "two") == pytest.approx(0.0, abs=1e-11)
    with pytest.raises(DomainError):
        z_critical_value(1.0)


class TestZ:
    cfg = TestConfig(level=0.05, sigma_known=2.0)

    def test_center_and_outside(self):
        c = z_critical_value(0.05)
        n = 16
        at_a = np.full(n, 3.0)
        assert z_test(at_a, Hypotheses(3.0), self.cfg).outcome == "accept_H0"
        far = np.full(n, 3.0 + 2 * c * 2.0 / 4)
        assert z_test(far, Hypotheses(3.0), self.cfg).outcome == "reject_H0"

    def test_boundary_closed(self):
        region = z_test(np.zeros(16), Hypotheses(0.0), self.cfg).critical_region
        assert region.accepts(region.accept_upper)
        assert region.accepts(region.accept_lower)
        assert not region.accepts(np.nextafter(region.accept_upper, np.inf))

    def test_one_sided_direction(self):
        xs = np.full(16, -5.0)
        assert z_test(xs, Hypotheses(0.0, "greater"), self.cfg).outcome == "accept_H0"
        assert z_test(xs, Hypotheses(0.0, "less"), self.cfg).outcome == "reject_H0"
        assert z_test(xs, Hypotheses(0.0, "simple", -1.0), self.cfg).outcome == "reject_H0"

    def test_missing_sigma(self):
        with pytest.raises(ConfigurationError):
            z_test([1.0, 2.0], Hypotheses(0.0), TestConfig())


class TestClassicalT:
    def test_center(self):
        assert t_test_classical([1.0, -1.0, 2.0, -2.0], Hypotheses(0.0), 0.05).outcome == "accept_H0"

    def test_heavy_tailed_rejects(self):
        # |t| = 10 exceeds the df = 4 quantile 2.776
        base = np.array([-1.0, -0.5, 0.0, 0.5, 1.0])
        sigma = base.std()
        xs = base + 10 * sigma / math.sqrt(5)
        d = t_test_classical(xs, Hypotheses(0.0), 0.05)
        assert d.statistic_value == pytest.approx(10.0)
        assert d.outcome == "reject_H0"

    def test_agrees_with_z_for_large_n(self):
        rng = np.random.default_rng(3)
        for shift in (0.0, 0.5):
            xs = rng.normal(shift, 1.0, 5000)
            sig = xs.std()
            t = t_test_classical(xs, Hypotheses(0.0), 0.05).outcome
            z = z_test(xs, Hypotheses(0.0), TestConfig(sigma_known=sig)).outcome
            assert t == z

    def test_degenerate(self):
        with pytest.raises(UndefinedStatisticError):
            t_test_classical([2.0, 2.0, 2.0], Hypotheses(0.0), 0.05)

    def test_tilde_scale_widens(self):
        xs = [0.3, -1.2, 2.2, 0.1, 0.9]
        hat = t_test_classical(xs, Hypotheses(0.0), 0.05).critical_region
        tilde = t_test_classical(xs, Hypotheses(0.0), 0.05, scale="tilde").critical_region
        assert tilde.accept_upper > hat.accept_upper


def test_type2():
    assert type2_error_normal(0.0, 50, 0.05, "two") == pytest.approx(0.95, abs=1e-12)
    expected = scipy_normal_sf(3 - 1.6448536269514722)
    assert type2_error_normal(0.3, 100, 0.05, "one") == pytest.approx(expected, abs=1e-12)
    assert type2_error_normal(0.3, 100, 0.05, "one") == pytest.approx(0.0877, abs=1e-4)
    assert type2_error_normal(5.0, 400, 0.05) < 1e-300


class TestGeneralized:
    def test_uniform_selects_normal(self, uniform200):
        d = generalized_t_test(uniform200, Hypotheses(0.0), TestConfig(applicability_threshold=0.8))
        assert isinstance(d.chosen_candidate, Normal)
        assert d.outcome == "accept_H0"
        # standardized uniform: mu3/sigma^3 = 3 sqrt(3)/4, mu1/sigma = sqrt(3)/2
        population = (6.4 * 3 * math.sqrt(3) / 4 + 2 * math.sqrt(3) / 2) / math.sqrt(200)
        assert d.accuracy_report.r_n == pytest.approx(population, rel=0.05)
        assert "poisson_y not offered" in " ".join(d.notes)

    def test_two_point_selects_poisson_y(self, two_point200):
        d = generalized_t_test(two_point200, Hypotheses(0.0), TestConfig())
        assert isinstance(d.chosen_candidate, PoissonY)
        assert d.accuracy_report.r_n < 0.01
        reports = {r.candidate.kind: r.r_n for r in d.reports}
        assert reports["normal"] == pytest.approx(6.4, abs=0.1)
        lo, hi = d.critical_region.accept_lower, d.critical_region.accept_upper
        assert hi == pytest.approx(math.sqrt(200))
        assert lo != -hi

    def test_unreachable_threshold(self, uniform200, two_point200):
        for s in (uniform200, two_point200):
            d = generalized_t_test(s, Hypotheses(0.0), TestConfig(applicability_threshold=1e-6))
            assert d.outcome == "not_applicable"
            assert d.chosen_candidate is None
            assert min(r.r_n for r in d.reports) >= 1e-6
            assert "threshold" in d.to_dict()["notes"]

    def test_errors(self):
        with pytest.raises(DegenerateSampleError):
            generalized_t_test([1.0] * 10, Hypotheses(0.0), TestConfig())
        with pytest.raises(ConfigurationError):
            generalized_t_test([1.0, 2.0], Hypotheses(0.0), TestConfig(candidates=()))

    def test_only_poisson_on_continuous_sample(self, uniform200):
        d = generalized_t_test(uniform200, Hypotheses(0.0), TestConfig(candidates=("poisson_y",)))
        assert d.outcome == "not_applicable"
        assert d.reports == ()

    def test_symmetric_region_for_normal(self, uniform200):
        d = generalized_t_test(uniform200, Hypotheses(0.0), TestConfig(applicability_threshold=0.8))
        r = d.critical_region
        assert r.accept_lower == -r.accept_upper
        assert r.accept_upper == pytest.approx(1.96 / math.sqrt(1 + 1.96**2 / 200), rel=1e-3)

    def test_rejects_shifted_sample(self, uniform200):
        d = generalized_t_test(uniform200 + 1.0, Hypotheses(0.0), TestConfig(applicability_threshold=0.8))
        assert d.outcome == "reject_H0"

    def test_student_candidate_region(self, uniform200):
        cfg = TestConfig(applicability_threshold=0.8, candidates=("student_t",))
        d = generalized_t_test(uniform200, Hypotheses(0.0), cfg)
        assert isinstance(d.chosen_candidate, StudentT)
        assert d.chosen_candidate.df == 199

    def test_sub_asymptotic(self, two_point200):
        base = generalized_t_test(two_point200, Hypotheses(0.0), TestConfig())
        sub = generalized_t_test(two_point200, Hypotheses(0.0), TestConfig(sub_asymptotic=True))
        assert sub.level == pytest.approx(0.05 - 2 * base.accuracy_report.r_n)
        with pytest.raises(DomainError):
            generalized_t_test(two_point200, Hypotheses(0.0), TestConfig(level=0.002, sub_asymptotic=True))

    def test_json_fields(self, two_point200):
        d = generalized_t_test(two_point200, Hypotheses(0.0), TestConfig()).to_dict()
        for key in ("outcome", "statistic", "critical_region", "candidate", "r_n", "notes"):
            assert key in d
        assert d["candidate"]["kind"] == "poisson_y"


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 100), st.integers(0, 2**31 - 1))
def test_decision_scale_invariant(lam, seed):
    rng = np.random.default_rng(seed)
    xs = rng.exponential(1.0, 300) - 1.0
    cfg = TestConfig(applicability_threshold=0.9)
    d1 = generalized_t_test(xs, Hypotheses(0.05), cfg)
    d2 = generalized_t_test(lam * xs, Hypotheses(0.05 * lam), cfg)
    assert d1.outcome == d2.outcome
    assert d1.statistic_value == pytest.approx(d2.statistic_value, rel=1e-9, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1), st.floats(0.05, 0.95), st.floats(0.05, 0.95))
def test_not_applicable_monotone_in_threshold(seed, t1, t2):
    lo, hi = sorted((t1, t2))
    xs = np.random.default_rng(seed).uniform(-1, 1, 150)
    d_hi = generalized_t_test(xs, Hypotheses(0.0), TestConfig(applicability_threshold=hi))
    d_lo = generalized_t_test(xs, Hypotheses(0.0), TestConfig(applicability_threshold=lo))
    if d_hi.outcome == "not_applicable":
        assert d_lo.outcome == "not_applicable"


def _exact_rejection(n, p, region: CriticalRegion):
    d = exact_tstar_law(TwoPointLaw(n, p))
    return math.fsum(pr for v, pr in d.atoms() if not region.accepts(v))


@pytest.mark.parametrize("n, k", [(100, 1), (200, 1), (200, 2), (500, 3), (500, 1)])
def test_level_guarantee_under_two_point(n, k):
    # sample with exactly k low atoms, so p_hat = k/n and H0 (mean 0) holds for the matching law
    law = TwoPointLaw(n, k / n)
    xs = [law.low] * k + [law.high] * (n - k)
    d = generalized_t_test(xs, Hypotheses(0.0), TestConfig(level=0.05, applicability_threshold=0.05))
    assert isinstance(d.chosen_candidate, PoissonY)
    rejection = _exact_rejection(n, k / n, d.critical_region)
    assert rejection <= 0.05 + 2 * d.accuracy_report.r_n
