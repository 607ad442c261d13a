import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from gttest.errors import DomainError
from gttest.laws import (
    DiscreteLaw,
    binomial_logpmf,
    binomial_pmf,
    poisson_pmf,
    poisson_table,
    stirlerr,
    total_variation,
)


def test_stirlerr_matches_high_precision_definition():
    mp.mp.dps = 40
    for n in [0.5, 1, 3, 7.5, 15, 16, 50, 500, 1e5]:
        m = mp.mpf(n)
        direct = mp.loggamma(m + 1) - (m + 0.5) * mp.log(m) + m - 0.5 * mp.log(2 * mp.pi)
        assert float(stirlerr(n)) == pytest.approx(float(direct), rel=1e-12, abs=1e-16)


@pytest.mark.parametrize("n", [1, 2, 9, 100, 1000, 100_000])
@pytest.mark.parametrize("p", [1e-5, 0.01, 0.3, 0.5])
def test_binomial_against_scipy(n, p):
    k = np.arange(n + 1)
    ours = binomial_pmf(n, p)
    ref = stats.binom.pmf(k, n, p)
    big = ref > 1e-300
    np.testing.assert_allclose(ours[big], ref[big], rtol=1e-9)
    assert math.fsum(ours.tolist()) == pytest.approx(1.0, abs=1e-12)


def test_binomial_small_exact():
    assert binomial_pmf(2, 0.5).tolist() == pytest.approx([0.25, 0.5, 0.25], abs=1e-15)
    assert binomial_pmf(100, 0.01, 0) == pytest.approx(0.99**100, rel=1e-14)
    assert binomial_pmf(10, 0.3, 3) == pytest.approx(math.comb(10, 3) * 0.3**3 * 0.7**7, rel=1e-13)
    assert binomial_logpmf(5, 0.2, 6) == -math.inf


def test_poisson_values():
    assert poisson_pmf(1.0, 0) == pytest.approx(math.exp(-1), rel=1e-15)
    assert poisson_pmf(1.0, 2) == pytest.approx(math.exp(-1) / 2, rel=1e-14)
    k = np.arange(400)
    np.testing.assert_allclose(poisson_pmf(150.0, k), stats.poisson.pmf(k, 150.0), rtol=1e-10, atol=1e-300)


@pytest.mark.parametrize("lam", [1e-4, 0.5, 1.0, 7.3, 250.0])
def test_poisson_table_tail(lam):
    pmf, tail = poisson_table(lam, 1e-12)
    assert tail <= 1e-12
    assert math.fsum(pmf.tolist()) + tail == pytest.approx(1.0, abs=1e-13)
    assert tail == pytest.approx(stats.poisson.sf(pmf.size - 1, lam), abs=1e-15)


def test_discrete_law_validation():
    with pytest.raises(DomainError):
        DiscreteLaw(np.array([1.0, 2.0]), np.array([0.5, 0.5]))  # not decreasing
    with pytest.raises(DomainError):
        DiscreteLaw(np.array([2.0, 1.0]), np.array([0.5, 0.4]))  # mass 0.9
    d = DiscreteLaw(np.array([2.0, 1.0]), np.array([0.5, 0.4]), tail_mass=0.1)
    assert d.missing_mass == pytest.approx(0.1)
    with pytest.raises(ValueError):
        d.probs[0] = 1.0


def test_discrete_law_queries():
    d = DiscreteLaw(np.array([3.0, 1.0, -1.0]), np.array([0.2, 0.3, 0.4]), tail_mass=0.1)
    assert d.prob_ge(1.0) == pytest.approx(0.5)
    assert d.prob_gt(1.0) == pytest.approx(0.2)
    assert d.prob_lt(1.0) == pytest.approx(0.5)
    assert d.prob_le(1.0) == pytest.approx(0.8)
    assert d.prob_lt(0.0) == pytest.approx(0.5)
    assert d.prob_lt(-1.0) == pytest.approx(0.0)


def test_from_atoms_merges():
    d = DiscreteLaw.from_atoms([(1.0, 0.25), (2.0, 0.5), (1.0, 0.25)])
    assert d.atoms() == [(2.0, 0.5), (1.0, 0.5)]


def test_moments_and_pushforward():
    d = DiscreteLaw(np.array([1.0, -1.0]), np.array([0.5, 0.5]))
    assert d.moments() == pytest.approx((0.0, 1.0))
    neg = d.pushforward(lambda v: -v)
    assert neg.atoms() == [(1.0, 0.5), (-1.0, 0.5)]
    shifted = DiscreteLaw(np.array([1.0, -1.0]), np.array([0.5, 0.4]), tail_mass=0.1).pushforward(lambda v: v + 1)
    assert shifted.tail_mass == pytest.approx(0.1)
    flipped = DiscreteLaw(np.array([1.0, -1.0]), np.array([0.5, 0.4]), tail_mass=0.1).pushforward(lambda v: -v)
    assert flipped.defect == pytest.approx(0.1) and flipped.tail_mass == 0.0


def test_sample_reproducible():
    d = DiscreteLaw(np.array([1.0, -1.0]), np.array([0.3, 0.7]))
    a = d.sample(np.random.default_rng(5), 1000)
    b = d.sample(np.random.default_rng(5), 1000)
    assert np.array_equal(a, b)
    assert set(np.unique(a)) <= {1.0, -1.0}


probs = st.lists(st.floats(0.01, 1.0), min_size=1, max_size=8)


@settings(max_examples=100)
@given(probs, probs)
def test_total_variation_symmetric_and_bounded(pa, pb):
    a = DiscreteLaw(np.arange(len(pa), 0, -1, dtype=float), np.array(pa) / sum(pa))
    b = DiscreteLaw(np.arange(len(pb), 0, -1, dtype=float) - 0.5 * (len(pb) % 2), np.array(pb) / sum(pb))
    tv = total_variation(a, b)
    assert tv == pytest.approx(total_variation(b, a), abs=1e-15)
    assert -1e-15 <= tv <= 1 + 1e-15
    assert total_variation(a, a) == pytest.approx(0.0, abs=1e-15)
