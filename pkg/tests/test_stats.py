import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from condproc.stats import EmpiricalDistribution, binomial_se, chi_square_counts, ks_one_sample, ks_two_sample


def test_ks_two_sample_matches_scipy():
    rng = np.random.default_rng(0)
    a, b = rng.normal(size=3000), rng.normal(0.05, 1, size=2000)
    ours = ks_two_sample(a, b)
    ref = stats.ks_2samp(a, b, method="asymp")
    assert ours.statistic == pytest.approx(ref.statistic)
    # scipy evaluates the finite-n distribution at the effective size; ours is the limit law
    assert ours.p_value == pytest.approx(ref.pvalue, rel=0.1)


def test_ks_one_sample_matches_scipy():
    x = np.random.default_rng(1).exponential(size=500)
    ours = ks_one_sample(x, stats.expon.cdf)
    ref = stats.kstest(x, "expon", method="exact")
    assert ours.statistic == pytest.approx(ref.statistic)
    assert ours.p_value == pytest.approx(ref.pvalue, rel=1e-6)


def test_ks_calibration_under_null():
    # p-values of identically distributed samples are roughly uniform
    rng = np.random.default_rng(2)
    ps = [ks_two_sample(rng.normal(size=400), rng.normal(size=400)).p_value for _ in range(300)]
    assert 0.005 < np.mean(np.array(ps) < 0.05) < 0.1


@given(st.lists(st.floats(-10, 10), min_size=1, max_size=50))
def test_empirical_cdf_is_monotone(xs):
    e = EmpiricalDistribution.from_sample(xs)
    grid = np.linspace(-11, 11, 50)
    c = e.cdf(grid)
    assert np.all(np.diff(c) >= 0) and c[-1] == 1.0


def test_weighted_effective_n():
    e = EmpiricalDistribution.from_sample([1.0, 2.0, 3.0], [1.0, 1.0, 2.0])
    assert e.effective_n == pytest.approx(16 / 6)


def test_chi_square_pools_sparse_cells():
    res = chi_square_counts([50, 30, 15, 4, 1], [0.5, 0.3, 0.15, 0.04, 0.01])
    assert res.dof < 4
    assert res.p_value > 0.5


def test_binomial_se():
    assert binomial_se(0.5, 100) == pytest.approx(0.05)
