import math

import numpy as np
import pytest
from scipy import stats

from condproc.errors import DomainError, StateEscapedInterval
from condproc.mc import (DeathCause, PathConfig, band_mass, calibrate_clock_rate, clock_killed_ensemble,
                         condition_near_point, condition_on_local_time, escape_barriers, hit_fraction,
                         kill_at_local_time_clock, local_time_increment, record_path, run_to_last_exit, step)
from condproc.models import BmWithDrift, LogisticSde
from condproc.rng import derive_seed, substream
from condproc.stats import ks_one_sample

BM = BmWithDrift(1.0)
CHARS = BM.characteristics()


def test_config_defaults_and_validation():
    cfg = PathConfig(dt=1e-2)
    assert cfg.epsilon == pytest.approx(0.2)
    with pytest.raises(DomainError):
        PathConfig(dt=0.0)
    with pytest.raises(DomainError):
        PathConfig(local_time="other")


def test_substreams_are_deterministic_and_distinct():
    a = substream(7, 3).standard_normal(5)
    assert np.array_equal(a, substream(7, 3).standard_normal(5))
    assert not np.array_equal(a, substream(7, 4).standard_normal(5))
    assert derive_seed(1, 2) != derive_seed(1, 3)


def test_ensemble_independent_of_batching():
    cfg = PathConfig(dt=1e-2, probe_times=(0.5,))
    whole = clock_killed_ensemble(BM.bangbang_spec(), 0.0, 2.0, cfg, 11, 20, CHARS.speed_density)
    part = clock_killed_ensemble(BM.bangbang_spec(), 0.0, 2.0, cfg, 11, 10, CHARS.speed_density)
    assert np.array_equal(whole.death_time[:10], part.death_time)


def test_step_exact_for_bm_and_guards_interval():
    x = step(BM, 0.0, 0.01, substream(1, 0))
    assert np.isfinite(x)
    with pytest.raises(DomainError):
        step(BM, 0.0, 0.0, substream(1, 0))
    with pytest.raises(StateEscapedInterval):
        # a huge Euler step of the logistic SDE leaves (0, inf)
        lg = LogisticSde(0.3, 0.1, 1.0).spec()
        rng = np.random.default_rng(3)
        for _ in range(1000):
            step(lg, 1e-3, 10.0, rng)


def test_band_increment():
    m = CHARS.speed_density
    assert local_time_increment(0.5, 1e-3, 0.0, 0.02, m) == 0.0
    assert local_time_increment(0.01, 1e-3, 0.0, 0.02, m) == pytest.approx(1e-3 / band_mass(m, 0.0, 0.02))


def test_escape_barrier_has_small_return_probability():
    lo, hi = escape_barriers(CHARS, 0.0, 1e-4)
    assert math.exp(2 * lo) == pytest.approx(1e-4, rel=1e-8)
    assert hi == math.inf


def test_calibrated_rate_on_lattice():
    rng = np.random.default_rng(0)
    d = 0.05
    lt = d * np.ceil(rng.exponential(0.5, 200_000) / d)
    assert calibrate_clock_rate(lt, d) == pytest.approx(2.0, rel=0.01)
    assert calibrate_clock_rate(rng.exponential(0.5, 200_000)) == pytest.approx(2.0, rel=0.01)


def test_bridge_local_time_is_exponential():
    cfg = PathConfig(dt=0.01, local_time="bridge")
    e = clock_killed_ensemble(BM.bangbang_spec(), 0.0, 1e-9, cfg, 5, 1, CHARS.speed_density)
    assert e.death_cause[0] in (DeathCause.HORIZON, DeathCause.LOCAL_TIME_CLOCK)
    A = run_to_last_exit(BM.spec(), 0.0, PathConfig(dt=0.01, local_time="bridge", escape_delta=1e-6), 9, 3000,
                         chars=CHARS)
    assert ks_one_sample(A.local_time, stats.expon(scale=0.5).cdf).p_value > 1e-3


def test_clock_killed_paths_die_by_clock():
    cfg = PathConfig(dt=1e-3, epsilon=0.02)
    e = clock_killed_ensemble(BM.bangbang_spec(), 0.0, 2.0, cfg, 3, 200, CHARS.speed_density)
    assert np.all(e.death_cause == DeathCause.LOCAL_TIME_CLOCK)
    path = kill_at_local_time_clock(BM.bangbang_spec(), 0.0, 2.0, cfg, 3, 0, CHARS.speed_density)
    assert path.death_time == pytest.approx(e.death_time[0])
    assert np.all(np.diff(path.local_time) >= 0)


def test_record_path_local_time_grows_only_near_a():
    cfg = PathConfig(dt=1e-3, epsilon=0.02)
    p = record_path(BM.spec(), 0.0, cfg, 1, 0, CHARS.speed_density, 2000)
    grew = np.diff(p.local_time) > 0
    assert np.all(np.abs(p.states[:-1][grew]) < 0.02)


def test_last_exit_lifetimes_match_exact_law():
    # K for BM drift -mu from 0: P(K > t) = 2 Phi(-mu sqrt t)
    cfg = PathConfig(dt=1e-3, epsilon=0.02, probe_times=(0.5,))
    A = run_to_last_exit(BM.spec(), 0.0, cfg, 21, 3000, chars=CHARS)
    cdf = lambda t: 1 - 2 * stats.norm.cdf(-np.sqrt(np.maximum(t, 0)))
    assert ks_one_sample(A.death_time, cdf).p_value > 1e-3
    assert np.all(A.death_cause == DeathCause.LAST_EXIT)


def test_near_point_conditioning_lands_near_a():
    e = condition_near_point(BM, 0.0, 0.5, 0.05, PathConfig(probe_times=(0.2,)), 4, 300)
    assert np.all(e.death_cause == DeathCause.CONDITIONED)
    assert e.proposals >= 300
    with pytest.raises(DomainError):
        condition_near_point(BM, 0.0, 0.0, 0.05, PathConfig(), 4, 1)


def test_near_point_acceptance_shrinks_with_band():
    props = [condition_near_point(BM, 0.0, 0.5, eps, PathConfig(), 8, 500).proposals for eps in (0.2, 0.1, 0.05)]
    assert props[0] < props[1] < props[2]


def test_local_time_conditioning_small_sample():
    cfg = PathConfig(dt=0.01, local_time="bridge", escape_delta=1e-6)
    e = condition_on_local_time(BM.spec(), 0.0, 0.5, cfg, 6, 2000, chars=CHARS)
    assert ks_one_sample(e.local_time, stats.expon(scale=1 / 2.5).cdf).p_value > 1e-3


def test_hit_fraction_bm():
    # from above, a is hit surely; from x < 0 with probability e^{2 mu x}
    f, _ = hit_fraction(BM.spec(), 0.5, 0.0, (-math.inf, math.inf), 1e-3, 2, 200)
    assert f == 1.0
    lo = math.log(1e-6) / 2
    f, n = hit_fraction(BM.spec(), -0.5, 0.0, (lo, math.inf), 1e-3, 2, 4000)
    assert abs(f - math.exp(-1.0)) < 4 * math.sqrt(math.exp(-1.0) * (1 - math.exp(-1.0)) / n)


def test_ensemble_csv(tmp_path):
    cfg = PathConfig(dt=1e-2, probe_times=(0.5,))
    e = clock_killed_ensemble(BM.bangbang_spec(), 0.0, 2.0, cfg, 1, 5, CHARS.speed_density)
    out = tmp_path / "e.csv"
    e.to_csv(out)
    lines = out.read_text().splitlines()
    assert lines[0].startswith("path_index,death_time") and len(lines) == 6
    assert e.summary()["n"] == 5
