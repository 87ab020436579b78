import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import linalg

from condproc import ctmc
from condproc.errors import DomainError, LeakExceeded
from condproc.rng import substream

P = ctmc.WalkParams(1.0, 2.0)


def test_uniformization_matches_expm():
    chain = ctmc.walk_chain(P, -20, 20)
    for t in (0.1, 1.0, 3.0):
        assert np.abs(ctmc.uniformized_expm(chain.augmented(), t) - linalg.expm(chain.augmented() * t)).max() < 1e-12


def test_generator_rows_conserve_with_leak_and_kill():
    chain = ctmc.bangbang_walk_generator(P)
    aug = chain.augmented()
    assert np.allclose(aug.sum(axis=1), 0.0)


def test_limit_kernel_equals_bangbang_semigroup():
    K, leak = ctmc.limit_kernel_matrix(P, 1.0)
    E = linalg.expm(ctmc.bangbang_walk_generator(P).q * 1.0)
    rows = slice(30, 51)
    assert np.abs(K[rows] - E[rows]).max() < 1e-10


@given(st.integers(-10, 10), st.integers(-10, 10))
def test_walk_r0_solves_linear_system(u, v):
    chain = ctmc.walk_chain(P, -80, 80)
    r = linalg.solve(-chain.q, np.eye(len(chain.states))[:, chain.index(v)])
    assert r[chain.index(u)] == pytest.approx(ctmc.walk_r0(P, u, v), rel=1e-9)


def test_tv_decreases_along_ladder():
    lim = ctmc.limit_kernel_row(P, 0, 1.0)
    tvs = [ctmc.total_variation(ctmc.conditioned_kernel_row(P, lam, 0, 1.0).probs, lim.probs)
           for lam in (1.0, 0.3, 0.1, 0.03, 0.01)]
    assert all(b < a for a, b in zip(tvs, tvs[1:]))
    # first-order decay: tv(lam) ~ c lam
    assert tvs[-1] / tvs[-2] == pytest.approx(1 / 3, rel=0.1)


def test_total_variation_counts_cemetery():
    assert ctmc.total_variation([0.5, 0.0], [0.25, 0.0]) == pytest.approx(0.25)


def test_n_law_is_a_distribution():
    assert sum(ctmc.n_law(P, n) for n in range(1, 200)) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        ctmc.n_law(P, 0)


def test_leak_guard():
    with pytest.raises(LeakExceeded):
        ctmc.limit_kernel_row(P, 0, 50.0, window=(-3, 3))


def test_excursion_roundtrip():
    path = ctmc.simulate_walk(P, 0, "base", substream(17, 0))
    recs = ctmc.excursion_decomposition(path)
    assert recs[-1].finite is False
    marks = ctmc.concatenate_excursions(recs)
    zero_times = path.jump_times[path.states == 0]
    assert np.allclose(marks[0::2], zero_times)


def test_simulation_is_deterministic_per_path():
    a = ctmc.simulate_walk(P, 0, "bangbang_killed", substream(5, 3))
    b = ctmc.simulate_walk(P, 0, "bangbang_killed", substream(5, 3))
    assert np.array_equal(a.jump_times, b.jump_times) and np.array_equal(a.states, b.states)


def test_conditioned_path_dies_at_zero():
    path = ctmc.simulate_walk(P, 0, "conditioned", substream(1, 0), lam=0.3)
    assert path.states[-1] == 0
    assert path.death_cause == ctmc.DeathCause.EXPONENTIAL_CLOCK
    with pytest.raises(DomainError):
        ctmc.simulate_walk(P, 0, "conditioned", substream(1, 0))


def test_zero_visit_counts_follow_geometric_law():
    from condproc.stats import chi_square_counts
    v = ctmc.sample_zero_visits(P, 5000, 99)
    counts = np.bincount(v.n_visits)[1:]
    probs = [ctmc.n_law(P, n) for n in range(1, len(counts) + 1)]
    assert chi_square_counts(counts, probs).p_value > 1e-3
