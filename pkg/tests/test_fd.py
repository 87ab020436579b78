import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from condproc.bangbang import BangBangResolvent, bm_oracle
from condproc.errors import GridError, SingularSystem
from condproc.experiments import _fd_setup, _fd_test_function, fd_oracle
from condproc.fd import (Grid, build_operator, cell_cdf, drift_limits, interface_jump_residual, resolvent_solve,
                         semigroup_evolve, transition_probabilities)

MODEL, TC, BB = _fd_setup(1.0)
GRID = Grid.uniform(0.0, -10.0, 10.0, 0.02)
OP = build_operator(TC, GRID)


def test_grid_requires_a_node():
    with pytest.raises(GridError):
        Grid(np.array([-1.0, 0.5, 1.0]), 0.0)
    with pytest.raises(GridError):
        Grid(np.array([0.0, -1.0]), 0.0)


def test_weighted_operator_is_symmetric():
    W = OP.weights[:, None] * OP.dense()
    assert np.abs(W - W.T).max() < 1e-12 * np.abs(W).max()


def test_rows_lose_mass_only_at_a_and_edges():
    s = OP.row_sums()
    inner = np.ones(len(s), bool)
    inner[[0, -1, GRID.a_index]] = False
    assert np.abs(s[inner]).max() < 1e-9 * np.abs(OP.diag).max()
    assert s[GRID.a_index] < 0


def test_drift_limits_recover_bangbang_drift():
    left, right = drift_limits(OP)
    assert left == pytest.approx(1.0, abs=1e-3)
    assert right == pytest.approx(-1.0, abs=1e-3)


def test_resolvent_matches_oracle():
    u = resolvent_solve(OP, 1.0, _fd_test_function(GRID.nodes))
    for x in (-1.0, 0.0, 0.6):
        i = int(round((x - GRID.nodes[0]) / 0.02))
        assert u[i] == pytest.approx(fd_oracle(BB, 1.0, 1.0, x), abs=1e-4)


def test_jump_residual_is_first_order():
    res = []
    for dx in (0.02, 0.01):
        op = build_operator(TC, Grid.uniform(0.0, -10.0, 10.0, dx))
        u = resolvent_solve(op, 1.0, _fd_test_function(op.grid.nodes))
        res.append(abs(interface_jump_residual(op, u)))
    assert res[0] / res[1] == pytest.approx(2.0, rel=0.1)


def test_singular_system_rejected():
    with pytest.raises(SingularSystem):
        resolvent_solve(OP, 0.0, np.ones(len(GRID.nodes)))


@given(st.floats(0.1, 2.0))
def test_semigroup_is_sub_markov(t):
    probs = transition_probabilities(OP, 0.0, t, 50)
    assert np.all(probs >= -1e-15)
    assert probs.sum() <= 1.0 + 1e-12


def test_survival_matches_exact():
    probs = transition_probabilities(build_operator(TC, Grid.uniform(0.0, -10, 10, 0.01)), 0.0, 1.0, 1000)
    assert probs.sum() == pytest.approx(2 * 0.15865525393145707, abs=2e-3)


def test_semigroup_identity_at_zero():
    f = _fd_test_function(GRID.nodes)
    assert np.array_equal(semigroup_evolve(OP, 0.0, f, 10), f)


def test_cell_cdf_normalized():
    probs = transition_probabilities(OP, 0.0, 0.5, 100)
    cdf = cell_cdf(OP, probs)
    assert cdf(-100) == 0.0 and cdf(100) == pytest.approx(1.0)
