"""Acceptance criteria 1-10, each run at full size through its CLI suite.

Every test prints one line ``criterion k: PASS|FAIL (...)`` and asserts on
the rows of the suite report tagged with that criterion.  Reports are cached
so criteria sharing a suite (1-2, 4-5, 6-7) run it once.
"""
import time
from functools import lru_cache

import pytest

from condproc.experiments import CRITERIA, default_config, run

RUNTIME_LIMITS = {1: 10, 2: 10, 3: 30, 4: 60, 5: 5, 6: 600, 7: 600, 8: 300, 9: 600, 10: 300}


@lru_cache(maxsize=None)
def suite(name):
    t0 = time.perf_counter()
    report = run(name, default_config(name))
    return report, time.perf_counter() - t0


def check(k):
    report, elapsed = suite(CRITERIA[k])
    rows = report.criterion_rows(k)
    assert rows, f"suite {CRITERIA[k]} has no rows for criterion {k}"
    ok = all(r.passed for r in rows)
    detail = "; ".join(f"{r.name}={r.value:.4g} ({r.tolerance})" for r in rows)
    print(f"\ncriterion {k}: {'PASS' if ok else 'FAIL'} [{CRITERIA[k]}, {elapsed:.1f} s] {detail}")
    failed = [f"{r.name}={r.value!r} needs {r.tolerance}" for r in rows if not r.passed]
    assert ok, f"criterion {k} failed: " + "; ".join(failed)
    return elapsed


def test_criterion_01_walk_limit_identity():
    elapsed = check(1)
    assert elapsed < RUNTIME_LIMITS[1]


def test_criterion_02_lambda_ladder():
    check(2)


def test_criterion_03_law_of_visits():
    elapsed = check(3)
    assert elapsed < RUNTIME_LIMITS[3]


def test_criterion_04_bangbang_resolvent():
    elapsed = check(4)
    assert elapsed < RUNTIME_LIMITS[4]


def test_criterion_05_excursion_integral():
    check(5)


@pytest.mark.slow
def test_criterion_06_last_exit_vs_clock():
    elapsed = check(6)
    assert elapsed < RUNTIME_LIMITS[6]


@pytest.mark.slow
def test_criterion_07_near_point_conditioning():
    check(7)


@pytest.mark.slow
def test_criterion_08_ou_hit_probability():
    elapsed = check(8)
    assert elapsed < RUNTIME_LIMITS[8]


@pytest.mark.slow
def test_criterion_09_local_time_conditioning():
    elapsed = check(9)
    assert elapsed < RUNTIME_LIMITS[9]


@pytest.mark.slow
def test_criterion_10_finite_volume_generator():
    elapsed = check(10)
    assert elapsed < RUNTIME_LIMITS[10]
