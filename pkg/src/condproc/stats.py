"""Goodness-of-fit statistics used by the validation suites."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import stats


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Sorted sample with nonnegative weights (uniform by default)."""

    values: np.ndarray
    weights: np.ndarray

    @classmethod
    def from_sample(cls, sample, weights=None) -> "EmpiricalDistribution":
        x = np.asarray(sample, dtype=float).ravel()
        x_nan = np.isnan(x)
        w = np.ones_like(x) if weights is None else np.asarray(weights, dtype=float).ravel()
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        x, w = x[~x_nan], w[~x_nan]
        order = np.argsort(x, kind="stable")
        return cls(x[order], w[order])

    def __len__(self):
        return len(self.values)

    @property
    def effective_n(self) -> float:
        return self.weights.sum() ** 2 / np.sum(self.weights**2)

    def cdf(self, t):
        cum = np.concatenate([[0.0], np.cumsum(self.weights)]) / self.weights.sum()
        return cum[np.searchsorted(self.values, t, side="right")]


def _as_empirical(x) -> EmpiricalDistribution:
    return x if isinstance(x, EmpiricalDistribution) else EmpiricalDistribution.from_sample(x)


class KsResult(NamedTuple):
    statistic: float
    p_value: float


def ks_two_sample(a, b) -> KsResult:
    """Two-sample Kolmogorov-Smirnov statistic with the asymptotic p-value."""
    a, b = _as_empirical(a), _as_empirical(b)
    if len(a) == 0 or len(b) == 0:
        raise ValueError("samples must be nonempty")
    grid = np.concatenate([a.values, b.values])
    d = float(np.max(np.abs(a.cdf(grid) - b.cdf(grid))))
    na, nb = a.effective_n, b.effective_n
    en = na * nb / (na + nb)
    return KsResult(d, float(stats.kstwobign.sf(math.sqrt(en) * d)) if d > 0 else 1.0)


def ks_one_sample(sample, cdf) -> KsResult:
    """KS distance between a sample and a continuous reference CDF."""
    x = np.sort(np.asarray(sample, dtype=float))
    x = x[~np.isnan(x)]
    n = len(x)
    f = np.asarray(cdf(x), dtype=float)
    d = float(max(np.max(np.arange(1, n + 1) / n - f), np.max(f - np.arange(n) / n)))
    return KsResult(d, float(stats.kstwo.sf(d, n)))


class ChiSquareResult(NamedTuple):
    statistic: float
    p_value: float
    dof: int


def chi_square_counts(counts, probs, min_expected: float = 5.0) -> ChiSquareResult:
    """Pearson test of integer counts against cell probabilities.

    Cells are pooled from the right until every expected count reaches
    ``min_expected``; the last cell absorbs the remaining probability.
    """
    counts = np.asarray(counts, dtype=float)
    probs = np.asarray(probs, dtype=float)
    n = counts.sum()
    probs = np.append(probs, max(0.0, 1.0 - probs.sum()))
    counts = np.append(counts, 0.0) if len(counts) < len(probs) else counts
    obs, exp = [], []
    acc_o = acc_e = 0.0
    for o, p in zip(counts[::-1], probs[::-1]):
        acc_o += o
        acc_e += p * n
        if acc_e >= min_expected:
            obs.append(acc_o)
            exp.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e > 0 or acc_o > 0:
        obs[-1] += acc_o
        exp[-1] += acc_e
    obs, exp = np.array(obs), np.array(exp)
    stat = float(np.sum((obs - exp) ** 2 / exp))
    dof = len(obs) - 1
    return ChiSquareResult(stat, float(stats.chi2.sf(stat, dof)), dof)


def binomial_se(p: float, n: int) -> float:
    return math.sqrt(p * (1 - p) / n)
