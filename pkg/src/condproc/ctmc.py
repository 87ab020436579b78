"""Exact laboratory for the asymmetric continuous-time walk on the integers.

The walk steps down at rate alpha and up at rate beta > alpha.  Everything
that can be computed exactly is computed on a finite window with absorbing
edges whose leaked mass is tracked.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numba
import numpy as np
from scipy import linalg, stats

from .errors import DomainError, LeakExceeded, RejectionBudgetExhausted
from .rng import substream

UNIFORMIZATION_TAIL = 1e-13
LEAK_LIMIT = 1e-8


@dataclass(frozen=True)
class WalkParams:
    alpha: float
    beta: float

    def __post_init__(self):
        if not 0 < self.alpha < self.beta:
            raise DomainError("need 0 < alpha < beta")

    @property
    def ratio(self) -> float:
        return self.alpha / self.beta


class ChainKernel(NamedTuple):
    p: np.ndarray  # transition probabilities inside the window
    leaked: np.ndarray  # mass absorbed at the window edges
    killed: np.ndarray  # mass removed by genuine killing


@dataclass(frozen=True)
class TruncatedChain:
    """Sub-generator on the states lo..hi.

    ``q`` holds jump rates inside the window on the off-diagonal and minus the
    total outflow on the diagonal; ``leak`` and ``kill`` split the row defect
    into edge leakage and killing.
    """

    lo: int
    hi: int
    q: np.ndarray
    leak: np.ndarray
    kill: np.ndarray

    @property
    def states(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)

    def index(self, x: int) -> int:
        if not self.lo <= x <= self.hi:
            raise DomainError(f"state {x} outside window [{self.lo}, {self.hi}]")
        return int(x - self.lo)

    def augmented(self) -> np.ndarray:
        """Generator with two absorbing cemeteries appended (leak, kill)."""
        n = self.q.shape[0]
        g = np.zeros((n + 2, n + 2))
        g[:n, :n] = self.q
        g[:n, n] = self.leak
        g[:n, n + 1] = self.kill
        return g

    def transition(self, t: float) -> ChainKernel:
        """exp(tQ) by uniformization, split into window / leak / kill mass."""
        n = self.q.shape[0]
        full = uniformized_expm(self.augmented(), t)
        return ChainKernel(full[:n, :n], full[:n, n], full[:n, n + 1])

    def resolvent(self, lam: float) -> np.ndarray:
        """(lam I - Q)^{-1}; entry (x, y) is the resolvent density r_lam(x, y)."""
        n = self.q.shape[0]
        return linalg.solve(lam * np.eye(n) - self.q, np.eye(n))


def uniformized_expm(g: np.ndarray, t: float, tail: float = UNIFORMIZATION_TAIL) -> np.ndarray:
    """Matrix exponential of a (sub)generator as a Poisson mixture of powers."""
    n = g.shape[0]
    if t == 0:
        return np.eye(n)
    rate = float(np.max(-np.diag(g)))
    if rate == 0:
        return np.eye(n)
    step = np.eye(n) + g / rate
    mean = rate * t
    kmax = int(stats.poisson.isf(tail, mean)) + 1
    weights = stats.poisson.pmf(np.arange(kmax + 1), mean)
    out = weights[0] * np.eye(n)
    power = np.eye(n)
    for w in weights[1:]:
        power = power @ step
        out += w * power
    return out


def _chain(lo, hi, down, up, kill=None) -> TruncatedChain:
    """Birth-death sub-generator from per-state rate arrays."""
    n = hi - lo + 1
    q = np.zeros((n, n))
    leak = np.zeros(n)
    kill = np.zeros(n) if kill is None else np.asarray(kill, dtype=float)
    for i in range(n):
        if i > 0:
            q[i, i - 1] = down[i]
        else:
            leak[i] += down[i]
        if i < n - 1:
            q[i, i + 1] = up[i]
        else:
            leak[i] += up[i]
        q[i, i] = -(down[i] + up[i] + kill[i])
    return TruncatedChain(lo, hi, q, leak, kill)


def default_window(x0: int = 0) -> tuple[int, int]:
    return x0 - 40, x0 + 80


def walk_chain(p: WalkParams, lo: int = -40, hi: int = 80) -> TruncatedChain:
    n = hi - lo + 1
    return _chain(lo, hi, np.full(n, p.alpha), np.full(n, p.beta))


def bangbang_walk_generator(p: WalkParams, kill: bool = True, lo: int = -40, hi: int = 80) -> TruncatedChain:
    """Walk pushed towards 0 from both sides, optionally killed at rate beta - alpha at 0."""
    x = np.arange(lo, hi + 1)
    down = np.where(x < 0, p.alpha, np.where(x == 0, p.alpha, p.beta))
    up = np.where(x < 0, p.beta, p.alpha)
    k = np.where(x == 0, p.beta - p.alpha, 0.0) if kill else None
    return _chain(lo, hi, down.astype(float), up.astype(float), k)


def walk_r0(p: WalkParams, u: int, v: int) -> float:
    """Expected time at v starting from u: 1/(beta-alpha), damped by (alpha/beta)^(u-v) above."""
    base = 1.0 / (p.beta - p.alpha)
    return base if u <= v else base * p.ratio ** (u - v)


def h_walk(p: WalkParams, x):
    """P^x{hit 0} = (alpha/beta)^{x+}."""
    return p.ratio ** np.maximum(np.asarray(x), 0)


def _check_leak(leaked, what):
    worst = float(np.max(leaked))
    if worst > LEAK_LIMIT:
        raise LeakExceeded(f"{what}: leaked mass {worst:.3g} exceeds {LEAK_LIMIT}")
    return worst


class KernelRow(NamedTuple):
    states: np.ndarray
    probs: np.ndarray
    leak: float


def conditioned_kernel_row(p: WalkParams, lam: float, x: int, t: float, window=None) -> KernelRow:
    """Law at time t of the walk conditioned on sitting at 0 at an Exp(lam) time."""
    if not lam > 0:
        raise DomainError("lambda must be positive")
    chain = walk_chain(p, *(window or default_window(0)))
    ker = chain.transition(t)
    i0, ix = chain.index(0), chain.index(x)
    n = chain.q.shape[0]
    r = linalg.solve(lam * np.eye(n) - chain.q, np.eye(n)[:, i0])
    leak = _check_leak(ker.leaked[[ix]], "conditioned kernel")
    probs = ker.p[ix] * np.exp(-lam * t) * r / r[ix]
    return KernelRow(chain.states, probs, leak)


def conditioned_kernel(p: WalkParams, lam: float, x: int, y: int, t: float, window=None) -> float:
    row = conditioned_kernel_row(p, lam, x, t, window)
    return float(row.probs[y - row.states[0]])


def limit_kernel_row(p: WalkParams, x: int, t: float, window=None) -> KernelRow:
    """Law at time t of the lam -> 0 limit: P_t(x, y) h(y)/h(x)."""
    chain = walk_chain(p, *(window or default_window(0)))
    ker = chain.transition(t)
    ix = chain.index(x)
    leak = _check_leak(ker.leaked[[ix]], "limit kernel")
    h = h_walk(p, chain.states)
    return KernelRow(chain.states, ker.p[ix] * h / h[ix], leak)


def limit_kernel(p: WalkParams, x: int, y: int, t: float, window=None) -> float:
    row = limit_kernel_row(p, x, t, window)
    return float(row.probs[y - row.states[0]])


def limit_kernel_matrix(p: WalkParams, t: float, window=None) -> tuple[np.ndarray, np.ndarray]:
    """Whole h-transformed kernel on the window, plus per-row leak."""
    chain = walk_chain(p, *(window or default_window(0)))
    ker = chain.transition(t)
    h = h_walk(p, chain.states)
    return ker.p * h[None, :] / h[:, None], ker.leaked


def total_variation(p, q) -> float:
    """TV distance of two sub-probability vectors, each completed by a cemetery atom."""
    p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    return 0.5 * (np.abs(p - q).sum() + abs(p.sum() - q.sum()))


def n_law(p: WalkParams, n: int) -> float:
    """P(N = n) for the number of visits to 0 before escape."""
    if n < 1:
        raise DomainError("n must be at least 1")
    s = p.alpha + p.beta
    return (2 * p.alpha / s) ** (n - 1) * (p.beta - p.alpha) / s


class DeathCause(enum.IntEnum):
    NONE = -1
    EXPONENTIAL_CLOCK = 0
    STATE_KILL = 1
    INFINITE_EXCURSION = 2
    HORIZON = 3


@dataclass(frozen=True)
class KilledChainPath:
    jump_times: np.ndarray  # times of entering states[i]; jump_times[0] = 0
    states: np.ndarray
    death_time: float | None
    death_cause: DeathCause
    proposals: int = 1

    def __post_init__(self):
        if np.any(np.diff(self.jump_times) <= 0):
            raise DomainError("jump times must increase strictly")
        if np.any(np.diff(self.states) == 0):
            raise DomainError("consecutive states must differ")

    def state_at(self, t: float):
        """State at time t, or None once the path is dead."""
        if self.death_time is not None and t >= self.death_time:
            return None
        return int(self.states[np.searchsorted(self.jump_times, t, side="right") - 1])


MODES = {"base": 0, "bangbang_killed": 1, "conditioned": 2}


@numba.njit(cache=True)
def _walk_rates(mode, x, alpha, beta):
    if mode == 1:
        if x < 0:
            return alpha, beta
        if x == 0:
            return alpha, alpha
        return beta, alpha
    return alpha, beta


@numba.njit(cache=True)
def _gillespie(g, mode, x0, alpha, beta, kill, horizon, escape, times, states):
    """One event-driven path; returns (n_entries, death_time, cause).

    mode 0/2: base walk, stops at ``escape`` (infinite excursion) or horizon.
    mode 1: bang-bang walk killed at rate ``kill`` while at 0.
    """
    t = 0.0
    x = x0
    n = 0
    times[0] = 0.0
    states[0] = x0
    cap = times.shape[0]
    while True:
        down, up = _walk_rates(mode, x, alpha, beta)
        k = kill if (mode == 1 and x == 0) else 0.0
        total = down + up + k
        t += g.exponential(1.0 / total)
        if t >= horizon:
            return n + 1, horizon, 3
        u = g.random() * total
        if u < k:
            return n + 1, t, 1
        x = x - 1 if u < k + down else x + 1
        n += 1
        if n >= cap:
            return -1, t, -1
        times[n] = t
        states[n] = x
        if mode != 1 and x >= escape:
            return n + 1, t, 2


@numba.njit(cache=True)
def _conditioned_walk(g, x0, alpha, beta, lam, budget, times, states):
    """Rejection sampler: accept a base path iff it sits at 0 at an Exp(lam) time."""
    for proposal in range(1, budget + 1):
        zeta = g.exponential(1.0 / lam)
        m, tend, cause = _gillespie(g, 0, x0, alpha, beta, 0.0, zeta, 1 << 60, times, states)
        if m < 0:
            return -1, 0.0, proposal
        if cause == 3 and states[m - 1] == 0:
            return m, zeta, proposal
    return 0, 0.0, budget


def escape_level(p: WalkParams, x0: int = 0, tol: float = 1e-13) -> int:
    """Level above x0 from which a return to 0 has probability below ``tol``."""
    return max(x0, 0) + int(np.ceil(np.log(tol) / np.log(p.ratio)))


def simulate_walk(p: WalkParams, x0: int, mode: str, rng: np.random.Generator, lam: float = None,
                  horizon: float = np.inf, budget: int = 10**6, max_events: int = 10**6) -> KilledChainPath:
    """Exact event-driven simulation of the base, bang-bang-killed or conditioned walk.

    In base mode the path is stopped once it reaches a level from which a
    return to 0 has probability below 1e-13 (cause INFINITE_EXCURSION).
    """
    if mode not in MODES:
        raise DomainError(f"unknown mode {mode!r}")
    times = np.empty(max_events)
    states = np.empty(max_events, dtype=np.int64)
    if mode == "conditioned":
        if lam is None or not lam > 0:
            raise DomainError("conditioned mode needs lam > 0")
        m, zeta, used = _conditioned_walk(rng, x0, p.alpha, p.beta, lam, budget, times, states)
        if m == 0:
            raise RejectionBudgetExhausted(f"no acceptance in {budget} proposals")
        if m < 0:
            raise DomainError("event buffer too small")
        return KilledChainPath(times[:m].copy(), states[:m].copy(), zeta, DeathCause.EXPONENTIAL_CLOCK, used)
    kill = p.beta - p.alpha
    m, tend, cause = _gillespie(rng, MODES[mode], x0, p.alpha, p.beta, kill, horizon,
                                escape_level(p, x0), times, states)
    if m < 0:
        raise DomainError("event buffer too small")
    cause = DeathCause(cause)
    death = None if cause == DeathCause.HORIZON else tend
    if cause == DeathCause.INFINITE_EXCURSION:
        death = np.inf
    return KilledChainPath(times[:m].copy(), states[:m].copy(), death, cause)


class ExcursionRecord(NamedTuple):
    hold: float  # time spent at 0 before leaving
    duration: float  # length of the excursion away from 0 (inf if it never returns)
    sign: int  # +1 above 0, -1 below, 0 if the path died at 0
    finite: bool


def excursion_decomposition(path: KilledChainPath) -> list[ExcursionRecord]:
    """Split a path started at 0 into (hold at 0, excursion) records."""
    if path.states[0] != 0:
        raise DomainError("path must start at 0")
    end = path.death_time if path.death_time is not None else np.inf
    times = np.append(path.jump_times, end)
    zeros = np.flatnonzero(path.states == 0)
    out = []
    for j, i in enumerate(zeros):
        leave = times[i + 1]
        hold = leave - times[i]
        if i + 1 >= len(path.states):
            out.append(ExcursionRecord(hold, 0.0, 0, True))
            break
        sign = 1 if path.states[i + 1] > 0 else -1
        if j + 1 < len(zeros):
            out.append(ExcursionRecord(hold, times[zeros[j + 1]] - leave, sign, True))
        else:
            finite = path.death_cause != DeathCause.INFINITE_EXCURSION
            out.append(ExcursionRecord(hold, (end - leave) if finite else np.inf, sign, finite))
    return out


def concatenate_excursions(records, start: float = 0.0) -> np.ndarray:
    """Times at which the path enters and leaves 0, rebuilt from the records."""
    t = start
    marks = []
    for rec in records:
        marks.append(t)
        t += rec.hold
        marks.append(t)
        t += rec.duration
    return np.array(marks)


@numba.njit(cache=True)
def _visits_to_zero(g, alpha, beta, escape, times, states, holds):
    m, tend, cause = _gillespie(g, 0, 0, alpha, beta, 0.0, np.inf, escape, times, states)
    n = 0
    for i in range(m):
        if states[i] == 0:
            if n < holds.shape[0]:
                holds[n] = times[i + 1] - times[i]
            n += 1
    return n


class ZeroVisitStats(NamedTuple):
    n_visits: np.ndarray
    first_holds: np.ndarray  # hold time at 0 on the first visit of each path


def sample_zero_visits(p: WalkParams, n_paths: int, seed: int, max_events: int = 200_000) -> ZeroVisitStats:
    """Count visits to 0 before the final escape for independent paths from 0."""
    times = np.empty(max_events)
    states = np.empty(max_events, dtype=np.int64)
    holds = np.empty(1)
    escape = escape_level(p, 0)
    counts = np.empty(n_paths, dtype=np.int64)
    first = np.empty(n_paths)
    for i in range(n_paths):
        counts[i] = _visits_to_zero(substream(seed, i), p.alpha, p.beta, escape, times, states, holds)
        first[i] = holds[0]
    return ZeroVisitStats(counts, first)


@numba.njit(cache=True)
def _marginal_state(g, mode, alpha, beta, lam, t, budget, times, states):
    """State at time t (or a sentinel for death), and the proposals used."""
    dead = -(1 << 40)
    if mode == 2:
        m, zeta, used = _conditioned_walk(g, 0, alpha, beta, lam, budget, times, states)
        if m <= 0:
            return dead - 1, used
        if zeta <= t:
            return dead, used
        k = 0
        while k + 1 < m and times[k + 1] <= t:
            k += 1
        return states[k], used
    m, tend, cause = _gillespie(g, 1, 0, alpha, beta, beta - alpha, t, 1 << 60, times, states)
    if cause == 1:
        return dead, 1
    return states[m - 1], 1


DEAD = -(1 << 40)


def sample_marginal(p: WalkParams, mode: str, t: float, n_paths: int, seed: int, lam: float = None,
                    budget: int = 10**7, max_events: int = 100_000) -> tuple[np.ndarray, int]:
    """Time-t states of n paths from 0 (DEAD marks paths killed before t)."""
    times = np.empty(max_events)
    states = np.empty(max_events, dtype=np.int64)
    out = np.empty(n_paths, dtype=np.int64)
    code = 2 if mode == "conditioned" else 1
    proposals = 0
    for i in range(n_paths):
        x, used = _marginal_state(substream(seed, i), code, p.alpha, p.beta, lam or 1.0, t, budget, times, states)
        if x == DEAD - 1:
            raise RejectionBudgetExhausted(f"path {i}: no acceptance in {budget} proposals")
        out[i] = x
        proposals += used
    return out, proposals


def empirical_marginal(samples: np.ndarray, states: np.ndarray) -> np.ndarray:
    """Sub-probability vector of sampled states (dead paths carry the defect)."""
    alive = samples[samples != DEAD]
    idx = np.searchsorted(states, alive)
    return np.bincount(idx, minlength=len(states))[: len(states)] / len(samples)
