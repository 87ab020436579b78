"""Monte Carlo engine for one-dimensional diffusions.

Paths are stepped by Euler-Maruyama (exact for Brownian motion with drift).
Each path owns a Philox substream keyed by ``(seed, path_index)``, so an
ensemble is a deterministic function of its seed whatever the batching.

Local time at ``a`` is normalized by the speed measure and estimated either by
the occupation band ``dt 1{|x-a|<eps} / m((a-eps, a+eps))`` or, for
``local_time="bridge"``, by sampling the local time of the Brownian bridge
between consecutive grid points.  Given the endpoints u, v of a step (relative
to a) and the step variance s2 = sigma^2 dt, the semimartingale local time L
of the bridge satisfies

    P(L > l) = exp(-((|u| + |v| + l)^2 - (v - u)^2) / (2 s2)),

which is exact for Gaussian steps and removes the band bias.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, asdict

import numba
import numpy as np
from scipy import optimize

from .diffusion import DiffusionSpec, characteristics_from_spec, quad
from .errors import DomainError, HorizonReached, RejectionBudgetExhausted, StateEscapedInterval
from .htransform import h_hit
from .models import BmWithDrift
from .rng import substream


class DeathCause(enum.IntEnum):
    LOCAL_TIME_CLOCK = 0
    LAST_EXIT = 1
    CONDITIONED = 2
    HORIZON = 3


@dataclass(frozen=True)
class PathConfig:
    """Stepping and estimation parameters shared by the path kernels.

    ``epsilon`` defaults to 2 sqrt(dt).  ``kink_split`` splits the drift of a
    step that crosses ``a`` in proportion to the interpolated crossing time.
    """

    dt: float = 1e-3
    horizon: float = 1e4
    epsilon: float | None = None
    escape_delta: float = 1e-4
    local_time: str = "band"
    kink_split: bool = True
    budget: int = 10**7
    probe_times: tuple = ()

    def __post_init__(self):
        if not self.dt > 0:
            raise DomainError("dt must be positive")
        if not 0 < self.escape_delta < 1:
            raise DomainError("escape_delta must lie in (0, 1)")
        if self.local_time not in ("band", "bridge"):
            raise DomainError("local_time must be 'band' or 'bridge'")
        if self.epsilon is None:
            object.__setattr__(self, "epsilon", 2.0 * math.sqrt(self.dt))
        if not self.epsilon > 0:
            raise DomainError("epsilon must be positive")

    @property
    def lt_code(self) -> int:
        return 0 if self.local_time == "band" else 1

    def probe_steps(self) -> np.ndarray:
        return np.array([int(round(t / self.dt)) for t in self.probe_times], dtype=np.int64)


@dataclass
class Path:
    times: np.ndarray
    states: np.ndarray
    local_time: np.ndarray  # running estimate at the grid times
    death_time: float | None
    death_cause: DeathCause


@dataclass
class Ensemble:
    """Per-path summaries of an ensemble, in path-index order."""

    death_time: np.ndarray
    death_cause: np.ndarray
    local_time: np.ndarray
    probe_times: np.ndarray
    probes: np.ndarray  # NaN once the path is dead
    proposals: int
    seed: int
    config: PathConfig
    escape_delta: float = 0.0
    extra: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.death_time)

    def marginal(self, t: float) -> np.ndarray:
        """States at probe time t of the paths still alive at t."""
        j = int(np.argmin(np.abs(self.probe_times - t)))
        col = self.probes[:, j]
        return col[~np.isnan(col)]

    def survival(self, t: float) -> float:
        j = int(np.argmin(np.abs(self.probe_times - t)))
        return float(np.mean(~np.isnan(self.probes[:, j])))

    def to_csv(self, path) -> None:
        cols = ["path_index", "death_time", "death_cause", "local_time_total"]
        cols += [f"state_t{t:g}" for t in self.probe_times]
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(",".join(cols) + "\n")
            for i in range(len(self)):
                row = [str(i), repr(float(self.death_time[i])), DeathCause(int(self.death_cause[i])).name,
                       repr(float(self.local_time[i]))]
                row += ["" if np.isnan(v) else repr(float(v)) for v in self.probes[i]]
                fh.write(",".join(row) + "\n")

    def summary(self) -> dict:
        return {
            "n": len(self),
            "seed": self.seed,
            "proposals": int(self.proposals),
            "mean_death_time": float(np.mean(self.death_time)),
            "mean_local_time": float(np.mean(self.local_time)),
            "escape_delta": self.escape_delta,
            "config": {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(self.config).items()},
        }


# ---------------------------------------------------------------- kernels

@numba.njit(cache=True)
def _advance(g, x, dt, sq, drift, disp, theta, a, split):
    z = g.standard_normal()
    b0 = drift(x, theta)
    noise = disp(x, theta) * sq * z
    y = x + b0 * dt + noise
    if split and (x - a) * (y - a) < 0.0:
        f = abs(x - a) / (abs(x - a) + abs(y - a))
        y = x + noise + dt * (f * b0 + (1.0 - f) * drift(y, theta))
    return y


@numba.njit(cache=True)
def _bridge_local_time(g, u, v, s2):
    """Semimartingale local time at 0 of a Brownian bridge from u to v."""
    uv = u * v
    if uv > 0.0:
        e = 2.0 * uv / s2
        if e > 50.0 or g.random() >= math.exp(-e):
            return 0.0
    s = abs(u) + abs(v)
    return math.sqrt(s * s - 2.0 * s2 * math.log(1.0 - g.random())) - s


@numba.njit(cache=True)
def _lt_step(g, x, y, dt, a, lt_mode, lt_c, eps, drift_disp2):
    """Local-time increment over one step (speed-measure normalization).

    band:   lt_c = dt / m((a-eps, a+eps)), counted at the left point.
    bridge: lt_c = 1 / m'(a), divided by the local variance factor sigma^2.
    """
    if lt_mode == 0:
        return lt_c if abs(x - a) < eps else 0.0
    return _bridge_local_time(g, x - a, y - a, drift_disp2 * dt) * lt_c / drift_disp2


@numba.njit(cache=True)
def _crossed(g, x, y, a, s2):
    """Did the continuous interpolation hit a during the step?"""
    u = x - a
    v = y - a
    if u * v <= 0.0:
        return True
    e = 2.0 * u * v / s2
    return e < 50.0 and g.random() < math.exp(-e)


@numba.njit(cache=True)
def _last_exit_kernel(g, x0, a, c_lo, c_hi, dt, max_steps, drift, disp, theta, split,
                      lt_mode, lt_c, eps, probe_idx, probes, budget):
    """Run to the escape barrier after hitting a; returns (K, L, T_a, proposals, status).

    status 0 ok, 1 horizon, 2 budget.  Proposals that escape before hitting
    a are discarded and restarted (conditioning on T_a < inf).
    """
    sq = math.sqrt(dt)
    np_ = probe_idx.shape[0]
    for proposal in range(1, budget + 1):
        x = x0
        k = 0
        hit = x0 == a
        t_hit = 0.0
        j = 0
        for q in range(np_):
            probes[q] = np.nan
        rejected = False
        while not hit:
            while j < np_ and probe_idx[j] == k:
                probes[j] = x
                j += 1
            y = _advance(g, x, dt, sq, drift, disp, theta, a, split)
            s = disp(x, theta)
            k += 1
            if _crossed(g, x, y, a, s * s * dt):
                hit = True
                t_hit = k * dt
            x = y
            if not hit and (x <= c_lo or x >= c_hi):
                rejected = True
                break
            if k >= max_steps:
                return 0.0, 0.0, 0.0, proposal, 1
        if rejected:
            continue
        L = 0.0
        last = -1
        while x > c_lo and x < c_hi:
            while j < np_ and probe_idx[j] == k:
                probes[j] = x
                j += 1
            y = _advance(g, x, dt, sq, drift, disp, theta, a, split)
            s = disp(x, theta)
            inc = _lt_step(g, x, y, dt, a, lt_mode, lt_c, eps, s * s)
            if inc > 0.0:
                L += inc
                last = k
            elif lt_mode == 0 and abs(x - a) < eps:
                last = k
            x = y
            k += 1
            if k >= max_steps:
                return 0.0, 0.0, t_hit, proposal, 1
        life = (last + 1) * dt if last >= 0 else t_hit
        for q in range(np_):
            if probe_idx[q] * dt >= life:
                probes[q] = np.nan
        return life, L, t_hit, proposal, 0
    return 0.0, 0.0, 0.0, budget, 2


@numba.njit(cache=True)
def _clock_kernel(g, x0, a, rate, dt, max_steps, drift, disp, theta, split, lt_mode, lt_c, eps,
                  probe_idx, probes):
    """Kill when the local time at a exceeds an Exp(rate) level; returns (zeta, L, status)."""
    sq = math.sqrt(dt)
    level = g.exponential(1.0 / rate)
    x = x0
    L = 0.0
    j = 0
    np_ = probe_idx.shape[0]
    for q in range(np_):
        probes[q] = np.nan
    for k in range(max_steps):
        while j < np_ and probe_idx[j] == k:
            probes[j] = x
            j += 1
        y = _advance(g, x, dt, sq, drift, disp, theta, a, split)
        s = disp(x, theta)
        L += _lt_step(g, x, y, dt, a, lt_mode, lt_c, eps, s * s)
        if L >= level:
            if lt_mode == 1:
                L = level
            return (k + 1) * dt, L, 0
        x = y
    return max_steps * dt, L, 1


@numba.njit(cache=True)
def _lt_conditioned_kernel(g, x0, a, lam, c_lo, c_hi, dt, max_steps, drift, disp, theta, split,
                           lt_mode, lt_c, eps, probe_idx, probes, budget):
    """Accept a path iff its total local time at a exceeds zeta ~ Exp(lam).

    Returns (death time, zeta, proposals, status); the path is killed when its
    local time reaches zeta.  Paths crossing an escape barrier are rejected.
    """
    sq = math.sqrt(dt)
    np_ = probe_idx.shape[0]
    for proposal in range(1, budget + 1):
        zeta = g.exponential(1.0 / lam)
        x = x0
        L = 0.0
        j = 0
        for q in range(np_):
            probes[q] = np.nan
        for k in range(max_steps):
            while j < np_ and probe_idx[j] == k:
                probes[j] = x
                j += 1
            y = _advance(g, x, dt, sq, drift, disp, theta, a, split)
            s = disp(x, theta)
            L += _lt_step(g, x, y, dt, a, lt_mode, lt_c, eps, s * s)
            if L >= zeta:
                return (k + 1) * dt, zeta, proposal, 0
            x = y
            if x <= c_lo or x >= c_hi:
                break
        else:
            return 0.0, 0.0, proposal, 1
    return 0.0, 0.0, budget, 2


@numba.njit(cache=True)
def _near_point_bm_kernel(g, x0, a, mu, lam, eps_c, probe_t, probes, budget):
    """Exact sampler for BM with drift: kappa ~ Exp(lam), accept iff |X_kappa - a| < eps_c.

    X_kappa is drawn exactly and the probe states come from the Brownian
    bridge between (0, x0) and (kappa, X_kappa).
    """
    np_ = probe_t.shape[0]
    for proposal in range(1, budget + 1):
        kappa = g.exponential(1.0 / lam)
        xk = x0 - mu * kappa + math.sqrt(kappa) * g.standard_normal()
        if abs(xk - a) >= eps_c:
            continue
        s = 0.0
        xs = x0
        for q in range(np_):
            t = probe_t[q]
            if t >= kappa:
                probes[q] = np.nan
                continue
            w = (t - s) / (kappa - s)
            var = (t - s) * (kappa - t) / (kappa - s)
            xs = xs + w * (xk - xs) + math.sqrt(var) * g.standard_normal()
            s = t
            probes[q] = xs
        return kappa, proposal, 0
    return 0.0, budget, 2


@numba.njit(cache=True)
def _near_point_euler_kernel(g, x0, a, lam, eps_c, dt, max_steps, drift, disp, theta, split,
                             probe_idx, probes, budget):
    sq = math.sqrt(dt)
    np_ = probe_idx.shape[0]
    for proposal in range(1, budget + 1):
        kappa = g.exponential(1.0 / lam)
        n = int(math.ceil(kappa / dt))
        if n > max_steps:
            continue
        x = x0
        j = 0
        for q in range(np_):
            probes[q] = np.nan
        for k in range(n):
            while j < np_ and probe_idx[j] == k:
                probes[j] = x
                j += 1
            x = _advance(g, x, dt, sq, drift, disp, theta, a, split)
        if abs(x - a) < eps_c:
            return n * dt, proposal, 0
    return 0.0, budget, 2


@numba.njit(cache=True)
def _hit_kernel(g, x0, a, c_lo, c_hi, dt, max_steps, drift, disp, theta):
    """Time of the step that hits a, -1 if the path leaves (c_lo, c_hi) first, -2 at the horizon."""
    sq = math.sqrt(dt)
    x = x0
    for k in range(max_steps):
        y = _advance(g, x, dt, sq, drift, disp, theta, a, False)
        s = disp(x, theta)
        if _crossed(g, x, y, a, s * s * dt):
            return (k + 1) * dt
        x = y
        if x <= c_lo or x >= c_hi:
            return -1.0
    return -2.0


@numba.njit(cache=True)
def _record_kernel(g, x0, a, rate, dt, drift, disp, theta, split, lt_mode, lt_c, eps, xs, ls):
    """Full trajectory with running local time; rate <= 0 disables the clock."""
    sq = math.sqrt(dt)
    level = g.exponential(1.0 / rate) if rate > 0 else np.inf
    x = x0
    L = 0.0
    xs[0] = x
    ls[0] = 0.0
    n = xs.shape[0] - 1
    for k in range(n):
        y = _advance(g, x, dt, sq, drift, disp, theta, a, split)
        s = disp(x, theta)
        L += _lt_step(g, x, y, dt, a, lt_mode, lt_c, eps, s * s)
        x = y
        xs[k + 1] = x
        ls[k + 1] = L
        if L >= level:
            return k + 1
    return -1


# ---------------------------------------------------------------- helpers

def _jit(spec: DiffusionSpec):
    if spec.jit is None:
        raise DomainError("the Monte Carlo kernels need numba coefficients (spec.jit)")
    drift, disp, theta = spec.jit
    return drift, disp, np.asarray(theta, dtype=float)


def band_mass(m_density, a, eps) -> float:
    return quad(m_density, a - eps, a + eps)


def _lt_constant(config: PathConfig, m_density, a) -> float:
    if config.local_time == "band":
        return config.dt / band_mass(m_density, a, config.epsilon)
    return 1.0 / float(m_density(a))


def _max_steps(config):
    return int(math.ceil(config.horizon / config.dt))


def step(model, x, dt, rng: np.random.Generator):
    """One step: exact Gaussian increment for BM with drift, Euler-Maruyama otherwise."""
    if not dt > 0:
        raise DomainError("dt must be positive")
    z = rng.standard_normal()
    if isinstance(model, BmWithDrift):
        return x - model.mu * dt + math.sqrt(dt) * z
    y = x + float(model.drift(x)) * dt + float(model.dispersion(x)) * math.sqrt(dt) * z
    if not model.interval.contains(y):
        raise StateEscapedInterval(f"step from {x} left the interval at {y}")
    return y


def local_time_increment(x, dt, a, epsilon, m_density) -> float:
    """Band estimate dt 1{|x-a| < eps} / m((a-eps, a+eps))."""
    if not epsilon > 0:
        raise DomainError("epsilon must be positive")
    if abs(x - a) >= epsilon:
        return 0.0
    return dt / band_mass(m_density, a, epsilon)


def escape_barriers(chars, a, delta) -> tuple[float, float]:
    """Levels beyond which the chance of ever returning to a is below ``delta``."""
    h = h_hit(chars, a)

    def solve(direction):
        scale = 1.0
        while float(h(a + direction * scale)) > delta:
            scale *= 2.0
            if scale > 1e6:
                return direction * math.inf
        return optimize.brentq(lambda x: float(h(x)) - delta, a + direction * scale / 2, a + direction * scale,
                               xtol=1e-12)

    lo = solve(-1.0) if math.isfinite(chars.lower_scale) else -math.inf
    hi = solve(1.0) if math.isfinite(chars.upper_scale) else math.inf
    return lo, hi


def calibrate_clock_rate(local_times, lattice: float | None = None) -> float:
    """Exponential rate matching the mean of the observed total local times.

    With a band estimator the local time moves on the lattice ``lattice`` and
    a clock Exp(r) is effectively rounded up to that lattice; the returned
    rate then solves E[lattice * ceil(E/lattice)] = mean.
    """
    mean = float(np.mean(local_times))
    if lattice is None:
        return 1.0 / mean
    if not mean > lattice:
        raise DomainError("mean local time below one lattice step")
    return -math.log1p(-lattice / mean) / lattice


def _chars_for(spec, chars):
    return chars if chars is not None else characteristics_from_spec(spec)


def _ensemble(n, n_probe):
    return np.empty(n), np.empty(n, dtype=np.int64), np.empty(n), np.full((n, n_probe), np.nan)


# ---------------------------------------------------------------- ensembles

def run_to_last_exit(spec: DiffusionSpec, a: float, config: PathConfig, seed: int, n_paths: int,
                     x0: float | None = None, chars=None) -> Ensemble:
    """Paths conditioned on hitting a, run until their last visit to a.

    The last exit is located operationally: each path runs until it crosses a
    barrier from which the return probability to a is below escape_delta.
    """
    chars = _chars_for(spec, chars)
    drift, disp, theta = _jit(spec)
    x0 = a if x0 is None else x0
    c_lo, c_hi = escape_barriers(chars, a, config.escape_delta)
    lt_c = _lt_constant(config, chars.speed_density, a)
    pidx = config.probe_steps()
    death, cause, lt, probes = _ensemble(n_paths, len(pidx))
    used = 0
    for i in range(n_paths):
        life, L, t_hit, prop, status = _last_exit_kernel(
            substream(seed, i), x0, a, c_lo, c_hi, config.dt, _max_steps(config), drift, disp, theta,
            config.kink_split, config.lt_code, lt_c, config.epsilon, pidx, probes[i], config.budget)
        if status == 1:
            raise HorizonReached(f"path {i} did not escape before the horizon")
        if status == 2:
            raise RejectionBudgetExhausted(f"path {i}: {config.budget} proposals never hit a")
        death[i], lt[i] = life, L
        cause[i] = DeathCause.LAST_EXIT
        used += prop
    return Ensemble(death, cause, lt, np.asarray(config.probe_times, dtype=float), probes, used, seed,
                    config, config.escape_delta, {"barriers": (c_lo, c_hi)})


def clock_killed_ensemble(spec: DiffusionSpec, a: float, rate: float, config: PathConfig, seed: int,
                          n_paths: int, m_density, x0: float | None = None) -> Ensemble:
    """Paths of ``spec`` killed when their local time at a exceeds Exp(rate)."""
    if not rate > 0:
        raise DomainError("rate must be positive")
    drift, disp, theta = _jit(spec)
    x0 = a if x0 is None else x0
    lt_c = _lt_constant(config, m_density, a)
    pidx = config.probe_steps()
    death, cause, lt, probes = _ensemble(n_paths, len(pidx))
    for i in range(n_paths):
        zeta, L, status = _clock_kernel(
            substream(seed, i), x0, a, rate, config.dt, _max_steps(config), drift, disp, theta,
            config.kink_split, config.lt_code, lt_c, config.epsilon, pidx, probes[i])
        death[i], lt[i] = zeta, L
        cause[i] = DeathCause.HORIZON if status else DeathCause.LOCAL_TIME_CLOCK
        for q, k in enumerate(pidx):
            if k * config.dt >= zeta:
                probes[i, q] = np.nan
    return Ensemble(death, cause, lt, np.asarray(config.probe_times, dtype=float), probes, n_paths, seed,
                    config)


def kill_at_local_time_clock(spec: DiffusionSpec, a: float, rate: float, config: PathConfig, seed: int,
                             path_index: int, m_density, x0: float | None = None,
                             n_steps: int | None = None) -> Path:
    """One fully recorded path killed by a local-time clock of the given rate."""
    drift, disp, theta = _jit(spec)
    x0 = a if x0 is None else x0
    n = n_steps or _max_steps(config)
    xs, ls = np.empty(n + 1), np.empty(n + 1)
    k = _record_kernel(substream(seed, path_index), x0, a, rate, config.dt, drift, disp, theta,
                       config.kink_split, config.lt_code, _lt_constant(config, m_density, a),
                       config.epsilon, xs, ls)
    times = config.dt * np.arange(n + 1)
    if k < 0:
        return Path(times, xs, ls, None, DeathCause.HORIZON)
    return Path(times[: k + 1], xs[: k + 1], ls[: k + 1], k * config.dt, DeathCause.LOCAL_TIME_CLOCK)


def record_path(spec: DiffusionSpec, a: float, config: PathConfig, seed: int, path_index: int, m_density,
                n_steps: int, x0: float | None = None) -> Path:
    """Unkilled trajectory with its running local-time estimate."""
    drift, disp, theta = _jit(spec)
    x0 = a if x0 is None else x0
    xs, ls = np.empty(n_steps + 1), np.empty(n_steps + 1)
    _record_kernel(substream(seed, path_index), x0, a, -1.0, config.dt, drift, disp, theta,
                   config.kink_split, config.lt_code, _lt_constant(config, m_density, a),
                   config.epsilon, xs, ls)
    return Path(config.dt * np.arange(n_steps + 1), xs, ls, None, DeathCause.HORIZON)


def condition_near_point(spec, a: float, lam: float, epsilon_cond: float, config: PathConfig, seed: int,
                         n_paths: int, x0: float | None = None) -> Ensemble:
    """Paths killed at kappa ~ Exp(lam), kept only if X_kappa lies within epsilon_cond of a.

    A BmWithDrift is sampled exactly (endpoint plus Brownian bridge); any other
    spec is stepped on the grid.
    """
    if not (lam > 0 and epsilon_cond > 0):
        raise DomainError("lam and epsilon_cond must be positive")
    x0 = a if x0 is None else x0
    probe_t = np.asarray(config.probe_times, dtype=float)
    death, cause, lt, probes = _ensemble(n_paths, len(probe_t))
    lt[:] = np.nan
    used = 0
    exact = isinstance(spec, BmWithDrift)
    if not exact:
        drift, disp, theta = _jit(spec)
        pidx = config.probe_steps()
    for i in range(n_paths):
        g = substream(seed, i)
        if exact:
            kappa, prop, status = _near_point_bm_kernel(g, x0, a, spec.mu, lam, epsilon_cond, probe_t,
                                                        probes[i], config.budget)
        else:
            kappa, prop, status = _near_point_euler_kernel(
                g, x0, a, lam, epsilon_cond, config.dt, _max_steps(config), drift, disp, theta,
                config.kink_split, pidx, probes[i], config.budget)
            for q, k in enumerate(pidx):
                if k * config.dt >= kappa:
                    probes[i, q] = np.nan
        if status:
            raise RejectionBudgetExhausted(f"path {i}: no acceptance in {config.budget} proposals")
        death[i] = kappa
        cause[i] = DeathCause.CONDITIONED
        used += prop
    return Ensemble(death, cause, lt, probe_t, probes, used, seed, config)


def condition_on_local_time(spec: DiffusionSpec, a: float, lam: float, config: PathConfig, seed: int,
                            n_paths: int, x0: float | None = None, chars=None) -> Ensemble:
    """Paths whose total local time at a exceeds zeta ~ Exp(lam), killed when it reaches zeta.

    ``local_time`` of the ensemble holds the local time at death (= zeta).
    """
    if not lam > 0:
        raise DomainError("lam must be positive")
    chars = _chars_for(spec, chars)
    drift, disp, theta = _jit(spec)
    x0 = a if x0 is None else x0
    c_lo, c_hi = escape_barriers(chars, a, config.escape_delta)
    lt_c = _lt_constant(config, chars.speed_density, a)
    pidx = config.probe_steps()
    death, cause, lt, probes = _ensemble(n_paths, len(pidx))
    used = 0
    for i in range(n_paths):
        t_death, zeta, prop, status = _lt_conditioned_kernel(
            substream(seed, i), x0, a, lam, c_lo, c_hi, config.dt, _max_steps(config), drift, disp, theta,
            config.kink_split, config.lt_code, lt_c, config.epsilon, pidx, probes[i], config.budget)
        if status == 1:
            raise HorizonReached(f"path {i} neither escaped nor reached its level")
        if status == 2:
            raise RejectionBudgetExhausted(f"path {i}: no acceptance in {config.budget} proposals")
        death[i], lt[i] = t_death, zeta
        cause[i] = DeathCause.CONDITIONED
        used += prop
        for q, k in enumerate(pidx):
            if k * config.dt >= t_death:
                probes[i, q] = np.nan
    return Ensemble(death, cause, lt, np.asarray(config.probe_times, dtype=float), probes, used, seed,
                    config, config.escape_delta, {"barriers": (c_lo, c_hi)})


def hitting_times(spec: DiffusionSpec, x0: float, a: float, barriers: tuple[float, float], dt: float,
                  seed: int, n_paths: int, horizon: float = 1e4) -> np.ndarray:
    """First time each path reaches a (bridge-corrected), NaN if it crosses a barrier first."""
    drift, disp, theta = _jit(spec)
    max_steps = int(math.ceil(horizon / dt))
    out = np.empty(n_paths)
    for i in range(n_paths):
        r = _hit_kernel(substream(seed, i), x0, a, barriers[0], barriers[1], dt, max_steps, drift, disp, theta)
        if r == -2.0:
            raise HorizonReached(f"path {i} undecided at the horizon")
        out[i] = r if r >= 0 else np.nan
    return out


def hit_fraction(spec: DiffusionSpec, x0: float, a: float, barriers: tuple[float, float], dt: float,
                 seed: int, n_paths: int, horizon: float = 1e4) -> tuple[float, int]:
    """Fraction of paths from x0 that hit a before crossing a barrier (bridge-corrected)."""
    t = hitting_times(spec, x0, a, barriers, dt, seed, n_paths, horizon)
    return float(np.mean(~np.isnan(t))), n_paths
