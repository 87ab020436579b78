"""Closed forms for Brownian motion with drift, transient OU and the logistic SDE."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np
from scipy import special

from .diffusion import Characteristics, DiffusionSpec, Interval, quad
from .errors import DomainError


def erfc(x):
    """Complementary error function (scipy's Cephes implementation)."""
    return special.erfc(x)


# numba coefficient functions, signature f(x, theta)

@numba.njit(cache=True)
def _const_drift(x, theta):
    return theta[0]


@numba.njit(cache=True)
def _unit_dispersion(x, theta):
    return 1.0


@numba.njit(cache=True)
def _bangbang_drift(x, theta):
    # drift +mu below a, -mu above; theta = (mu, a)
    if x < theta[1]:
        return theta[0]
    return -theta[0]


@numba.njit(cache=True)
def _linear_drift(x, theta):
    return theta[0] * x


@numba.njit(cache=True)
def _log_logistic_drift(y, theta):
    # Y = log X for dX = X(mu - kappa X)dt + sigma X dW
    return theta[0] - theta[1] * math.exp(y) - 0.5 * theta[2] * theta[2]


@numba.njit(cache=True)
def _log_logistic_dispersion(y, theta):
    return theta[2]


@numba.njit(cache=True)
def _log_logistic_conditioned_drift(y, theta):
    # theta = (mu, kappa, sigma, log a, y0, dy, bare, table...); the table holds
    # x s'(x)/S(x) on the uniform y-grid y0, y0 + dy, ... up to log a
    base = theta[0] - theta[1] * math.exp(y) - 0.5 * theta[2] * theta[2]
    if y >= theta[3]:
        return base
    n = theta.shape[0] - 7
    u = (y - theta[4]) / theta[5]
    if u <= 0.0:
        c = theta[7]
    else:
        i = min(int(u), n - 2)
        w = u - i
        c = (1.0 - w) * theta[7 + i] + w * theta[8 + i]
    if theta[6] > 0.0:
        return base + c * math.exp(-2.0 * y)
    return base + theta[2] * theta[2] * c


@dataclass(frozen=True)
class BmWithDrift:
    """dX = -mu dt + dW on the real line."""

    mu: float

    def __post_init__(self):
        if not self.mu > 0:
            raise DomainError("mu must be positive")

    def spec(self) -> DiffusionSpec:
        mu = self.mu
        return DiffusionSpec(
            Interval(),
            lambda x: -mu + 0.0 * np.asarray(x, dtype=float),
            lambda x: 1.0 + 0.0 * np.asarray(x, dtype=float),
            (_const_drift, _unit_dispersion, np.array([-mu])),
        )

    def bangbang_spec(self, a: float = 0.0) -> DiffusionSpec:
        mu = self.mu
        return DiffusionSpec(
            Interval(),
            lambda x: np.where(np.asarray(x) < a, mu, -mu),
            lambda x: 1.0 + 0.0 * np.asarray(x, dtype=float),
            (_bangbang_drift, _unit_dispersion, np.array([mu, a])),
        )

    def characteristics(self) -> Characteristics:
        """Scale e^{2 mu x}/(2 mu), vanishing at -inf; speed 2 e^{-2 mu x}."""
        mu = self.mu
        return Characteristics(
            Interval(),
            lambda x: np.exp(2 * mu * np.asarray(x, dtype=float)),
            lambda x: 2 * np.exp(-2 * mu * np.asarray(x, dtype=float)),
            lambda x: np.exp(2 * mu * np.asarray(x, dtype=float)) / (2 * mu),
            -math.inf,
        )

    def theta(self, lam):
        return math.sqrt(2 * lam + self.mu**2)

    def resolvent_m(self, lam, x, y):
        """Resolvent density w.r.t. the speed measure (symmetric in x, y)."""
        mu = self.mu
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        if lam == 0:
            return np.exp(2 * mu * np.minimum(x, y)) / (2 * mu)
        th = self.theta(lam)
        return np.exp(mu * (x + y) - np.abs(y - x) * th) / (2 * th)

    def transition_density(self, t, x, y):
        return np.exp(-((y - x + self.mu * t) ** 2) / (2 * t)) / math.sqrt(2 * math.pi * t)

    def survivor_cdf(self, t, y, a: float = 0.0):
        """CDF of X_t given K_a > t, for the process started at a.

        The density of X_t on {K_a > t} is p_t(a, y) h(y), which for this
        model is a Gaussian centred at a - mu t above a and at a + mu t below.
        """
        mu, sd = self.mu, math.sqrt(t)
        y = np.asarray(y, dtype=float) - a
        mass = 2 * special.ndtr(-mu * sd)
        below = special.ndtr((np.minimum(y, 0) - mu * t) / sd)
        above = np.where(y > 0, special.ndtr((y + mu * t) / sd) - special.ndtr(mu * sd), 0.0)
        return (below + above) / mass


def bm_resolvent_density(model: BmWithDrift, lam, x, z):
    """Density of X_T at z for T ~ Exp(lam) independent, started at x."""
    if not lam > 0:
        raise DomainError("lambda must be positive")
    th = model.theta(lam)
    d = np.asarray(z, dtype=float) - np.asarray(x, dtype=float)
    return lam / th * np.exp(-model.mu * d - np.abs(d) * th)


def bm_entrance_laplace(model: BmWithDrift, lam, x, finite: bool = False):
    """Laplace transform in time of the excursion entrance law at level x.

    ``finite=True`` returns the transform restricted to excursions that come
    back, which differs on the negative side by the hitting factor e^{2 mu x}.
    """
    if lam < 0:
        raise DomainError("lambda must be nonnegative")
    th = model.theta(lam)
    x = np.asarray(x, dtype=float)
    sign = np.where(finite & (x < 0), 1.0, -1.0)
    return np.exp(sign * model.mu * x - np.abs(x) * th)


def bm_infinite_excursion_rate(model: BmWithDrift) -> float:
    """Rate of the excursion that never returns, per unit of semimartingale local time.

    Per unit of speed-measure local time (half as large here) the rate is 2 mu.
    """
    return model.mu


def excursion_rate_integral(model: BmWithDrift, lam) -> float:
    """Quadrature of the infinite-excursion Laplace mass; equals mu / lam."""
    th, mu = model.theta(lam), model.mu
    return quad(lambda x: math.exp(-mu * x + x * th) - math.exp(mu * x + x * th), -math.inf, 0.0)


@dataclass(frozen=True)
class OuProcess:
    """dX = -gamma X dt + dW with gamma < 0 (repelled from the origin)."""

    gamma: float

    def __post_init__(self):
        if not self.gamma < 0:
            raise DomainError("transient OU needs gamma < 0")

    def spec(self) -> DiffusionSpec:
        g = self.gamma
        return DiffusionSpec(
            Interval(),
            lambda x: -g * np.asarray(x, dtype=float),
            lambda x: 1.0 + 0.0 * np.asarray(x, dtype=float),
            (_linear_drift, _unit_dispersion, np.array([-g])),
        )

    def characteristics(self) -> Characteristics:
        g = abs(self.gamma)
        c = 0.5 * math.sqrt(math.pi / g)
        return Characteristics(
            Interval(),
            lambda x: np.exp(-g * np.asarray(x, dtype=float) ** 2),
            lambda x: 2 * np.exp(g * np.asarray(x, dtype=float) ** 2),
            lambda x: c * special.erfc(-np.asarray(x, dtype=float) * math.sqrt(g)),
            -math.inf,
        )


def ou_h(model: OuProcess, x):
    """P^x{T_0 < inf} = erfc(|x| sqrt|gamma|)."""
    return special.erfc(np.abs(x) * math.sqrt(-model.gamma))


@dataclass(frozen=True)
class LogisticSde:
    """dX = X(mu - kappa X)dt + sigma X dW on (0, inf), transient to 0."""

    mu: float
    kappa: float
    sigma: float

    def __post_init__(self):
        if min(self.mu, self.kappa, self.sigma) <= 0:
            raise DomainError("mu, kappa, sigma must be positive")
        if not self.mu - 0.5 * self.sigma**2 < 0:
            raise DomainError("need mu - sigma^2/2 < 0")

    @property
    def p(self) -> float:
        return 2 * self.mu / self.sigma**2

    def spec(self) -> DiffusionSpec:
        mu, k, s = self.mu, self.kappa, self.sigma
        return DiffusionSpec(
            Interval(0.0, math.inf),
            lambda x: np.asarray(x) * (mu - k * np.asarray(x)),
            lambda x: s * np.asarray(x, dtype=float),
        )

    def log_spec(self) -> DiffusionSpec:
        """The same process in the coordinate y = log x."""
        mu, k, s = self.mu, self.kappa, self.sigma
        return DiffusionSpec(
            Interval(),
            lambda y: mu - k * np.exp(y) - 0.5 * s * s,
            lambda y: s + 0.0 * np.asarray(y, dtype=float),
            (_log_logistic_drift, _log_logistic_dispersion, np.array([mu, k, s])),
        )

    def conditioned_log_spec(self, a: float, convention: str = "sigma2", y_min: float = -30.0,
                             n_table: int = 2001) -> DiffusionSpec:
        """Log-coordinate dynamics of the process conditioned to hit a.

        The drift correction is tabulated on a uniform grid in y = log x and
        interpolated linearly inside the numba kernel.
        """
        if convention not in ("sigma2", "bare"):
            raise DomainError(f"unknown convention {convention!r}")
        ya = math.log(a)
        ys = np.linspace(y_min, ya, n_table)
        xs = np.exp(ys)
        table = xs * self.scale_density(xs) / np.array([self.scale_from_zero(x) for x in xs])
        theta = np.concatenate([[self.mu, self.kappa, self.sigma, ya, y_min, ys[1] - ys[0],
                                 1.0 if convention == "bare" else 0.0], table])
        s = self.sigma

        def drift(y):
            return np.vectorize(lambda v: _log_logistic_conditioned_drift(v, theta))(y)

        return DiffusionSpec(
            Interval(),
            drift,
            lambda y: s + 0.0 * np.asarray(y, dtype=float),
            (_log_logistic_conditioned_drift, _log_logistic_dispersion, theta),
        )

    def scale_density(self, x):
        x = np.asarray(x, dtype=float)
        return x ** (-self.p) * np.exp(2 * self.kappa * x / self.sigma**2)

    def speed_density(self, x):
        x = np.asarray(x, dtype=float)
        return 2 / (self.sigma**2 * x**2) * x**self.p * np.exp(-2 * self.kappa * x / self.sigma**2)

    def scale_from_zero(self, x) -> float:
        """int_0^x s'(z) dz with z = u^{1/(1-p)} removing the power singularity."""
        q = 1.0 - self.p
        c = 2 * self.kappa / self.sigma**2
        if x <= 0:
            return 0.0
        return quad(lambda u: math.exp(c * u ** (1 / q)), 0.0, x**q) / q

    def characteristics(self) -> Characteristics:
        return Characteristics(
            Interval(0.0, math.inf),
            self.scale_density,
            self.speed_density,
            lambda x: np.vectorize(self.scale_from_zero)(x) if np.ndim(x) else self.scale_from_zero(x),
            0.0,
        )


def logistic_h(model: LogisticSde, a, x) -> float:
    """P^x{T_a < inf}: the scale from 0 normalized at a, and 1 above a."""
    if not (x > 0 and a > 0):
        raise DomainError("logistic states must be positive")
    if x >= a:
        return 1.0
    return model.scale_from_zero(x) / model.scale_from_zero(a)


def logistic_conditioned_drift(model: LogisticSde, a, x, convention: str = "sigma2") -> float:
    """Drift of the process conditioned to hit a.

    ``convention="sigma2"`` adds sigma(x)^2 h'/h (Doob transform calculus);
    ``convention="bare"`` adds h'/h alone, for side-by-side comparison.
    """
    if not x > 0:
        raise DomainError("x must be positive")
    base = model.mu * x - model.kappa * x * x
    if x >= a:
        return base
    ratio = float(model.scale_density(x)) / model.scale_from_zero(x)
    if convention == "sigma2":
        return base + model.sigma**2 * x * x * ratio
    if convention == "bare":
        return base + ratio
    raise DomainError(f"unknown convention {convention!r}")
