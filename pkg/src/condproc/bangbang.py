"""Resolvent algebra of the resurrected (bang-bang) process."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special

from .diffusion import quad
from .errors import DegenerateDenominator, DomainError


@dataclass(frozen=True)
class ResolventOracle:
    """Map (lam, x, y) -> resolvent density with respect to ``reference``.

    ``reference_density`` is the Lebesgue density of the reference measure,
    needed to compose two resolvents.  ``kinks`` lists points where the
    densities are not smooth (used as quadrature breakpoints).
    """

    eval: Callable
    reference: str
    reference_density: Callable
    kinks: tuple = ()

    def __call__(self, lam, x, y):
        return self.eval(lam, x, y)


def bm_oracle(model) -> ResolventOracle:
    """Resolvent of BM with drift -mu w.r.t. its speed measure."""
    mu = model.mu
    return ResolventOracle(model.resolvent_m, "m", lambda y: 2 * math.exp(-2 * mu * y))


@dataclass(frozen=True)
class BangBangResolvent:
    base: ResolventOracle
    a: float = 0.0

    @property
    def r0aa(self) -> float:
        return float(self.base(0.0, self.a, self.a))

    def h(self, x):
        return np.asarray(self.base(0.0, x, self.a)) / self.r0aa

    def denominator(self, lam) -> float:
        d = self.r0aa - float(self.base(lam, self.a, self.a))
        if not d > 1e-14 * max(1.0, self.r0aa):
            raise DegenerateDenominator(f"r_0(a,a) - r_lam(a,a) = {d:.3g}")
        return d


def bb_resolvent_density(bb: BangBangResolvent, lam, x, y):
    """Density w.r.t. m of the resolvent of the process resurrected at a."""
    if not lam > 0:
        raise DomainError("lambda must be positive")
    r, a = bb.base, bb.a
    d = bb.denominator(lam)
    core = np.asarray(r(lam, x, y)) + np.asarray(r(lam, x, a)) * np.asarray(r(lam, a, y)) / d
    return np.asarray(r(0.0, y, a)) / np.asarray(r(0.0, x, a)) * core


def bb_symmetric_density(bb: BangBangResolvent, lam, x, y):
    """The same resolvent re-referenced to m^h = h^2 m (symmetric in x, y)."""
    r, a = bb.base, bb.a
    d = bb.denominator(lam)
    core = np.asarray(r(lam, x, y)) + np.asarray(r(lam, x, a)) * np.asarray(r(lam, a, y)) / d
    return bb.r0aa**2 / (np.asarray(r(0.0, x, a)) * np.asarray(r(0.0, y, a))) * core


def killed_bb_resolvent_density(bb: BangBangResolvent, lam, x, y, rate=None):
    """Resolvent (w.r.t. m) of the bang-bang process killed at local-time rate ``rate``.

    Uses R^k = R^b - rate R^b(., a) R^b(a, .)/(1 + rate r^b(a, a)); with the
    default rate 1/r_0(a,a) this is the resolvent of the h-process.
    """
    if rate is None:
        rate = 1.0 / bb.r0aa
    a = bb.a
    rxa = bb_resolvent_density(bb, lam, x, a)
    ray = bb_resolvent_density(bb, lam, a, y)
    raa = bb_resolvent_density(bb, lam, a, a)
    return bb_resolvent_density(bb, lam, x, y) - rate * rxa * ray / (1.0 + rate * raa)


def bb_oracle(bb: BangBangResolvent) -> ResolventOracle:
    """Symmetric bang-bang oracle referenced to m^h."""
    mref = bb.base.reference_density
    h = bb.h
    return ResolventOracle(
        lambda lam, x, y: bb_symmetric_density(bb, lam, x, y),
        "mh",
        lambda y: float(h(y)) ** 2 * mref(y),
        (bb.a,),
    )


def bb_kill_rate(oracle: ResolventOracle, a) -> float:
    """Rate of the exponential total local time at a: 1/r_0(a,a)."""
    r0 = float(oracle(0.0, a, a))
    if not (0 < r0 < math.inf):
        raise DegenerateDenominator(f"r_0(a,a) = {r0}")
    return 1.0 / r0


def compose(oracle: ResolventOracle, lam, chi, x, y, tail: float = 1e-12) -> float:
    """(R_lam R_chi)(x, y) by quadrature against the reference measure."""
    def f(z):
        return float(oracle(lam, x, z)) * float(oracle(chi, z, y)) * oracle.reference_density(z)

    pts = sorted({float(x), float(y), *map(float, oracle.kinks)})
    total = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        total += quad(f, lo, hi)
    # tails: extend until a unit block contributes below the threshold
    for edge, step in ((pts[0], -1.0), (pts[-1], 1.0)):
        lo = edge
        while True:
            hi = lo + step * 4.0
            piece = quad(f, min(lo, hi), max(lo, hi))
            total += piece
            if abs(piece) < tail * max(abs(total), 1e-300) or abs(piece) < 1e-300:
                break
            lo = hi
    return total


def check_resolvent_equation(oracle: ResolventOracle, lam, chi, x, y) -> float:
    """Residual of R_lam - R_chi + (lam - chi) R_lam R_chi at (x, y)."""
    if not (lam > 0 and chi > 0):
        raise DomainError("rates must be positive")
    if lam == chi:
        raise DomainError("need lam != chi")
    lhs = float(oracle(lam, x, y)) - float(oracle(chi, x, y))
    return lhs + (lam - chi) * compose(oracle, lam, chi, x, y)


def ou_bb_speed_density(gamma, x):
    """Speed density erfc(|x| sqrt|gamma|)^2 * 2 e^{-gamma x^2} of the OU bang-bang process."""
    if not gamma < 0:
        raise DomainError("gamma must be negative")
    z = np.abs(np.asarray(x, dtype=float)) * math.sqrt(-gamma)
    # erfc(z)^2 e^{z^2} = erfcx(z)^2 e^{-z^2}, stable for large z
    return 2 * special.erfcx(z) ** 2 * np.exp(-(z**2))


def ou_quadratic_residual(gamma, nodes=(0.0, 1.0, 2.0), probe=3.0) -> float:
    """Misfit at ``probe`` of the quadratic through log-density at three nodes."""
    xs = np.asarray(nodes, dtype=float)
    ys = np.log(ou_bb_speed_density(gamma, xs))
    coef = np.polyfit(xs, ys, 2)
    return abs(np.polyval(coef, probe) - math.log(ou_bb_speed_density(gamma, probe)))


def not_ou(gamma, threshold: float = 0.1) -> bool:
    """True when the log speed density is visibly not a quadratic c - g x^2.

    An OU speed density is a Gaussian-type exp(c - g x^2), whose log is an even
    quadratic; a large misfit at the probe rules that shape out.
    """
    return ou_quadratic_residual(gamma) > threshold
