"""Doob h-transforms: hitting functions, representing measures, new characteristics."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .diffusion import (
    Characteristics,
    DiffusionSpec,
    KillingMeasure,
    NULL_KILLING,
    fundamental_pair,
    quad,
)
from .errors import DomainError, InconsistentRepresentation


@dataclass(frozen=True)
class ExcessiveFn:
    """Positive excessive function with one-sided derivatives.

    ``kink`` is the single point where the one-sided derivatives may differ.
    """

    value: Callable
    left_deriv: Callable
    right_deriv: Callable
    x0: float
    kink: float | None = None

    def __call__(self, x):
        return self.value(x)

    def deriv(self, x, side: int = 1):
        return self.right_deriv(x) if side > 0 else self.left_deriv(x)

    @classmethod
    def normalized(cls, value, left, right, x0, kink=None):
        c = float(value(x0))
        if not c > 0:
            raise DomainError("h must be positive at the normalization point")
        return cls(
            lambda x: np.asarray(value(x)) / c,
            lambda x: np.asarray(left(x)) / c,
            lambda x: np.asarray(right(x)) / c,
            x0,
            kink,
        )


def constant_h(x0: float = 0.0) -> ExcessiveFn:
    one = lambda x: np.ones_like(np.asarray(x, dtype=float))
    zero = lambda x: np.zeros_like(np.asarray(x, dtype=float))
    return ExcessiveFn(one, zero, zero, x0)


def h_hit(chars: Characteristics, a: float) -> ExcessiveFn:
    """h(x) = P^x{T_a < inf}, normalized so that h(a) = 1.

    Below a this is (s(x) - s(l+))/(s(a) - s(l+)) when the lower end attracts
    and 1 otherwise; above a the mirror formula with the upper end.
    """
    s_lo, s_hi = chars.lower_scale, chars.upper_scale
    sc, sd = chars.scale, chars.scale_density
    s_a = float(sc(a))
    lo_att, hi_att = math.isfinite(s_lo), math.isfinite(s_hi)
    if not (lo_att or hi_att):
        raise DomainError("recurrent diffusion: h is identically 1")

    def value(x):
        x = np.asarray(x, dtype=float)
        s = np.asarray(sc(x), dtype=float)
        below = (s - s_lo) / (s_a - s_lo) if lo_att else np.ones_like(s)
        above = (s_hi - s) / (s_hi - s_a) if hi_att else np.ones_like(s)
        return np.where(x <= a, below, above)

    def deriv(x, side):
        x = np.asarray(x, dtype=float)
        d = np.asarray(sd(x), dtype=float)
        below = d / (s_a - s_lo) if lo_att else np.zeros_like(d)
        above = -d / (s_hi - s_a) if hi_att else np.zeros_like(d)
        on_left = (x < a) | ((x == a) & (side < 0))
        return np.where(on_left, below, above)

    return ExcessiveFn(value, lambda x: deriv(x, -1), lambda x: deriv(x, 1), a, a)


@dataclass(frozen=True)
class RepresentingMeasure:
    """Probability measure on [l, r] representing h through the zero-rate kernel."""

    interior: KillingMeasure = field(default=NULL_KILLING)
    atom_lower: float = 0.0
    atom_upper: float = 0.0

    def total_mass(self, interval) -> float:
        mass = self.atom_lower + self.atom_upper + sum(m for _, m in self.interior.atoms)
        if self.interior.density is not None:
            mass += quad(self.interior.density, interval.lower, interval.upper)
        return mass


def reconstruct_h(chars: Characteristics, nu: RepresentingMeasure, x0: float, x):
    """Rebuild h from its representing measure (kernel r0(x,y)/r0(x0,y))."""
    pair = fundamental_pair(chars)
    x = np.asarray(x, dtype=float)

    def kernel(y):
        return pair.r0(x, y) / pair.r0(x0, y)

    out = np.zeros_like(x)
    for loc, mass in nu.interior.atoms:
        out = out + mass * kernel(loc)
    if nu.interior.density is not None:
        dens = nu.interior.density
        lo, hi = chars.interval.lower, chars.interval.upper
        out = out + np.array(
            [quad(lambda y: float(pair.r0(u, y) / pair.r0(x0, y)) * dens(y), lo, hi) for u in np.ravel(x)]
        ).reshape(x.shape)
    if nu.atom_lower:
        out = out + nu.atom_lower * pair.phi0(x) / pair.phi0(x0)
    if nu.atom_upper:
        out = out + nu.atom_upper * pair.psi0(x) / pair.psi0(x0)
    return out


@dataclass(frozen=True)
class TransformedCharacteristics:
    """Characteristics of the h-process: s'/h^2, h^2 m', and the killing from nu."""

    scale_density: Callable
    speed_density: Callable
    killing: KillingMeasure
    h: ExcessiveFn
    base: Characteristics

    def rescaled(self, c: float) -> "TransformedCharacteristics":
        """Triple obtained from c*h instead of h (same process, other representative)."""
        sd, md, k = self.scale_density, self.speed_density, self.killing
        dens = None if k.density is None else (lambda y: c * c * k.density(y))
        return TransformedCharacteristics(
            lambda y: sd(y) / (c * c),
            lambda y: md(y) * c * c,
            KillingMeasure(dens, tuple((x, m * c * c) for x, m in k.atoms)),
            ExcessiveFn(lambda x: c * self.h(x), lambda x: c * self.h.left_deriv(x),
                        lambda x: c * self.h.right_deriv(x), self.h.x0, self.h.kink),
            self.base,
        )


def _default_probes(chars, x0, n=101):
    lo, hi = chars.interval.lower, chars.interval.upper
    left = max(x0 - 2.0, 0.5 * (lo + x0) if math.isfinite(lo) else -math.inf)
    right = min(x0 + 2.0, 0.5 * (hi + x0) if math.isfinite(hi) else math.inf)
    return np.linspace(left, right, n)


def transform_characteristics(chars: Characteristics, h: ExcessiveFn, nu: RepresentingMeasure,
                              probes=None, tol: float = 1e-6) -> TransformedCharacteristics:
    """Scale, speed and killing of the h-transformed diffusion."""
    chars._require_base()
    x0 = h.x0
    if probes is None:
        probes = _default_probes(chars, x0)
    probes = np.asarray(probes, dtype=float)
    rebuilt = reconstruct_h(chars, nu, x0, probes)
    err = np.max(np.abs(rebuilt - np.asarray(h(probes))))
    if not err <= tol:
        raise InconsistentRepresentation(f"representing measure reproduces h only to {err:.3g}")
    pair = fundamental_pair(chars)
    h0 = float(h(x0))

    def weight(y):
        return h0 * np.asarray(h(y)) / pair.r0(x0, y)

    atoms = tuple((loc, float(mass * weight(loc))) for loc, mass in nu.interior.atoms)
    dens = None
    if nu.interior.density is not None:
        nd = nu.interior.density
        dens = lambda y: weight(y) * nd(y)
    sd, md = chars.scale_density, chars.speed_density
    return TransformedCharacteristics(
        lambda y: np.asarray(sd(y)) / np.asarray(h(y)) ** 2,
        lambda y: np.asarray(h(y)) ** 2 * np.asarray(md(y)),
        KillingMeasure(dens, atoms),
        h,
        chars,
    )


def hit_representation(a: float) -> RepresentingMeasure:
    """Representing measure of h_hit(a) normalized at a: a unit atom at a."""
    return RepresentingMeasure(KillingMeasure(None, ((a, 1.0),)))


def transformed_drift(spec: DiffusionSpec, h: ExcessiveFn, x, side: int = 1):
    """b(x) + sigma(x)^2 h'(x)/h(x); at the kink the ``side`` derivative is used."""
    x = np.asarray(x, dtype=float)
    return np.asarray(spec.drift(x)) + np.asarray(spec.dispersion(x)) ** 2 * h.deriv(x, side) / h(x)


def transformed_resolvent_density(r, h: ExcessiveFn, x, y, lam, reference: str = "m"):
    """Resolvent density of the h-process built from the base oracle ``r`` (w.r.t. m).

    reference "m":  r_lam(x,y) h(y)/h(x);  reference "mh": r_lam(x,y)/(h(x)h(y)).
    """
    base = np.asarray(r(lam, x, y))
    hx, hy = np.asarray(h(x)), np.asarray(h(y))
    if reference == "m":
        return base * hy / hx
    if reference == "mh":
        return base / (hx * hy)
    raise DomainError(f"unknown reference {reference!r}")
