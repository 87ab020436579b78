"""Regular one-dimensional diffusions described by their characteristics.

A diffusion on an open interval is encoded by a scale density ``s'``, a speed
density ``m'`` and a killing measure.  Local time throughout the package is the
occupation density with respect to the speed measure.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, NamedTuple

import numpy as np
from scipy import integrate

from .errors import (
    DomainError,
    IndeterminateClassification,
    NormalizationError,
    QuadratureFailure,
)

EPSABS = 1e-10
EPSREL = 1e-9


def quad(f, a, b, points=None, limit=200):
    """Adaptive quadrature that turns scipy warnings into exceptions."""
    if a == b:
        return 0.0
    with warnings.catch_warnings(), np.errstate(over="ignore", invalid="ignore"):
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, _ = integrate.quad(f, a, b, epsabs=EPSABS, epsrel=EPSREL, limit=limit, points=points)
        except integrate.IntegrationWarning as exc:
            raise QuadratureFailure(str(exc).strip().splitlines()[0], (a, b)) from None
    if not math.isfinite(val):
        err = QuadratureFailure("non-finite integral", (a, b))
        err.nonfinite = True
        raise err
    return float(val)


class TailIntegral(NamedTuple):
    value: float  # inf when divergent
    finite: bool
    pieces: int


def _truncation_points(start, endpoint):
    direction = 1.0 if endpoint > start else -1.0
    k = 0
    while True:
        if math.isinf(endpoint):
            yield start + direction * 2.0 ** (k - 2)
        else:
            yield endpoint - (endpoint - start) * 2.0 ** -(k + 1)
        k += 1


def _settle_tail(pieces, endpoint, *, tol=1e-10, max_pieces=400, stall=8):
    """Sum nonnegative pieces of a truncated improper integral.

    Finite: pieces fall below tolerance, or decay geometrically at a stable
    ratio (ratio test; the remainder is extrapolated).  Divergent: the
    running sum overflows or the pieces stop shrinking for ``stall`` steps.
    """
    total = 0.0
    prev = None
    ratios = []
    flat = 0
    for k in range(max_pieces):
        try:
            piece = next(pieces)
        except StopIteration:
            return TailIntegral(total, True, k)
        except QuadratureFailure as exc:
            if getattr(exc, "nonfinite", False):
                return TailIntegral(math.inf, False, k)
            raise
        total += piece
        if not math.isfinite(total) or total > 1e200:
            return TailIntegral(math.inf, False, k)
        scale = max(1.0, total)
        if prev is not None and prev > 0:
            ratio = piece / prev
            ratios.append(ratio)
            if ratio >= 0.99 and piece > tol * scale:
                flat += 1
                if flat >= stall:
                    return TailIntegral(math.inf, False, k)
            else:
                flat = 0
            if piece <= tol * scale and ratio < 0.9:
                return TailIntegral(total, True, k)
            last = ratios[-4:]
            if len(last) == 4 and max(last) < 0.9 and max(last) - min(last) < 0.05 * max(last):
                return TailIntegral(total + piece * ratio / (1.0 - ratio), True, k)
        elif prev == 0.0 and piece == 0.0:
            return TailIntegral(total, True, k)
        prev = piece
    raise IndeterminateClassification(f"tail integral towards {endpoint} did not settle", total)


def improper_integral(f, start, endpoint, **kw):
    """Integrate ``f`` from ``start`` towards ``endpoint`` by geometric truncation.

    The truncation point approaches the endpoint by doubling (infinite endpoint)
    or halving the remaining gap (finite endpoint).
    """

    def pieces():
        prev = start
        for x in _truncation_points(start, endpoint):
            if x == prev:
                return
            lo, hi = sorted((prev, x))
            yield abs(quad(f, lo, hi))
            prev = x

    return _settle_tail(pieces(), endpoint, **kw)


@dataclass(frozen=True)
class Interval:
    lower: float = -math.inf
    upper: float = math.inf

    def __post_init__(self):
        if not self.lower < self.upper:
            raise DomainError(f"empty interval ({self.lower}, {self.upper})")

    def contains(self, x) -> bool:
        return self.lower < x < self.upper

    def interior_point(self) -> float:
        lo, hi = self.lower, self.upper
        if math.isinf(lo) and math.isinf(hi):
            return 0.0
        if math.isinf(lo):
            return hi - 1.0
        if math.isinf(hi):
            return lo + 1.0
        return 0.5 * (lo + hi)


@dataclass(frozen=True)
class DiffusionSpec:
    """SDE dX = b(X)dt + sigma(X)dW on an open interval.

    ``jit`` optionally carries numba versions ``(drift, dispersion, theta)``
    with signature ``f(x, theta)``, used by the Monte Carlo kernels.
    """

    interval: Interval
    drift: Callable[[float], float]
    dispersion: Callable[[float], float]
    jit: tuple | None = None


@dataclass(frozen=True)
class KillingMeasure:
    density: Callable[[float], float] | None = None
    atoms: tuple = ()

    def __post_init__(self):
        for loc, mass in self.atoms:
            if not mass > 0:
                raise DomainError(f"atom at {loc} has nonpositive mass {mass}")

    @property
    def is_null(self) -> bool:
        return self.density is None and not self.atoms

    def atom_mass(self, loc, tol=1e-12) -> float:
        return sum(m for x, m in self.atoms if abs(x - loc) <= tol)


NULL_KILLING = KillingMeasure()


class BoundaryClass(enum.Enum):
    EXIT = "exit"
    ENTRANCE = "entrance"
    REGULAR = "regular"
    NATURAL_ATTRACTIVE = "natural-attractive"
    NATURAL_NONATTRACTIVE = "natural-nonattractive"


@dataclass(frozen=True)
class Characteristics:
    """Scale density, scale function, speed density and killing measure.

    ``scale`` is an antiderivative of ``scale_density`` vanishing at ``anchor``;
    ``anchor`` may equal an endpoint, meaning s vanishes in the limit there.
    """

    interval: Interval
    scale_density: Callable
    speed_density: Callable
    scale: Callable = None
    anchor: float = 0.0
    killing: KillingMeasure = field(default=NULL_KILLING)

    def __post_init__(self):
        if self.scale is None:
            sd = self.scale_density
            anchor = self.anchor
            if not self.interval.contains(anchor):
                raise DomainError("quadrature scale needs an interior anchor")

            def scale(x):
                return _vectorized(lambda u: quad(sd, anchor, u), x)

            object.__setattr__(self, "scale", scale)

    def _require_base(self):
        if not self.killing.is_null:
            raise DomainError("base-process operation called with nonnull killing")

    @cached_property
    def lower_scale(self) -> float:
        """lim s(x) as x decreases to the lower endpoint (may be -inf)."""
        if self.anchor == self.interval.lower:
            return 0.0
        ref = self.anchor if self.interval.contains(self.anchor) else self.interval.interior_point()
        tail = improper_integral(self.scale_density, ref, self.interval.lower)
        return float(self.scale(ref)) - tail.value

    @cached_property
    def upper_scale(self) -> float:
        """lim s(x) as x increases to the upper endpoint (may be +inf)."""
        if self.anchor == self.interval.upper:
            return 0.0
        ref = self.anchor if self.interval.contains(self.anchor) else self.interval.interior_point()
        tail = improper_integral(self.scale_density, ref, self.interval.upper)
        return float(self.scale(ref)) + tail.value

    def speed_mass(self, a, b) -> float:
        return quad(self.speed_density, a, b)

    def anchored_at_lower(self) -> "Characteristics":
        """Same diffusion with the scale shifted so that s(lower+) = 0."""
        if self.anchor == self.interval.lower:
            return self
        offset = self.lower_scale
        if not math.isfinite(offset):
            raise NormalizationError("scale diverges at the lower endpoint")
        base = self.scale
        return Characteristics(
            self.interval,
            self.scale_density,
            self.speed_density,
            lambda x: base(x) - offset,
            self.interval.lower,
            self.killing,
        )


def _vectorized(f, x):
    if np.ndim(x) == 0:
        return f(float(x))
    return np.array([f(float(u)) for u in np.ravel(x)]).reshape(np.shape(x))


def _drift_exponent(spec: DiffusionSpec, x0: float):
    def integrand(y):
        return 2.0 * spec.drift(y) / spec.dispersion(y) ** 2

    def big_b(x):
        return _vectorized(lambda u: quad(integrand, x0, u), x)

    return big_b


def scale_from_drift(spec: DiffusionSpec, x0: float = None):
    """Return ``(s', s)`` with s'(x) = exp(-B(x)), B(x) = int_x0^x 2b/sigma^2."""
    if x0 is None:
        x0 = spec.interval.interior_point()
    big_b = _drift_exponent(spec, x0)

    def scale_density(x):
        return np.exp(-big_b(x))

    def scale(x):
        return _vectorized(lambda u: quad(scale_density, x0, u), x)

    return scale_density, scale


def speed_from_drift(spec: DiffusionSpec, x0: float = None):
    """Return m'(x) = 2 sigma(x)^-2 exp(B(x))."""
    if x0 is None:
        x0 = spec.interval.interior_point()
    big_b = _drift_exponent(spec, x0)

    def speed_density(x):
        return 2.0 / np.asarray(spec.dispersion(x)) ** 2 * np.exp(big_b(x))

    return speed_density


def characteristics_from_spec(spec: DiffusionSpec, x0: float = None) -> Characteristics:
    if x0 is None:
        x0 = spec.interval.interior_point()
    sd, s = scale_from_drift(spec, x0)
    md = speed_from_drift(spec, x0)
    return Characteristics(spec.interval, sd, md, s, x0)


class HitProbabilities(NamedTuple):
    p_ab: float  # hit a before b
    p_ba: float  # hit b before a


def hitting_prob(chars: Characteristics, a, b, x) -> HitProbabilities:
    """Probabilities of exiting (a, b) at each end, started from x."""
    chars._require_base()
    if a > b or x < a or x > b:
        raise DomainError(f"x={x} not in [{a}, {b}]")
    if x == a:
        return HitProbabilities(1.0, 0.0)
    if x == b:
        return HitProbabilities(0.0, 1.0)
    sa, sb, sx = (float(chars.scale(u)) for u in (a, b, x))
    p_ba = (sx - sa) / (sb - sa)
    return HitProbabilities(1.0 - p_ba, p_ba)


def green_ab(chars: Characteristics, a, b, x, y) -> float:
    """Green function of the diffusion killed on leaving (a, b), w.r.t. m."""
    chars._require_base()
    if x < a or x > b or y < a or y > b:
        raise DomainError(f"({x}, {y}) not in [{a}, {b}]^2")
    if x in (a, b) or y in (a, b) or a == b:
        return 0.0
    sa, sb = float(chars.scale(a)), float(chars.scale(b))
    lo, hi = float(chars.scale(min(x, y))), float(chars.scale(max(x, y)))
    return (lo - sa) * (sb - hi) / (sb - sa)


def mean_exit_time(chars: Characteristics, a, b, x) -> float:
    """Expected exit time of (a, b): integral of G(x, .) against the speed measure."""
    chars._require_base()
    if x < a or x > b:
        raise DomainError(f"x={x} not in [{a}, {b}]")
    if x in (a, b):
        return 0.0
    sa, sb, sx = (float(chars.scale(u)) for u in (a, b, x))
    md, sc = chars.speed_density, chars.scale
    # G(x,y) factorizes on each side of x
    left = quad(lambda y: (float(sc(y)) - sa) * md(y), a, x)
    right = quad(lambda y: (sb - float(sc(y))) * md(y), x, b)
    return ((sb - sx) * left + (sx - sa) * right) / (sb - sa)


def _nested_tail(outer, inner, z, endpoint):
    """int_z^endpoint outer(x) * |int_z^x inner| dx by geometric truncation."""

    def pieces():
        prev, acc = z, 0.0
        for x in _truncation_points(z, endpoint):
            if x == prev:
                return
            lo, hi = sorted((prev, x))
            base, node = acc, prev

            def g(u):
                a, b = sorted((node, u))
                return (base + quad(inner, a, b)) * outer(u)

            with np.errstate(over="ignore", invalid="ignore"):
                piece = abs(quad(g, lo, hi))
                acc += abs(quad(inner, lo, hi))
            yield piece
            prev = x

    return _settle_tail(pieces(), endpoint)


def classify_boundary(chars: Characteristics, endpoint: str, z: float = None) -> BoundaryClass:
    """Feller classification of the lower or upper endpoint.

    Exit test:     int m((x, z)) s(dx) near the endpoint.
    Entrance test: int |s(z) - s(x)| m(dx) near the endpoint.
    """
    chars._require_base()
    if endpoint not in ("lower", "upper"):
        raise DomainError("endpoint must be 'lower' or 'upper'")
    end = chars.interval.lower if endpoint == "lower" else chars.interval.upper
    if z is None:
        z = chars.interval.interior_point()
    try:
        exit_ = _nested_tail(chars.scale_density, chars.speed_density, z, end)
        entrance = _nested_tail(chars.speed_density, chars.scale_density, z, end)
    except IndeterminateClassification as exc:
        raise IndeterminateClassification(
            f"{endpoint} endpoint unresolved", exc.exit_partial, None
        ) from None
    if exit_.finite and entrance.finite:
        return BoundaryClass.REGULAR
    if exit_.finite:
        return BoundaryClass.EXIT
    if entrance.finite:
        return BoundaryClass.ENTRANCE
    limit = chars.lower_scale if endpoint == "lower" else chars.upper_scale
    return BoundaryClass.NATURAL_ATTRACTIVE if math.isfinite(limit) else BoundaryClass.NATURAL_NONATTRACTIVE


@dataclass(frozen=True)
class FundamentalPair:
    """Increasing and decreasing solutions at rate zero: r_0 = psi0(x^y) phi0(x v y)."""

    psi0: Callable
    phi0: Callable

    def r0(self, x, y):
        return self.psi0(np.minimum(x, y)) * self.phi0(np.maximum(x, y))


def fundamental_pair(chars: Characteristics) -> FundamentalPair:
    """Zero-rate pair for a transient diffusion.

    With only the lower end attracting this is (s - s(l+), 1).  When both
    ends attract the decreasing member is (s(r-) - s)/(s(r-) - s(l+)).
    """
    chars._require_base()
    s_lo = chars.lower_scale
    if not math.isfinite(s_lo):
        raise NormalizationError("lower endpoint is not attracting; s(l+) = -inf")
    s_hi = chars.upper_scale
    sc = chars.scale

    def psi0(x):
        return np.asarray(sc(x)) - s_lo

    if math.isinf(s_hi):
        def phi0(x):
            return np.ones_like(np.asarray(x, dtype=float))
    else:
        def phi0(x):
            return (s_hi - np.asarray(sc(x))) / (s_hi - s_lo)

    return FundamentalPair(psi0, phi0)


def r0_drift_to_lower(chars: Characteristics, x, y):
    """Zero-rate Green density w.r.t. m for a process drifting to the lower end."""
    chars._require_base()
    s_lo = chars.lower_scale
    if not math.isfinite(s_lo):
        raise NormalizationError("lim s at the lower endpoint is -inf")
    if math.isfinite(chars.upper_scale):
        raise DomainError("upper endpoint also attracts; use fundamental_pair(...).r0")
    return np.asarray(chars.scale(np.minimum(x, y))) - s_lo
