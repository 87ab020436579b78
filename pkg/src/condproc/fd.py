"""Finite-volume discretization of the generator of an h-transformed diffusion.

The generator is written in divergence form, (1/(h^2 m')) (h^2 f'/s')', on each
side of the conditioning point a.  Node a carries the killing atom; the
derivative jump at a is not imposed row-by-row but follows from the flux
balance over the a-cell, which is the weak form of the interface conditions.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import GridError, SingularSystem
from .htransform import TransformedCharacteristics

_GL_X, _GL_W = np.polynomial.legendre.leggauss(6)


@dataclass(frozen=True)
class Grid:
    nodes: np.ndarray
    a: float

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if np.any(np.diff(nodes) <= 0):
            raise GridError("nodes must increase strictly")
        if not np.any(nodes == self.a):
            raise GridError(f"conditioning point {self.a} is not a node")
        object.__setattr__(self, "nodes", nodes)

    @property
    def a_index(self) -> int:
        return int(np.flatnonzero(self.nodes == self.a)[0])

    @classmethod
    def uniform(cls, a: float, left: float, right: float, dx: float) -> "Grid":
        """Uniform grid of spacing dx on [left, right] with a as a node."""
        n_left = int(round((a - left) / dx))
        n_right = int(round((right - a) / dx))
        return cls(a + dx * np.arange(-n_left, n_right + 1), a)


@dataclass(frozen=True)
class DiscreteOperator:
    """Tridiagonal operator A with (A u)_i = sub_i u_{i-1} + diag_i u_i + sup_i u_{i+1}.

    ``weights`` are the m^h masses of the cells; weights * A is symmetric.
    ``killing`` is the diagonal defect from the killing measure.
    """

    grid: Grid
    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    weights: np.ndarray
    killing: np.ndarray
    jump_coefficient: float  # h'(a-)/h(a) - h'(a+)/h(a)

    def matvec(self, u):
        u = np.asarray(u, dtype=float)
        out = self.diag * u
        out[1:] += self.sub[1:] * u[:-1]
        out[:-1] += self.sup[:-1] * u[1:]
        return out

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.sub[1:], -1) + np.diag(self.sup[:-1], 1)

    def row_sums(self) -> np.ndarray:
        s = self.diag + self.sub + self.sup
        return s

    def banded(self, shift: float = 0.0, scale: float = 1.0) -> np.ndarray:
        """Band storage of shift*I - scale*A for scipy.linalg.solve_banded."""
        ab = np.zeros((3, len(self.diag)))
        ab[0, 1:] = -scale * self.sup[:-1]
        ab[1] = shift - scale * self.diag
        ab[2, :-1] = -scale * self.sub[1:]
        return ab


def _cell_integral(f, lo, hi):
    """Gauss-Legendre integral of f over each [lo_i, hi_i]."""
    mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
    pts = mid[:, None] + half[:, None] * _GL_X[None, :]
    return half * (np.asarray(f(pts)) @ _GL_W)


def build_operator(tc: TransformedCharacteristics, grid: Grid) -> DiscreteOperator:
    """Divergence-form discretization with harmonic face coefficients.

    Face coefficient: harmonic mean of h^2/s' at the two neighbouring nodes.
    Cell mass: m^h over [x_{i-1/2}, x_{i+1/2}], split at the node so the
    kink of h at a falls on a subinterval boundary.  The outermost nodes see
    an absorbing ghost node one spacing further out.
    """
    x = grid.nodes
    n = len(x)
    ia = grid.a_index
    spacing = np.diff(x)
    ext = np.concatenate([[x[0] - spacing[0]], x, [x[-1] + spacing[-1]]])
    coef = 1.0 / np.asarray(tc.scale_density(ext), dtype=float)
    face = 2.0 * coef[:-1] * coef[1:] / (coef[:-1] + coef[1:])
    gaps = np.diff(ext)
    flux = face / gaps  # n + 1 faces
    half_lo = 0.5 * (ext[:-2] + x)
    half_hi = 0.5 * (x + ext[2:])
    weights = _cell_integral(tc.speed_density, half_lo, x) + _cell_integral(tc.speed_density, x, half_hi)
    kill = np.zeros(n)
    for loc, mass in tc.killing.atoms:
        if loc != grid.a:
            raise GridError("killing atoms must sit at the conditioning point")
        kill[ia] += mass
    if tc.killing.density is not None:
        kill += _cell_integral(tc.killing.density, half_lo, x) + _cell_integral(tc.killing.density, x, half_hi)
    sub = flux[:-1] / weights
    sup = flux[1:] / weights
    diag = -(flux[:-1] + flux[1:] + kill) / weights
    sub[0] = 0.0
    sup[-1] = 0.0
    h = tc.h
    ha = float(h(grid.a))
    jump = (float(h.left_deriv(grid.a)) - float(h.right_deriv(grid.a))) / ha
    return DiscreteOperator(grid, sub, diag, sup, weights, kill / weights, jump)


def resolvent_solve(op: DiscreteOperator, lam: float, f_values) -> np.ndarray:
    """Solve (lam I - A) u = f."""
    if not lam > 0:
        raise SingularSystem("lambda must be positive")
    try:
        u = linalg.solve_banded((1, 1), op.banded(lam), np.asarray(f_values, dtype=float))
    except linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from None
    if not np.all(np.isfinite(u)):
        raise SingularSystem("non-finite solution")
    return u


def semigroup_evolve(op: DiscreteOperator, t: float, f_values, steps: int) -> np.ndarray:
    """Implicit Euler approximation of exp(tA) f."""
    u = np.asarray(f_values, dtype=float).copy()
    if t == 0 or steps == 0:
        return u
    dt = t / steps
    ab = op.banded(1.0, dt)
    lu = linalg.solve_banded
    for _ in range(steps):
        u = lu((1, 1), ab, u)
    return u


def transition_probabilities(op: DiscreteOperator, x0: float, t: float, steps: int) -> np.ndarray:
    """Cell probabilities at time t for the discrete process started at node x0.

    Uses the symmetry of weights*A: row x0 of exp(tA) equals
    weights * exp(tA)(e_x0 / w_x0).
    """
    i = int(np.argmin(np.abs(op.grid.nodes - x0)))
    e = np.zeros(len(op.diag))
    e[i] = 1.0 / op.weights[i]
    return op.weights * semigroup_evolve(op, t, e, steps)


def cell_cdf(op: DiscreteOperator, probs):
    """Piecewise-linear CDF through the cell edges, normalized to the surviving mass."""
    x = op.grid.nodes
    edges = np.concatenate([[x[0] - 0.5 * (x[1] - x[0])], 0.5 * (x[1:] + x[:-1]), [x[-1] + 0.5 * (x[-1] - x[-2])]])
    cum = np.concatenate([[0.0], np.cumsum(probs)])
    cum /= cum[-1]
    return lambda y: np.interp(y, edges, cum)


def drift_limits(op: DiscreteOperator) -> tuple[float, float]:
    """First-order coefficients (sup - sub) * spacing in the rows next to a."""
    ia = op.grid.a_index
    x = op.grid.nodes
    left = (op.sup[ia - 1] - op.sub[ia - 1]) * (x[ia] - x[ia - 1])
    right = (op.sup[ia + 1] - op.sub[ia + 1]) * (x[ia + 1] - x[ia])
    return float(left), float(right)


def interface_jump_residual(op: DiscreteOperator, u) -> float:
    """(u'(a+) - u'(a-)) - jump * u(a) from one-sided difference quotients."""
    ia = op.grid.a_index
    x = op.grid.nodes
    right = (u[ia + 1] - u[ia]) / (x[ia + 1] - x[ia])
    left = (u[ia] - u[ia - 1]) / (x[ia] - x[ia - 1])
    return float(right - left - op.jump_coefficient * u[ia])
