"""Pivotal sampling on an interval for degree-d polynomial regression.

The leverage function of degree-``d`` polynomials under the uniform measure
on ``[-1, 1]`` is ``tau(t) = sum_i L_i(t)^2`` with ``L_i`` the normalized
Legendre polynomials.  Pivotal sampling with marginals ``k tau / (d+1)`` and
a left-to-right competition order picks exactly one point from each of ``k``
adjacent cells of equal mass, each point distributed like ``tau`` restricted
to its cell.  This module builds those cells, draws the points and measures
how well the resulting weighted point set reproduces ``int p^2``.

All routines work in the reference coordinate ``t`` in ``[-1, 1]``; a
general interval ``[lo, hi]`` is handled by the affine maps on
:class:`LeverageDensity`.
"""
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import OutOfDomainError, QuadratureFailureError, ZeroPolynomialError
from .features import legendre_normalized
from .matrix import weighted_least_squares
from .rng import as_generator

_CELL_GRID = 512


@dataclass(frozen=True)
class LeverageDensity:
    degree: int
    domain: tuple = (-1.0, 1.0)

    def __post_init__(self):
        if self.degree < 0:
            raise ValueError(f"degree must be non-negative, got {self.degree}")
        lo, hi = self.domain
        if not hi > lo:
            raise ValueError(f"empty domain {self.domain}")

    @property
    def total_mass(self):
        return float(self.degree + 1)

    def to_reference(self, s):
        lo, hi = self.domain
        return 2.0 * (np.asarray(s, dtype=np.float64) - lo) / (hi - lo) - 1.0

    def from_reference(self, t):
        lo, hi = self.domain
        return lo + (np.asarray(t, dtype=np.float64) + 1.0) * (hi - lo) / 2.0

    def weight(self, t):
        """Probability density ``w(t) = tau(t) / (d + 1)`` on ``[-1, 1]``."""
        return tau(self, t) / self.total_mass

    def cumulative(self, t):
        """``int_{-1}^{t} tau(s) ds``, exact up to rounding (tau has degree 2d)."""
        t = np.asarray(t, dtype=np.float64)
        nodes, wts = np.polynomial.legendre.leggauss(self.degree + 2)
        half = (t[..., None] + 1.0) / 2.0
        s = -1.0 + half * (nodes + 1.0)
        return (tau(self, s) * wts).sum(axis=-1) * half[..., 0]


@dataclass(frozen=True)
class IntervalPartition:
    boundaries: np.ndarray

    @property
    def k(self):
        return self.boundaries.shape[0] - 1

    @property
    def widths(self):
        return np.diff(self.boundaries)


def tau(density, t):
    """Polynomial leverage function ``sum_{i<=d} L_i(t)^2``."""
    vals = legendre_normalized(t, density.degree)
    return np.einsum("...i,...i->...", vals, vals)


def build_partition(density, k, tol=1e-10):
    """Cells ``I_1..I_k`` of ``[-1, 1]`` each holding ``1/k`` of the tau mass."""
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    total = density.total_mass
    bounds = np.empty(k + 1)
    bounds[0], bounds[-1] = -1.0, 1.0
    for j in range(1, k):
        target = j * total / k
        bounds[j] = brentq(lambda t: density.cumulative(t) - target, bounds[j - 1], 1.0, xtol=1e-13)
    cells = np.diff(density.cumulative(bounds)) * k / total
    if np.max(np.abs(cells - 1.0)) > tol * max(1.0, k):
        raise QuadratureFailureError(f"cell masses off by {np.max(np.abs(cells - 1.0)):.3e}")
    return IntervalPartition(bounds)


def sample_continuum(density, partition, rng):
    """One point per cell, distributed proportionally to tau within the cell.

    Uses an inverse CDF tabulated by the trapezoid rule on a 512-point grid
    per cell.
    """
    gen = as_generator(rng)
    lo = partition.boundaries[:-1, None]
    hi = partition.boundaries[1:, None]
    grid = lo + (hi - lo) * np.linspace(0.0, 1.0, _CELL_GRID)
    dens = tau(density, grid)
    steps = 0.5 * (dens[:, 1:] + dens[:, :-1]) * np.diff(grid, axis=1)
    cdf = np.concatenate([np.zeros((grid.shape[0], 1)), np.cumsum(steps, axis=1)], axis=1)
    cdf /= cdf[:, -1:]
    u = gen.random(grid.shape[0])
    return np.array([np.interp(u[c], cdf[c], grid[c]) for c in range(grid.shape[0])])


def _check_points(points):
    points = np.asarray(points, dtype=np.float64).reshape(-1)
    if np.any(np.abs(points) > 1.0 + 1e-12):
        raise OutOfDomainError("points must lie in [-1, 1]")
    return points


def sample_weights(density, points):
    """Per-point multipliers ``1 / (k w(t_i))`` of the sampled quadrature rule."""
    points = _check_points(points)
    return 1.0 / (points.shape[0] * density.weight(points))


def embedding_error(density, points, poly_coeffs, weights=None):
    """Relative error of ``(1/k) sum p(t_i)^2 / w(t_i)`` as an estimate of ``int p^2``.

    ``poly_coeffs`` are in the normalized Legendre basis, so ``int p^2`` is
    their squared norm.  ``weights`` overrides the per-point multipliers,
    e.g. with Gauss quadrature weights.
    """
    points = _check_points(points)
    c = np.asarray(poly_coeffs, dtype=np.float64).reshape(-1)
    exact = float(c @ c)
    if exact == 0.0:
        raise ZeroPolynomialError("polynomial has zero L2 norm")
    vals = legendre_normalized(points, c.shape[0] - 1) @ c
    if weights is None:
        weights = sample_weights(density, points)
    approx = float(np.sum(np.asarray(weights) * vals**2))
    return abs(exact - approx) / exact


def gram_matrix(density, points):
    """``(1/k) sum L(t_i) L(t_i)^T / w(t_i)``; tends to the identity as k grows."""
    points = _check_points(points)
    vals = legendre_normalized(points, density.degree)
    scaled = vals * np.sqrt(sample_weights(density, points))[:, None]
    return scaled.T @ scaled


def fit_polynomial(density, points, values):
    """Weighted least-squares fit in the normalized Legendre basis.

    Rows are scaled by ``1 / sqrt(k w(t_i))``, the continuum analogue of
    reweighting sampled rows by ``1 / sqrt(p_i)``.
    """
    points = _check_points(points)
    sw = np.sqrt(sample_weights(density, points))
    a = legendre_normalized(points, density.degree) * sw[:, None]
    return weighted_least_squares(a, np.asarray(values, dtype=np.float64) * sw)
