"""Feature maps: total-degree monomials, normalized Legendre, Chebyshev grids."""
from dataclasses import dataclass, field
from itertools import product
from math import comb
import json

import numpy as np

from .errors import DimensionMismatchError, OutOfDomainError
from .matrix import as_matrix


def graded_exponents(input_dim, degree):
    """Exponent tuples with total degree <= ``degree`` in graded-lex order.

    Within a degree, tuples are sorted lexicographically descending, so for two
    variables the order is 1, x, y, x^2, xy, y^2, ...
    """
    terms = []
    for total in range(degree + 1):
        block = [e for e in product(range(total + 1), repeat=input_dim) if sum(e) == total]
        terms.extend(sorted(block, reverse=True))
    return terms


@dataclass(frozen=True)
class PolynomialBasisSpec:
    input_dim: int
    degree: int
    term_exponents: tuple = field(init=False, repr=False)

    def __post_init__(self):
        if self.input_dim < 1 or self.degree < 0:
            raise ValueError(f"bad basis spec q={self.input_dim}, p={self.degree}")
        object.__setattr__(self, "term_exponents", tuple(graded_exponents(self.input_dim, self.degree)))

    @property
    def n_terms(self):
        return comb(self.input_dim + self.degree, self.input_dim)

    def to_json(self):
        return json.dumps({"input_dim": self.input_dim, "degree": self.degree})

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text)
        return cls(int(obj["input_dim"]), int(obj["degree"]))


def expand(x, spec):
    """Design matrix of all monomials of ``x`` up to ``spec.degree``."""
    x = as_matrix(x, "x")
    if x.shape[1] != spec.input_dim:
        raise DimensionMismatchError(f"x has {x.shape[1]} columns, basis expects {spec.input_dim}")
    # powers[j][e] = x[:, j] ** e, built by repeated multiplication
    powers = []
    for j in range(spec.input_dim):
        col = np.ones((spec.degree + 1, x.shape[0]))
        for e in range(1, spec.degree + 1):
            col[e] = col[e - 1] * x[:, j]
        powers.append(col)
    out = np.empty((x.shape[0], len(spec.term_exponents)))
    for t, exps in enumerate(spec.term_exponents):
        v = powers[0][exps[0]].copy()
        for j in range(1, spec.input_dim):
            if exps[j]:
                v *= powers[j][exps[j]]
        out[:, t] = v
    return out


def legendre_normalized(t, max_degree):
    """Values ``L_0(t) .. L_max_degree(t)`` of the L2([-1, 1])-normalized Legendre polynomials.

    ``t`` may be a scalar or an array; the degree axis is last.
    """
    t = np.asarray(t, dtype=np.float64)
    if np.any(np.abs(t) > 1.0 + 1e-12):
        raise OutOfDomainError("Legendre evaluation requires |t| <= 1")
    out = np.empty(t.shape + (max_degree + 1,))
    out[..., 0] = 1.0
    if max_degree >= 1:
        out[..., 1] = t
    for n in range(1, max_degree):
        out[..., n + 1] = ((2 * n + 1) * t * out[..., n] - n * out[..., n - 1]) / (n + 1)
    out *= np.sqrt(np.arange(max_degree + 1) + 0.5)
    return out


def chebyshev_nodes(m):
    i = np.arange(1, m + 1)
    return np.cos((2 * i - 1) * np.pi / (2 * m))


def chebyshev_grid(points_per_axis, dims):
    """Tensor grid of first-kind Chebyshev nodes on ``[-1, 1]^dims``."""
    if points_per_axis < 1 or dims not in (1, 2, 3):
        raise ValueError(f"need points_per_axis >= 1 and dims in 1..3, got {points_per_axis}, {dims}")
    nodes = chebyshev_nodes(points_per_axis)
    mesh = np.meshgrid(*([nodes] * dims), indexing="ij")
    return np.column_stack([g.ravel() for g in mesh])


def scale_to_unit_box(x, lo, hi):
    """Affine map of each column from ``[lo_j, hi_j]`` onto ``[-1, 1]``."""
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    return 2.0 * (np.asarray(x, dtype=np.float64) - lo) / (hi - lo) - 1.0


def unscale_from_unit_box(z, lo, hi):
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    return lo + (np.asarray(z, dtype=np.float64) + 1.0) * (hi - lo) / 2.0
