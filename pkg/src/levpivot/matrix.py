"""Dense linear algebra used throughout the package.

Matrices are plain 2-D float64 ``numpy`` arrays; :func:`as_matrix` is the
single gate that validates shape and finiteness.  Factorizations go through
Householder QR with column pivoting (LAPACK ``geqp3`` via scipy).  Normal
equations are never used for solving.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import DimensionMismatchError, NonSquareError, RankDeficientError

_EPS = np.finfo(np.float64).eps


def as_matrix(a, name="matrix"):
    """Return ``a`` as a C-contiguous float64 2-D array, validating it."""
    a = np.array(a, dtype=np.float64, copy=True, order="C")
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise DimensionMismatchError(f"{name} must be a non-empty 2-D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return a


def as_vector(b, name="vector"):
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(b)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return b


@dataclass(frozen=True)
class RegressionSolution:
    coefficients: np.ndarray
    residual_norm_sq: float
    rank: int
    rank_deficient: bool = False


def _rank_tolerance(r_diag, shape):
    return max(shape) * _EPS * (abs(r_diag[0]) if r_diag.size else 0.0)


def orthonormal_basis(a):
    """Orthonormal basis for the column span of a full-column-rank matrix.

    Raises RankDeficientError (carrying the effective rank) when the pivoted
    QR reveals fewer than ``cols`` independent columns.
    """
    a = as_matrix(a, "a")
    n, d = a.shape
    if n < d:
        raise RankDeficientError(f"need rows >= cols, got {n}x{d}", rank=n)
    q, r, _ = sla.qr(a, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    rank = int(np.count_nonzero(diag > _rank_tolerance(diag, a.shape)))
    if rank < d:
        raise RankDeficientError(f"matrix has effective rank {rank} < {d} columns", rank=rank)
    return q


def weighted_least_squares(a_sub, b_sub):
    """Solve ``min ||a_sub x - b_sub||`` by pivoted QR.

    The row weights are expected to be folded into ``a_sub`` and ``b_sub``
    already (see :func:`levpivot.sampler.subsample_system`).  A rank-deficient
    system falls back to the minimum-norm SVD solution and is flagged.
    """
    a_sub = as_matrix(a_sub, "a_sub")
    b_sub = as_vector(b_sub, "b_sub")
    n, d = a_sub.shape
    if b_sub.shape[0] != n:
        raise DimensionMismatchError(f"a_sub has {n} rows but b_sub has length {b_sub.shape[0]}")

    if n >= d:
        q, r, perm = sla.qr(a_sub, mode="economic", pivoting=True)
        diag = np.abs(np.diag(r))
        rank = int(np.count_nonzero(diag > _rank_tolerance(diag, a_sub.shape)))
    else:
        rank = -1

    if rank == d:
        z = sla.solve_triangular(r, q.T @ b_sub)
        x = np.empty(d)
        x[perm] = z
        deficient = False
    else:
        # same relative cutoff as the QR rank test
        x, _, rank, _ = sla.lstsq(a_sub, b_sub, cond=max(n, d) * _EPS, lapack_driver="gelsd")
        deficient = True

    resid = a_sub @ x - b_sub
    return RegressionSolution(x, float(resid @ resid), int(rank), deficient)


def spectral_deviation_from_identity(m, rtol=1e-8, max_iter=10_000):
    """``||m - I||_2`` for a symmetric ``m`` by power iteration.

    Iterates with ``(m - I)^2`` so that eigenvalues of equal magnitude and
    opposite sign do not make the estimate oscillate.
    """
    m = as_matrix(m, "m")
    if m.shape[0] != m.shape[1]:
        raise NonSquareError(f"expected a square matrix, got {m.shape}")
    n = m.shape[0]
    e = 0.5 * (m + m.T) - np.eye(n)
    if not np.any(e):
        return 0.0

    start = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    est, converged = _power_norm(e, start, rtol, max_iter)
    if not converged:
        # alternating-sign start can sit orthogonal to the top eigenvector
        start = np.random.default_rng(n).standard_normal(n)
        est2, _ = _power_norm(e, start, rtol, max_iter)
        est = max(est, est2)
    return est


def _power_norm(e, v, rtol, max_iter):
    v = v / np.linalg.norm(v)
    for _ in range(max_iter):
        ev = e @ v
        rho = ev @ ev  # Rayleigh quotient of e^2
        w = e @ ev
        if rho == 0.0:
            return 0.0, False
        if np.linalg.norm(w - rho * v) <= rtol * rho:
            return float(np.sqrt(rho)), True
        v = w / np.linalg.norm(w)
    return float(np.linalg.norm(e @ v)), False


def read_matrix_csv(path):
    return as_matrix(np.loadtxt(path, delimiter=",", ndmin=2), str(path))


def write_matrix_csv(path, a):
    a = np.asarray(a, dtype=np.float64)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    np.savetxt(path, a, delimiter=",", fmt="%.17g")
