"""Leverage scores and exact-size inclusion probabilities."""
from dataclasses import dataclass

import numpy as np

from .errors import BadInputError, InfeasibleKError
from .matrix import orthonormal_basis


@dataclass(frozen=True)
class LeverageScores:
    scores: np.ndarray
    rank: int

    def __len__(self):
        return self.scores.shape[0]


@dataclass(frozen=True)
class InclusionProbabilities:
    """Probabilities ``min(1, ceiling_constant * base_i)`` summing to ``k``.

    ``base`` is the vector the constant multiplies: the leverage scores when
    built through :func:`inclusion_probabilities`, otherwise whatever was
    handed to :func:`probability_ceiling`.
    """

    probs: np.ndarray
    k: int
    ceiling_constant: float

    def __len__(self):
        return self.probs.shape[0]

    @property
    def n(self):
        return self.probs.shape[0]

    @property
    def certain(self):
        """Indices that are always sampled."""
        return np.flatnonzero(self.probs >= 1.0)

    @property
    def uncertain(self):
        return np.flatnonzero(self.probs < 1.0)


def leverage_scores(a):
    """Squared row norms of an orthonormal basis of ``a``'s column span."""
    u = orthonormal_basis(a)
    scores = np.einsum("ij,ij->i", u, u)
    np.clip(scores, 0.0, 1.0, out=scores)
    return LeverageScores(scores, u.shape[1])


def probability_ceiling(initial, k, rank=None):
    """Cap probabilities at one and rescale the rest until none exceed one.

    ``initial`` must already sum to ``k``; typically it is ``(k / d) * tau``.
    Pass ``rank`` (the ``d`` used to build ``initial``) to get the ceiling
    constant expressed relative to the leverage scores; otherwise it is
    relative to ``initial``.
    """
    p = np.array(initial, dtype=np.float64).reshape(-1)
    n = p.shape[0]
    if k > n:
        raise InfeasibleKError(f"cannot draw k={k} from n={n} rows")
    if k < 1:
        raise InfeasibleKError(f"k must be positive, got {k}")
    if np.any(p < 0) or not np.all(np.isfinite(p)):
        raise BadInputError("initial probabilities must be finite and non-negative")
    if abs(p.sum() - k) > 1e-6 * max(1, k):
        raise BadInputError(f"initial probabilities sum to {p.sum()!r}, expected {k}")

    scale = 1.0
    for _ in range(n + 1):
        p[p > 1.0] = 1.0
        rest = p < 1.0
        mass = p[rest].sum()
        need = k - (n - np.count_nonzero(rest))
        if need == 0:
            p[rest] = 0.0
            break
        if mass <= 0.0:
            raise InfeasibleKError(f"only {n - np.count_nonzero(p == 0)} rows carry probability mass, k={k}")
        # the last pass doubles as the exact renormalization of the sub-one block
        factor = need / mass
        p[rest] *= factor
        scale *= factor
        if not np.any(p > 1.0):
            break

    c = scale * k / rank if rank is not None else scale
    return InclusionProbabilities(p, int(k), float(c))


def inclusion_probabilities(scores, k):
    """Leverage-score inclusion probabilities ``min(1, c_k tau_i)`` with sum ``k``."""
    if not isinstance(scores, LeverageScores):
        tau = np.asarray(scores, dtype=np.float64)
        scores = LeverageScores(tau, int(round(tau.sum())))
    initial = (k / scores.scores.sum()) * scores.scores
    return probability_ceiling(initial, k, rank=scores.scores.sum())


def uniform_probabilities(n, k):
    if k > n:
        raise InfeasibleKError(f"cannot draw k={k} from n={n} rows")
    return InclusionProbabilities(np.full(n, k / n), int(k), k / n)
