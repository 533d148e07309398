"""Exact and Monte-Carlo diagnostics for sampling distributions.

Small pivotal distributions are enumerated exactly by branching on every
coin flip of the tree competition.  This code path deliberately does not
reuse :func:`levpivot.sampler.pivotal_sample`, so the two can check each
other.
"""
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import ImpossibleConditionError, NotAResidualError, TooLargeError
from .matrix import as_matrix, as_vector, spectral_deviation_from_identity
from .sampler import subsample_system

MAX_ENUM_LEAVES = 14
SCHEMA_VERSION = 1


@dataclass(frozen=True)
class SampleDistribution:
    n: int
    sets: tuple
    probs: np.ndarray

    @property
    def incidence(self):
        x = np.zeros((len(self.sets), self.n))
        for r, s in enumerate(self.sets):
            x[r, list(s)] = 1.0
        return x

    @property
    def is_homogeneous(self):
        return len({len(s) for s in self.sets}) <= 1

    def marginals(self):
        return self.probs @ self.incidence

    def joint(self):
        """Matrix of ``Pr[xi_i = 1 and xi_j = 1]``; the diagonal holds the marginals."""
        x = self.incidence
        return (x * self.probs[:, None]).T @ x

    def as_dict(self):
        return {s: float(p) for s, p in zip(self.sets, self.probs)}


def _collect(n, outcomes):
    merged = {}
    for key, p in outcomes:
        merged.setdefault(key, []).append(p)
    keys = sorted(merged, key=lambda s: (len(s), s))
    # ascending-magnitude summation keeps the many tiny path products accurate
    probs = np.array([sum(sorted(merged[k])) for k in keys])
    return SampleDistribution(n, tuple(keys), probs)


def _schedule(tree, right_first):
    order = []

    def visit(node):
        if tree.is_leaf(node):
            return
        a, b = tree.children(node)
        first, second = (b, a) if right_first else (a, b)
        visit(first)
        visit(second)
        order.append(node)

    visit(tree.root)
    return order


def enumerate_pivotal(tree, probs, order="postorder"):
    """Exact distribution of the sampled index set for a competition tree.

    ``order`` is ``"postorder"`` (left subtree first) or ``"reverse"`` (right
    subtree first); the distribution must not depend on it.
    """
    p = np.asarray(getattr(probs, "probs", probs), dtype=np.float64).reshape(-1)
    n_leaves = tree.n_leaves
    if n_leaves > MAX_ENUM_LEAVES:
        raise TooLargeError(f"{n_leaves} leaves exceeds the enumeration cap of {MAX_ENUM_LEAVES}")
    always = tuple(int(i) for i in np.flatnonzero(p >= 1.0))
    matches = _schedule(tree, right_first=(order == "reverse"))

    start = {node: (int(tree.leaves[node]), float(p[tree.leaves[node]])) for node in range(n_leaves)}
    outcomes = []

    def expand(step, state, chosen, weight):
        if weight == 0.0:
            return
        if step == len(matches):
            idx, mass = state[tree.root]
            if mass > 1e-9:
                outcomes.append((tuple(sorted(chosen + (idx,) + always)), weight * mass))
            if mass < 1.0 - 1e-9:
                outcomes.append((tuple(sorted(chosen + always)), weight * (1.0 - mass)))
            return
        node = matches[step]
        a, b = tree.children(node)
        (i, pi), (j, pj) = state[a], state[b]
        total = pi + pj
        if total <= 1.0:
            branches = [((i, total), (), pi / total if total > 0 else 1.0),
                        ((j, total), (), pj / total if total > 0 else 0.0)]
        else:
            first = (1.0 - pi) / (2.0 - total)
            branches = [((i, total - 1.0), (j,), first),
                        ((j, total - 1.0), (i,), 1.0 - first)]
        for carried, picked, prob in branches:
            if carried[1] >= 1.0 - 1e-12:
                # a full unit of mass finalizes the carried index
                picked = picked + (carried[0],)
                carried = (carried[0], 0.0)
            nxt = dict(state)
            nxt[node] = carried
            expand(step + 1, nxt, chosen + picked, weight * prob)

    expand(0, start, (), 1.0)
    return _collect(p.shape[0], outcomes)


def bernoulli_distribution(probs):
    """Exact product distribution of independent inclusion indicators."""
    p = np.asarray(getattr(probs, "probs", probs), dtype=np.float64).reshape(-1)
    n = p.shape[0]
    if n > MAX_ENUM_LEAVES:
        raise TooLargeError(f"n={n} exceeds the enumeration cap of {MAX_ENUM_LEAVES}")
    outcomes = []
    for mask in range(2**n):
        bits = [(mask >> i) & 1 for i in range(n)]
        w = float(np.prod([p[i] if b else 1.0 - p[i] for i, b in enumerate(bits)]))
        if w > 0.0:
            outcomes.append((tuple(i for i in range(n) if bits[i]), w))
    return _collect(n, outcomes)


@dataclass(frozen=True)
class InfluenceReport:
    conditioning_set: tuple
    matrix: np.ndarray
    inf_norm: float
    conditional_marginals: np.ndarray
    defined_rows: np.ndarray

    @property
    def row_sums(self):
        return np.abs(self.matrix).sum(axis=1)


def influence_report(dist, s=()):
    """One-sided influence matrix of ``dist`` given that every index in ``s`` is selected.

    Entry ``(i, j)`` is ``Pr[xi_j | xi_i, S] - Pr[xi_j | S]`` for ``i, j`` outside
    ``S``.  Rows whose conditioning event ``xi_i = 1 and S`` has probability
    zero are left at zero and marked undefined.
    """
    s = tuple(sorted(int(v) for v in s))
    x = dist.incidence
    keep = np.all(x[:, list(s)] == 1.0, axis=1) if s else np.ones(x.shape[0], dtype=bool)
    w = np.where(keep, dist.probs, 0.0)
    total = w.sum()
    if total <= 0.0:
        raise ImpossibleConditionError(f"conditioning set {s} has probability zero")
    joint = (x * w[:, None]).T @ x / total
    q = np.diag(joint).copy()

    outside = np.ones(dist.n, dtype=bool)
    outside[list(s)] = False
    defined = outside & (q > 1e-15)
    mat = np.zeros((dist.n, dist.n))
    rows = np.flatnonzero(defined)
    mat[rows] = joint[rows] / q[rows, None] - q[None, :]
    mat[:, ~outside] = 0.0
    inf_norm = float(np.abs(mat).sum(axis=1).max()) if rows.size else 0.0
    return InfluenceReport(s, mat, inf_norm, q, defined)


def d_inf(dist, max_conditioning=3, full=False):
    """Largest influence-matrix infinity norm over feasible conditioning sets.

    Sets up to size ``max_conditioning`` are swept; ``full=True`` sweeps
    every subset and is meant for ``n <= 8``.
    """
    top = dist.n if full else min(max_conditioning, dist.n)
    best = 0.0
    for size in range(top + 1):
        for s in combinations(range(dist.n), size):
            try:
                rep = influence_report(dist, s)
            except ImpossibleConditionError:
                continue
            best = max(best, rep.inf_norm)
    return best


def negative_correlation_violations(dist, tol=1e-12):
    joint = dist.joint()
    marg = np.diag(joint)
    excess = joint - np.outer(marg, marg)
    np.fill_diagonal(excess, -np.inf)
    i, j = np.nonzero(np.triu(excess > tol, 1))
    return list(zip(i.tolist(), j.tolist()))


def distribution_report(dist, probs, max_conditioning=3, full=False):
    """JSON-ready summary of an enumerated distribution against target marginals."""
    p = np.asarray(getattr(probs, "probs", probs), dtype=np.float64).reshape(-1)
    return {
        "schema_version": SCHEMA_VERSION,
        "n": dist.n,
        "marginal_max_abs_err": float(np.max(np.abs(dist.marginals() - p))),
        "homogeneous": bool(dist.is_homogeneous),
        "d_inf": float(d_inf(dist, max_conditioning, full)),
        "negative_correlation_violations": len(negative_correlation_violations(dist)),
    }


def embedding_deviation(u, s):
    """``||U~^T U~ - I||_2`` for the sampled, reweighted rows of ``u``."""
    u = as_matrix(u, "u")
    u_sub, _ = subsample_system(u, np.zeros(u.shape[0]), s)
    return spectral_deviation_from_identity(u_sub.T @ u_sub)


def matvec_error(u, residual, s):
    """``||U~^T r~||^2 / ||r||^2`` for a residual orthogonal to ``span(u)``."""
    u = as_matrix(u, "u")
    r = as_vector(residual, "residual")
    rn = float(r @ r)
    if rn == 0.0:
        return 0.0
    if np.linalg.norm(u.T @ r) > 1e-8 * np.sqrt(rn):
        raise NotAResidualError("residual is not orthogonal to the column span of u")
    u_sub, r_sub = subsample_system(u, r, s)
    g = u_sub.T @ r_sub
    return float(g @ g) / rn
