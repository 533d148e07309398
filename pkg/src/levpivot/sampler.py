"""Row samplers: tree-based pivotal, independent Bernoulli and uniform."""
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, IndexOutOfRangeError, InfeasibleKError, NonIntegerMassError
from .matrix import as_matrix, as_vector
from .rng import as_generator

# masses this close to 0 or 1 after a match are treated as settled
_SETTLE = 1e-13
_ROOT_TOL = 1e-9


@dataclass(frozen=True)
class SampleSet:
    indices: np.ndarray
    weights: np.ndarray
    k_target: int

    def __len__(self):
        return self.indices.shape[0]

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write("index,weight\n")
            for i, w in zip(self.indices, self.weights):
                fh.write(f"{int(i)},{float(w)!r}\n")

    @classmethod
    def from_csv(cls, path, k_target=None):
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        idx = data[:, 0].astype(np.int64)
        k = len(idx) if k_target is None else k_target
        return cls(idx, data[:, 1].copy(), k)


def _sample_set(indices, probs, k_target):
    indices = np.sort(np.asarray(indices, dtype=np.int64))
    return SampleSet(indices, 1.0 / np.sqrt(probs[indices]), int(k_target))


def _probs_array(probs):
    return np.asarray(getattr(probs, "probs", probs), dtype=np.float64).reshape(-1)


def pivotal_sample(tree, probs, rng, trace=None):
    """Binary-tree pivotal sampling.

    Sibling nodes are matched in post-order.  When the two masses fit in one
    unit the winner takes both and the loser is dropped; otherwise the loser
    is selected outright and the winner keeps the excess over one.  Rows with
    probability one are not in the tree and are always selected.

    If ``trace`` is a list, one ``(p_left, p_right, parent_mass, selected)``
    tuple is appended per match, with the parent mass taken before settling.
    """
    p = _probs_array(probs)
    gen = as_generator(rng)
    leaves = tree.leaves
    n_leaves = leaves.shape[0]
    k_total = int(round(p.sum()))

    leaf_mass = p[leaves]
    tree_mass = leaf_mass.sum()
    if abs(tree_mass - round(tree_mass)) > 1e-6:
        raise NonIntegerMassError(f"tree leaf probabilities sum to {tree_mass!r}")

    n_nodes = 2 * n_leaves - 1
    # plain lists: this loop runs once per leaf and numpy scalar access dominates otherwise
    carried = leaves.tolist() + [0] * (n_leaves - 1)
    mass = leaf_mass.tolist() + [0.0] * (n_leaves - 1)
    coins = gen.random(n_leaves).tolist()
    chosen = np.flatnonzero(p >= 1.0).tolist()
    left, right = tree.left.tolist(), tree.right.tolist()
    for m in range(n_leaves - 1):
        a, b = left[m], right[m]
        pi, pj = mass[a], mass[b]
        i, j = carried[a], carried[b]
        node = n_leaves + m
        total = pi + pj
        if total <= 1.0:
            if total <= 0.0:
                carried[node], mass[node] = i, 0.0
                if trace is not None:
                    trace.append((pi, pj, 0.0, False))
                continue
            winner = i if coins[m] < pi / total else j
            carried[node], mass[node] = winner, total
        else:
            if coins[m] < (1.0 - pi) / (2.0 - total):
                chosen.append(j)
                carried[node] = i
            else:
                chosen.append(i)
                carried[node] = j
            mass[node] = total - 1.0
        if trace is not None:
            trace.append((pi, pj, mass[node], total > 1.0))
        if mass[node] >= 1.0 - _SETTLE:
            chosen.append(carried[node])
            mass[node] = 0.0
        elif mass[node] <= _SETTLE:
            mass[node] = 0.0

    root = n_nodes - 1
    leftover = mass[root]
    if leftover > _ROOT_TOL:
        if leftover < 1.0 - _ROOT_TOL:
            raise NonIntegerMassError(f"root kept fractional mass {leftover!r}")
        if coins[-1] < leftover:
            chosen.append(carried[root])
    return _sample_set(chosen, p, k_total)


def bernoulli_sample(probs, rng):
    """Include each row independently with its own probability."""
    p = _probs_array(probs)
    gen = as_generator(rng)
    picked = np.flatnonzero(gen.random(p.shape[0]) < p)
    return _sample_set(picked, p, int(round(p.sum())))


def uniform_sample(n, k, rng):
    """``k`` distinct rows uniformly without replacement, weights ``sqrt(n/k)``."""
    if not 1 <= k <= n:
        raise InfeasibleKError(f"cannot draw k={k} distinct rows from n={n}")
    gen = as_generator(rng)
    idx = np.sort(gen.choice(n, size=k, replace=False))
    return SampleSet(idx.astype(np.int64), np.full(k, np.sqrt(n / k)), int(k))


def subsample_system(a, b, s):
    """Reweighted rows ``(S a, S b)`` for a sample set ``s``."""
    a = as_matrix(a, "a")
    b = as_vector(b, "b")
    if a.shape[0] != b.shape[0]:
        raise DimensionMismatchError(f"a has {a.shape[0]} rows but b has length {b.shape[0]}")
    if len(s) and (s.indices.max() >= a.shape[0] or s.indices.min() < 0):
        raise IndexOutOfRangeError(f"sample index out of range for {a.shape[0]} rows")
    w = s.weights
    return a[s.indices] * w[:, None], b[s.indices] * w
