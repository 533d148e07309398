"""Competition trees for pivotal sampling.

The tree is built from the raw coordinates ``X`` rather than from the
feature matrix, by recursive median splits.  Each split sorts the node's
points along either the top principal direction of the node's point cloud
(``"pca"``) or a coordinate chosen cyclically by depth (``"coordinate"``),
sends the first ``floor(|K|/2)`` points left and the rest right.

Node numbering: ids ``0..L-1`` are leaves in left-to-right order (so every
subtree owns a contiguous block of ``leaves``); ids ``L..2L-2`` are internal
nodes numbered in post-order, which is the match schedule used by the
sampler.
"""
from dataclasses import dataclass
from enum import Enum
import json

import numpy as np

from .errors import DimensionMismatchError, EmptyTreeError
from .matrix import as_matrix

_TIE_RTOL = 1e-12


class SplitMethod(str, Enum):
    PCA = "pca"
    COORDINATE = "coordinate"


@dataclass(frozen=True)
class CompetitionTree:
    leaves: np.ndarray
    left: np.ndarray
    right: np.ndarray

    @property
    def n_leaves(self):
        return self.leaves.shape[0]

    @property
    def root(self):
        return self.n_leaves + self.left.shape[0] - 1

    def is_leaf(self, node):
        return node < self.n_leaves

    def children(self, node):
        m = node - self.n_leaves
        return int(self.left[m]), int(self.right[m])

    def internal_nodes(self):
        """Internal node ids in post-order (children before parents, left first)."""
        return range(self.n_leaves, self.root + 1)

    def leaf_sets(self):
        """Row indices under every node, keyed by node id."""
        out = {i: [int(v)] for i, v in enumerate(self.leaves)}
        for node in self.internal_nodes():
            a, b = self.children(node)
            out[node] = out[a] + out[b]
        return out

    def depth(self):
        if self.n_leaves == 1:
            return 0
        d = np.zeros(self.root + 1, dtype=int)
        for node in reversed(self.internal_nodes()):
            for c in self.children(node):
                d[c] = d[node] + 1
        return int(d.max())

    def to_nested(self):
        def walk(node):
            if self.is_leaf(node):
                return int(self.leaves[node])
            a, b = self.children(node)
            return {"left": walk(a), "right": walk(b)}

        return walk(self.root)

    def to_json(self):
        return json.dumps(self.to_nested(), separators=(",", ":"))

    @classmethod
    def from_nested(cls, nested):
        leaves, left, right = [], [], []
        pending = []

        def walk(obj):
            if isinstance(obj, dict):
                a = walk(obj["left"])
                b = walk(obj["right"])
                pending.append((a, b))
                return ("internal", len(pending) - 1)
            leaves.append(int(obj))
            return ("leaf", len(leaves) - 1)

        walk(nested)
        n_leaves = len(leaves)

        def node_id(ref):
            kind, pos = ref
            return pos if kind == "leaf" else n_leaves + pos

        for a, b in pending:
            left.append(node_id(a))
            right.append(node_id(b))
        if len(set(leaves)) != n_leaves:
            raise ValueError("a row index appears in more than one leaf")
        return cls(np.array(leaves, dtype=np.int64), np.array(left, dtype=np.int64),
                   np.array(right, dtype=np.int64))

    @classmethod
    def from_json(cls, text):
        return cls.from_nested(json.loads(text))


class _Builder:
    def __init__(self):
        self.leaves = []
        self.left = []
        self.right = []
        self._internal = []

    def leaf(self, row):
        self.leaves.append(int(row))
        return ("leaf", len(self.leaves) - 1)

    def join(self, a, b):
        self._internal.append((a, b))
        return ("internal", len(self._internal) - 1)

    def finish(self):
        n = len(self.leaves)

        def node_id(ref):
            return ref[1] if ref[0] == "leaf" else n + ref[1]

        left = [node_id(a) for a, _ in self._internal]
        right = [node_id(b) for _, b in self._internal]
        return CompetitionTree(np.array(self.leaves, dtype=np.int64),
                               np.array(left, dtype=np.int64), np.array(right, dtype=np.int64))


def principal_direction(points):
    """Unit top eigenvector of the (divisor-|K|) covariance of ``points``.

    Ties among the largest eigenvalues are resolved by projecting the
    lowest-index coordinate axis onto the tied eigenspace; the sign is fixed
    so that the first nonzero component is positive.
    """
    centered = points - points.mean(axis=0)
    cov = centered.T @ centered / points.shape[0]
    vals, vecs = np.linalg.eigh(cov)
    top = vals[-1]
    tied = vals >= top - _TIE_RTOL * max(abs(top), np.finfo(float).tiny)
    if np.count_nonzero(tied) == 1:
        v = vecs[:, -1]
    else:
        basis = vecs[:, tied]
        for axis in range(points.shape[1]):
            v = basis @ basis[axis]
            if np.linalg.norm(v) > 1e-8:
                break
        v = v / np.linalg.norm(v)
    nz = np.flatnonzero(np.abs(v) > 1e-14)
    if nz.size and v[nz[0]] < 0:
        v = -v
    return v


def _sort_keys(x_k, rows, method, depth):
    if method is SplitMethod.COORDINATE:
        proj = x_k[:, depth % x_k.shape[1]]
    else:
        proj = (x_k - x_k.mean(axis=0)) @ principal_direction(x_k)
    # ties fall back to the original row index
    return np.lexsort((rows, proj))


def build_tree(x, probs, method="pca"):
    """Balanced competition tree over the rows with inclusion probability < 1."""
    x = as_matrix(x, "x")
    p = np.asarray(getattr(probs, "probs", probs), dtype=np.float64).reshape(-1)
    if p.shape[0] != x.shape[0]:
        raise DimensionMismatchError(f"x has {x.shape[0]} rows but probs has length {p.shape[0]}")
    method = SplitMethod(method)
    rows = np.flatnonzero(p < 1.0)
    if rows.size == 0:
        raise EmptyTreeError("every row has inclusion probability 1; nothing to compete")

    b = _Builder()

    def grow(rows, depth):
        if rows.size == 1:
            return b.leaf(rows[0])
        order = _sort_keys(x[rows], rows, method, depth)
        ordered = rows[order]
        half = rows.size // 2
        lhs = grow(ordered[:half], depth + 1)
        rhs = grow(ordered[half:], depth + 1)
        return b.join(lhs, rhs)

    grow(rows, 0)
    return b.finish()


def random_tree(rows, rng):
    """Full binary tree over ``rows`` with uniformly random split points.

    Not balanced; used to exercise the sampler on arbitrary tree shapes.
    """
    from .rng import as_generator

    gen = as_generator(rng)
    rows = np.asarray(rows, dtype=np.int64)
    rows = rows[gen.permutation(rows.size)]
    b = _Builder()

    def grow(rows):
        if rows.size == 1:
            return b.leaf(rows[0])
        cut = int(gen.integers(1, rows.size))
        lhs = grow(rows[:cut])
        return b.join(lhs, grow(rows[cut:]))

    grow(rows)
    return b.finish()


def balanced_tree(rows):
    """Balanced tree over ``rows`` in the given order."""
    rows = np.asarray(rows, dtype=np.int64)
    b = _Builder()

    def grow(rows):
        if rows.size == 1:
            return b.leaf(rows[0])
        half = rows.size // 2
        lhs = grow(rows[:half])
        return b.join(lhs, grow(rows[half:]))

    grow(rows)
    return b.finish()
