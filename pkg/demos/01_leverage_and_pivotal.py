"""Leverage scores, inclusion probabilities and one pivotal draw.

Run with ``python3 demos/01_leverage_and_pivotal.py``.
"""
import numpy as np

from levpivot import (
    RngState,
    bernoulli_sample,
    build_tree,
    inclusion_probabilities,
    leverage_scores,
    pivotal_sample,
    subsample_system,
    weighted_least_squares,
)
from levpivot.features import PolynomialBasisSpec, expand

rng = np.random.default_rng(0)

# 500 points in the plane and a cubic feature map (10 columns)
x = rng.uniform(-1, 1, (500, 2))
a = expand(x, PolynomialBasisSpec(2, 3))
b = np.cos(3 * x[:, 0]) * x[:, 1] + 0.05 * rng.standard_normal(500)

lev = leverage_scores(a)
print("leverage scores sum to the column count:", round(lev.scores.sum(), 10), "==", a.shape[1])
print("largest scores sit near the corners:", np.round(x[np.argsort(lev.scores)[-3:]], 2).tolist())

# scale to k = 40 expected samples and cap at one
probs = inclusion_probabilities(lev, 40)
print("sum of inclusion probabilities:", probs.probs.sum(), "rows kept for sure:", probs.certain.size)

# the competition tree is built from the raw points, not from the features
tree = build_tree(x, probs, "pca")
piv = pivotal_sample(tree, probs, RngState(seed=1))
ber = bernoulli_sample(probs, RngState(seed=1))
print("pivotal picked", len(piv), "rows; Bernoulli picked", len(ber))

full = weighted_least_squares(a, b).residual_norm_sq
for name, s in [("pivotal", piv), ("Bernoulli", ber)]:
    coef = weighted_least_squares(*subsample_system(a, b, s)).coefficients
    err = np.sum((a @ coef - b) ** 2)
    print(f"{name:9s} fit: full-data residual {err:.3f} vs best possible {full:.3f}")
