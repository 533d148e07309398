"""How the PCA competition tree groups nearby points.

Prints the nested tree for twelve points on a noisy ellipse and the distance
between the two points of each bottom-level match.
"""
import json

import numpy as np

from levpivot import build_tree
from levpivot.tree import principal_direction

rng = np.random.default_rng(3)
theta = np.sort(rng.uniform(0, 2 * np.pi, 12))
x = np.column_stack([np.cos(theta), 0.6 * np.sin(theta)]) + 0.02 * rng.standard_normal((12, 2))

print("top principal direction of the cloud:", np.round(principal_direction(x), 3))

tree = build_tree(x, np.full(12, 0.5), "pca")
print(json.dumps(tree.to_nested()))
print("depth:", tree.depth())

for node in tree.internal_nodes():
    a, b = tree.children(node)
    if tree.is_leaf(a) and tree.is_leaf(b):
        i, j = tree.leaves[a], tree.leaves[b]
        print(f"leaves {i:2d} and {j:2d} compete, distance {np.linalg.norm(x[i] - x[j]):.2f}")

# coordinate cycling alternates axes by depth instead
print(json.dumps(build_tree(x, np.full(12, 0.5), "coordinate").to_nested()))
