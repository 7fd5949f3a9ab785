"""Random forest of Gini decision trees, fully deterministic given a seed.

Determinism contract: per-tree RNGs derive from the base seed, candidate
features are scanned in ascending index order, split cost ties keep the
earlier candidate (lowest feature index, then lowest threshold) and leaf
vote ties resolve to the negative class. With bag fraction 1.0 the tree
trains on the data as-is, so a single tree with all features equals a
plain exhaustively-searched decision tree.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

# two float costs closer than this count as a tie; true distinct Gini costs
# at the corpus sizes used here differ by far more
_COST_EPS = 1e-12


@dataclass
class TreeNode:
    prediction: int
    feature: Optional[int] = None
    threshold: Optional[float] = None
    left: Optional["TreeNode"] = None
    right: Optional["TreeNode"] = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None

    def to_dict(self) -> dict:
        if self.is_leaf:
            return {"leaf": self.prediction}
        return {
            "prediction": self.prediction,
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TreeNode":
        if "leaf" in d:
            return cls(prediction=d["leaf"])
        return cls(
            prediction=d["prediction"],
            feature=d["feature"],
            threshold=d["threshold"],
            left=cls.from_dict(d["left"]),
            right=cls.from_dict(d["right"]),
        )


def _gini(pos: float, n: float) -> float:
    p = pos / n
    return 1.0 - p * p - (1.0 - p) * (1.0 - p)


def _majority(y: np.ndarray) -> int:
    pos = int(y.sum())
    neg = len(y) - pos
    return 1 if pos > neg else 0  # tie -> negative


def _best_split(X: np.ndarray, y: np.ndarray, features: np.ndarray):
    """Lowest weighted-Gini split over the candidate features, or None."""
    n = len(y)
    total_pos = int(y.sum())
    best = None  # (cost, feature, threshold)
    for f in np.sort(features):
        col = X[:, f]
        order = np.argsort(col, kind="stable")
        sv = col[order]
        if sv[0] == sv[-1]:
            continue
        sy = y[order]
        pos_prefix = np.cumsum(sy)
        cut = np.nonzero(sv[1:] > sv[:-1])[0]  # split between cut and cut+1
        n_l = cut + 1.0
        n_r = n - n_l
        pos_l = pos_prefix[cut].astype(float)
        pos_r = total_pos - pos_l
        gini_l = 1.0 - (pos_l / n_l) ** 2 - ((n_l - pos_l) / n_l) ** 2
        gini_r = 1.0 - (pos_r / n_r) ** 2 - ((n_r - pos_r) / n_r) ** 2
        cost = (n_l * gini_l + n_r * gini_r) / n
        b = int(np.argmin(cost))  # first minimum -> lowest threshold
        if best is None or cost[b] < best[0] - _COST_EPS:
            threshold = (sv[cut[b]] + sv[cut[b] + 1]) / 2.0
            best = (float(cost[b]), int(f), float(threshold))
    return best


def _grow(
    X: np.ndarray,
    y: np.ndarray,
    rng: np.random.Generator,
    features_per_split: int,
    max_depth: Optional[int],
    depth: int,
) -> TreeNode:
    node = TreeNode(prediction=_majority(y))
    pos = int(y.sum())
    if pos == 0 or pos == len(y) or (max_depth is not None and depth >= max_depth):
        return node
    dim = X.shape[1]
    k = min(features_per_split, dim)
    feats = rng.choice(dim, size=k, replace=False)
    found = _best_split(X, y, feats)
    if found is None:
        return node
    cost, feature, threshold = found
    if cost >= _gini(pos, len(y)) - _COST_EPS:
        return node  # no impurity decrease
    mask = X[:, feature] < threshold
    node.feature = feature
    node.threshold = threshold
    node.left = _grow(X[mask], y[mask], rng, features_per_split, max_depth, depth + 1)
    node.right = _grow(X[~mask], y[~mask], rng, features_per_split, max_depth, depth + 1)
    return node


def _predict_tree(node: TreeNode, x: np.ndarray) -> int:
    while not node.is_leaf:
        node = node.left if x[node.feature] < node.threshold else node.right
    return node.prediction


@dataclass
class RandomForestPayload:
    trees: list[TreeNode]

    @classmethod
    def fit(
        cls,
        X: np.ndarray,
        y: np.ndarray,
        bag_fraction: float,
        n_trees: int,
        features_per_split: int,
        max_depth: Optional[int],
        seed: int,
    ) -> "RandomForestPayload":
        n = X.shape[0]
        children = np.random.SeedSequence(seed).spawn(n_trees)
        trees = []
        for tree_seed in children:
            rng = np.random.default_rng(tree_seed)
            if bag_fraction >= 1.0:
                Xb, yb = X, y  # identity bag keeps the single-tree case exact
            else:
                size = math.ceil(bag_fraction * n)
                idx = rng.integers(n, size=size)
                Xb, yb = X[idx], y[idx]
            trees.append(_grow(Xb, yb, rng, features_per_split, max_depth, 0))
        return cls(trees)

    def score_positive(self, X: np.ndarray) -> np.ndarray:
        votes = np.array(
            [[_predict_tree(tree, row) for tree in self.trees] for row in X], dtype=float
        )
        return votes.mean(axis=1)

    def to_dict(self) -> dict:
        return {"trees": [t.to_dict() for t in self.trees]}

    @classmethod
    def from_dict(cls, d: dict) -> "RandomForestPayload":
        return cls([TreeNode.from_dict(t) for t in d["trees"]])
