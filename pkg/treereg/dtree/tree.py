import logging
from collections.abc import Callable
from dataclasses import dataclass
from typing import Any

import numpy as np

from ..errors import ConfigError, DataError, ShapeError
from .constants import GAIN_TIE_TOLERANCE, MIN_GAIN

logger = logging.getLogger("DecisionTree")


@dataclass
class TreeNode:
    """A leaf when `feature` is None; otherwise rows with x[feature] <= threshold go left."""

    counts: tuple[int, int]
    feature: int | None = None
    threshold: float | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None

    @property
    def n_samples(self) -> int:
        return self.counts[0] + self.counts[1]

    @property
    def probability(self) -> float:
        return self.counts[1] / self.n_samples if self.n_samples else 0.0

    @property
    def label(self) -> int:
        return int(self.probability >= 0.5)

    def as_leaf(self) -> "TreeNode":
        return TreeNode(self.counts)

    def to_dict(self) -> dict[str, Any]:
        if self.is_leaf:
            return {"counts": list(self.counts)}
        assert self.left is not None and self.right is not None
        return {
            "counts": list(self.counts),
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "TreeNode":
        counts = (int(data["counts"][0]), int(data["counts"][1]))
        if "feature" not in data:
            return cls(counts)
        return cls(
            counts,
            int(data["feature"]),
            float(data["threshold"]),
            cls.from_dict(data["left"]),
            cls.from_dict(data["right"]),
        )


@dataclass
class DecisionTree:
    root: TreeNode
    h: int
    n_features: int
    seed: int = 0

    def _descend(self, X: np.ndarray, visit: Callable[[TreeNode, np.ndarray, int], None]) -> None:
        data = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if data.shape[1] != self.n_features:
            raise ShapeError("tree-input", data.shape, (self.n_features,))
        stack = [(self.root, np.arange(data.shape[0]), 0)]
        while stack:
            node, rows, depth = stack.pop()
            if node.is_leaf:
                visit(node, rows, depth)
                continue
            assert node.left is not None and node.right is not None
            goes_left = data[rows, node.feature] <= node.threshold
            stack.append((node.right, rows[~goes_left], depth + 1))
            stack.append((node.left, rows[goes_left], depth + 1))

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        out = np.zeros(np.atleast_2d(X).shape[0])

        def visit(node: TreeNode, rows: np.ndarray, depth: int) -> None:
            out[rows] = node.probability

        self._descend(X, visit)
        return out

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(np.int64)

    def path_lengths(self, X: np.ndarray) -> np.ndarray:
        out = np.zeros(np.atleast_2d(X).shape[0], dtype=np.int64)

        def visit(node: TreeNode, rows: np.ndarray, depth: int) -> None:
            out[rows] = depth

        self._descend(X, visit)
        return out

    def nodes(self) -> list[TreeNode]:
        found = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            found.append(node)
            if not node.is_leaf:
                stack.extend([node.right, node.left])  # type: ignore[list-item]
        return found

    @property
    def n_leaves(self) -> int:
        return sum(node.is_leaf for node in self.nodes())

    @property
    def max_depth(self) -> int:
        def depth(node: TreeNode) -> int:
            if node.is_leaf:
                return 0
            return 1 + max(depth(node.left), depth(node.right))  # type: ignore[arg-type]

        return depth(self.root)

    def to_dict(self) -> dict[str, Any]:
        return {"h": self.h, "n_features": self.n_features, "seed": self.seed, "root": self.root.to_dict()}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "DecisionTree":
        return cls(TreeNode.from_dict(data["root"]), int(data["h"]), int(data["n_features"]), int(data.get("seed", 0)))


def _gini(positives, total):
    p = positives / total
    return 1.0 - p * p - (1.0 - p) * (1.0 - p)


def gini_gain(parent: np.ndarray, left: np.ndarray, right: np.ndarray) -> float:
    """Gini(parent) minus the size-weighted Gini of the two children."""
    parent = np.asarray(parent, dtype=np.float64).ravel()
    left = np.asarray(left, dtype=np.float64).ravel()
    right = np.asarray(right, dtype=np.float64).ravel()
    if parent.size == 0:
        raise DataError("gini_gain needs a non-empty parent")
    if left.size + right.size != parent.size:
        raise DataError("children do not partition the parent")
    weighted = 0.0
    for child in (left, right):
        if child.size:
            weighted += child.size / parent.size * _gini(child.sum(), child.size)
    return float(_gini(parent.sum(), parent.size) - weighted)


def _best_split(X: np.ndarray, y: np.ndarray, h: int) -> tuple[float, int, float] | None:
    n, n_features = X.shape
    total_pos = y.sum()
    parent_gini = _gini(total_pos, n)
    left_n = np.arange(1, n, dtype=np.float64)
    right_n = n - left_n
    best = None
    for feature in range(n_features):
        order = np.argsort(X[:, feature], kind="stable")
        values = X[order, feature]
        left_pos = np.cumsum(y[order])[:-1]
        right_pos = total_pos - left_pos
        legal = (values[:-1] < values[1:]) & (left_n >= h) & (right_n >= h)
        if not legal.any():
            continue
        children = (left_n * _gini(left_pos, left_n) + right_n * _gini(right_pos, right_n)) / n
        gain = np.where(legal, parent_gini - children, -np.inf)
        top = float(gain.max())
        if top <= MIN_GAIN:
            continue
        if best is None or top > best[0] + GAIN_TIE_TOLERANCE:
            index = int(np.flatnonzero(gain >= top - GAIN_TIE_TOLERANCE)[0])
            best = (top, feature, float(0.5 * (values[index] + values[index + 1])))
    return best


def _grow(X: np.ndarray, y: np.ndarray, h: int) -> TreeNode:
    positives = int(y.sum())
    node = TreeNode((len(y) - positives, positives))
    if positives in (0, len(y)) or len(y) < 2 * h:
        return node
    split = _best_split(X, y, h)
    if split is None:
        return node
    _, feature, threshold = split
    goes_left = X[:, feature] <= threshold
    node.feature = feature
    node.threshold = threshold
    node.left = _grow(X[goes_left], y[goes_left], h)
    node.right = _grow(X[~goes_left], y[~goes_left], h)
    return node


def train_tree(X: np.ndarray, y: np.ndarray, h: int, seed: int = 0) -> DecisionTree:
    """Greedy CART with Gini gain over every feature and every midpoint threshold.

    Ties go to the lowest feature index, then the lowest threshold, so the
    result is fully determined by (X, y, h). `seed` is recorded only.
    """
    data = np.atleast_2d(np.asarray(X, dtype=np.float64))
    labels = np.asarray(y, dtype=np.float64).ravel()
    if data.shape[0] == 0:
        raise DataError("cannot train a tree on an empty dataset")
    if labels.size != data.shape[0]:
        raise ShapeError("train_tree", data.shape, labels.shape)
    if not np.all((labels == 0) | (labels == 1)):
        raise DataError("tree labels must be 0 or 1")
    if h < 1:
        raise ConfigError(f"minimum leaf size h must be at least 1, got {h}")
    tree = DecisionTree(_grow(data, labels, h), h, data.shape[1], seed)
    logger.debug(f"Trained tree on {data.shape[0]} rows: {tree.n_leaves} leaves, depth {tree.max_depth}")
    return tree


def path_length(tree: DecisionTree, x) -> int:
    """Internal decision nodes visited between the root and the leaf `x` reaches."""
    return int(tree.path_lengths(np.atleast_2d(np.asarray(x, dtype=np.float64)))[0])
