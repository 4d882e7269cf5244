import logging

import numpy as np

from ..errors import DataError
from .tree import DecisionTree, TreeNode

logger = logging.getLogger("DecisionTree")


def _errors(node: TreeNode, X: np.ndarray, y: np.ndarray) -> int:
    if node.is_leaf:
        return int(np.sum(y != node.label))
    goes_left = X[:, node.feature] <= node.threshold
    return _errors(node.left, X[goes_left], y[goes_left]) + _errors(node.right, X[~goes_left], y[~goes_left])  # type: ignore[arg-type]


def _prune(node: TreeNode, X: np.ndarray, y: np.ndarray) -> tuple[TreeNode, bool]:
    if node.is_leaf:
        return node, False
    goes_left = X[:, node.feature] <= node.threshold
    left, left_changed = _prune(node.left, X[goes_left], y[goes_left])  # type: ignore[arg-type]
    right, right_changed = _prune(node.right, X[~goes_left], y[~goes_left])  # type: ignore[arg-type]
    rebuilt = TreeNode(node.counts, node.feature, node.threshold, left, right)
    leaf = rebuilt.as_leaf()
    if _errors(leaf, X, y) <= _errors(rebuilt, X, y):
        return leaf, True
    return rebuilt, left_changed or right_changed


def prune_tree(tree: DecisionTree, X_prune: np.ndarray, y_prune: np.ndarray) -> DecisionTree:
    """Reduced-error pruning: collapse any subtree whose majority leaf is no worse on the pruning set."""
    X = np.atleast_2d(np.asarray(X_prune, dtype=np.float64))
    y = np.asarray(y_prune).ravel().astype(np.int64)
    if X.shape[0] == 0:
        raise DataError("pruning set is empty")
    root = tree.root
    changed = True
    while changed:
        root, changed = _prune(root, X, y)
    pruned = DecisionTree(root, tree.h, tree.n_features, tree.seed)
    logger.debug(f"Pruned tree from {tree.n_leaves} to {pruned.n_leaves} leaves")
    return pruned
