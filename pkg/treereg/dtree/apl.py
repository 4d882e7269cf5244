import logging
from collections.abc import Callable

import numpy as np

from ..errors import ConfigError, DataError, InsufficientSamplesError
from .constants import DEFAULT_PRUNE_FRACTION, MIN_APL_EXAMPLES
from .prune import prune_tree
from .tree import DecisionTree, train_tree

logger = logging.getLogger("DecisionTree")

Predictor = Callable[[np.ndarray], np.ndarray]


def _labels(X: np.ndarray, predict: Predictor | np.ndarray) -> np.ndarray:
    labels = predict(X) if callable(predict) else predict
    labels = np.asarray(labels)
    if labels.ndim == 1:
        labels = labels.reshape(-1, 1)
    if labels.shape[0] != X.shape[0]:
        raise DataError(f"predictor returned {labels.shape[0]} labels for {X.shape[0]} examples")
    return (labels >= 0.5).astype(np.int64)


def fit_apl_tree(
    X: np.ndarray,
    labels: np.ndarray,
    h: int,
    prune_fraction: float = DEFAULT_PRUNE_FRACTION,
    pruned: bool = True,
    seed: int = 0,
) -> DecisionTree:
    """Train on a (1 - prune_fraction) share of rows and prune on the rest.

    Rows are put in a canonical order and then shuffled by `seed` before the split, so the
    tree depends on the set of rows and not on the order they arrive in.
    """
    if not 0.0 <= prune_fraction < 1.0:
        raise ConfigError(f"prune fraction must lie in [0, 1), got {prune_fraction}")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(labels).ravel()
    canonical = np.lexsort(np.column_stack([X, y]).T[::-1])
    order = canonical[np.random.default_rng(seed).permutation(len(canonical))]
    X, y = X[order], y[order]
    n_train = int(np.floor((1.0 - prune_fraction) * len(X))) if pruned else len(X)
    n_train = max(n_train, 1)
    tree = train_tree(X[:n_train], y[:n_train], h, seed)
    if pruned and n_train < len(X):
        tree = prune_tree(tree, X[n_train:], y[n_train:])
    return tree


def apl(
    X: np.ndarray,
    predict: Predictor | np.ndarray,
    h: int,
    prune_fraction: float = DEFAULT_PRUNE_FRACTION,
    pruned: bool = True,
    seed: int = 0,
) -> float:
    """Average decision-path length of a tree that mimics `predict` on `X`.

    `predict` is a callable returning labels or probabilities, or the labels
    themselves. Multi-output predictors get one tree per output and the
    per-output APLs are summed. A constant labelling has APL 0.
    """
    data = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if data.shape[0] < MIN_APL_EXAMPLES:
        raise InsufficientSamplesError(f"APL needs at least {MIN_APL_EXAMPLES} examples, got {data.shape[0]}")
    labels = _labels(data, predict)
    total = 0.0
    for q in range(labels.shape[1]):
        column = labels[:, q]
        if column.min() == column.max():
            continue
        tree = fit_apl_tree(data, column, h, prune_fraction, pruned, seed)
        total += float(tree.path_lengths(data).mean())
    return total


def fidelity(tree: DecisionTree, predict: Predictor | np.ndarray, X_test: np.ndarray) -> float:
    """Share of test rows where the thresholded tree agrees with the model's label."""
    data = np.atleast_2d(np.asarray(X_test, dtype=np.float64))
    if data.shape[0] == 0:
        raise DataError("fidelity needs a non-empty test set")
    labels = _labels(data, predict)
    if labels.shape[1] != 1:
        raise DataError("fidelity compares one tree with one model output")
    return float(np.mean(tree.predict(data) == labels[:, 0]))
