from dataclasses import dataclass
from typing import Protocol

import numpy as np

from ..diffcore import Node, clip, constant, log, reduce_sum
from ..errors import ConfigError, ShapeError
from .base import TargetModel
from .batch import Batch

PROBABILITY_CLIP = 1e-7


class PenaltyTerm(Protocol):
    """Anything that contributes a differentiable 1 x 1 penalty for a model's parameters."""

    def penalty(self, model: TargetModel, leaves: dict[str, Node]) -> Node: ...


@dataclass
class LossTerms:
    total: Node
    data: Node
    penalty: Node


def binary_cross_entropy(probabilities: Node, labels: np.ndarray, row_weights: np.ndarray | None = None) -> Node:
    """Mean BCE over kept rows and output dimensions, with probabilities clipped to [1e-7, 1 - 1e-7]."""
    targets = np.asarray(labels, dtype=np.float64)
    if targets.shape != probabilities.shape:
        raise ShapeError("binary_cross_entropy", probabilities.shape, targets.shape)
    weights = np.ones((targets.shape[0], 1)) if row_weights is None else np.asarray(row_weights, dtype=np.float64)
    weights = weights.reshape(-1, 1)
    count = float(weights.sum()) * targets.shape[1]
    if count <= 0:
        raise ShapeError("binary_cross_entropy", (0, targets.shape[1]))

    p = clip(probabilities, PROBABILITY_CLIP, 1.0 - PROBABILITY_CLIP)
    y = constant(targets)
    per_entry = y * log(p) + (1.0 - y) * log(1.0 - p)
    return constant(-1.0 / count) * reduce_sum(constant(weights) * per_entry)


def loss_terms(
    model: TargetModel,
    batch: Batch,
    lam: float,
    regularizer: PenaltyTerm | None,
    leaves: dict[str, Node] | None = None,
) -> LossTerms:
    if lam < 0:
        raise ConfigError(f"regularization strength must be non-negative, got {lam}")
    leaves = model.params.leaves() if leaves is None else leaves
    probabilities = model.forward(leaves, batch)
    data = binary_cross_entropy(probabilities, batch.flat_labels(), batch.row_mask().astype(np.float64))
    extra = model.auxiliary_loss(leaves, batch)
    if extra is not None:
        data = data + extra
    penalty = constant(0.0) if regularizer is None else regularizer.penalty(model, leaves)
    return LossTerms(data + constant(lam) * penalty, data, penalty)


def model_loss(
    model: TargetModel,
    batch: Batch,
    lam: float,
    regularizer: PenaltyTerm | None,
    leaves: dict[str, Node] | None = None,
) -> Node:
    """Mean binary cross-entropy plus `lam` times the regularizer value, as one scalar node."""
    return loss_terms(model, batch, lam, regularizer, leaves).total
