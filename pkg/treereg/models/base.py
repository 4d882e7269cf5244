from abc import ABC, abstractmethod
from typing import Any, ClassVar

import numpy as np

from ..diffcore import Matrix, Node, ParamVector, concat, reshape
from .batch import Batch
from .util import threshold


class TargetModel(ABC):
    """A differentiable predictor whose parameters live in one ParamVector.

    `forward` returns per-row probabilities (rows x Q); for sequence batches the
    rows are time-major and include padded timesteps, which callers drop with
    `batch.row_mask()`.
    """

    family: ClassVar[str]

    def __init__(self, params: ParamVector, n_outputs: int):
        self.params = params
        self.n_outputs = n_outputs

    @abstractmethod
    def forward(self, leaves: dict[str, Node], batch: Batch) -> Node: ...

    @abstractmethod
    def regularized_names(self) -> list[str]: ...

    @abstractmethod
    def describe(self) -> dict[str, Any]: ...

    @classmethod
    @abstractmethod
    def from_description(cls, meta: dict[str, Any], params: ParamVector) -> "TargetModel": ...

    def auxiliary_loss(self, leaves: dict[str, Node], batch: Batch) -> Node | None:
        return None

    def predict_proba(self, batch: Batch) -> Matrix:
        return self.forward(self.params.constants(), batch).value

    def predict_labels(self, batch: Batch) -> np.ndarray:
        return threshold(self.predict_proba(batch))

    def regularized_params(self) -> ParamVector:
        return self.params.subset(self.regularized_names())

    def regularized_node(self, leaves: dict[str, Node]) -> Node:
        """The regularized subset as one 1 x D row, differentiable back into `leaves`."""
        parts = [reshape(leaves[name], (1, -1)) for name in self.regularized_names()]
        return parts[0] if len(parts) == 1 else concat(parts, axis=1)

    def tree_features(self, batch: Batch) -> np.ndarray:
        return batch.flat_features()[batch.row_mask()]

    def with_params(self, params: ParamVector) -> "TargetModel":
        return type(self).from_description(self.describe(), params)

    def with_regularized(self, theta: np.ndarray) -> "TargetModel":
        subset = self.regularized_params()
        replacement = ParamVector(subset.segments, np.asarray(theta, dtype=np.float64))
        return self.with_params(self.params.replace(replacement))

    def copy(self) -> "TargetModel":
        return self.with_params(self.params.copy())


def regularized_params(model: TargetModel) -> ParamVector:
    """The parameter subset the tree regularizer and its surrogate see."""
    return model.regularized_params()
