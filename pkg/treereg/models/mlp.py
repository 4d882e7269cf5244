from typing import Any

import numpy as np

from ..diffcore import Matrix, Node, ParamVector, constant, leaky_relu, sigmoid, tanh
from ..errors import ModelError, ShapeError
from .base import TargetModel
from .batch import Batch, TabularBatch
from .util import glorot_uniform

ACTIVATIONS = {"leaky-relu": leaky_relu, "tanh": tanh}


class MlpModel(TargetModel):
    """Feed-forward network with sigmoid outputs, one per binary target."""

    family = "mlp"

    def __init__(self, layer_sizes: list[int], params: ParamVector, activation: str = "leaky-relu"):
        if len(layer_sizes) < 2:
            raise ModelError("an MLP needs at least input and output sizes")
        if activation not in ACTIVATIONS:
            raise ModelError(f"unknown hidden activation '{activation}'")
        super().__init__(params, layer_sizes[-1])
        self.layer_sizes = list(layer_sizes)
        self.activation = activation

    @classmethod
    def create(cls, layer_sizes: list[int], seed: int = 0, activation: str = "leaky-relu") -> "MlpModel":
        rng = np.random.default_rng(seed)
        arrays = {}
        for i, (fan_in, fan_out) in enumerate(zip(layer_sizes[:-1], layer_sizes[1:])):
            arrays[f"W{i}"] = glorot_uniform(rng, fan_in, fan_out, (fan_in, fan_out))
            arrays[f"b{i}"] = np.zeros((1, fan_out))
        return cls(layer_sizes, ParamVector.from_arrays(arrays), activation)

    @property
    def n_layers(self) -> int:
        return len(self.layer_sizes) - 1

    def forward(self, leaves: dict[str, Node], batch: Batch) -> Node:
        if not isinstance(batch, TabularBatch):
            raise ModelError("MLP models take tabular batches")
        if batch.input_dim != self.layer_sizes[0]:
            raise ShapeError("mlp-input", batch.X.shape, (self.layer_sizes[0],))
        hidden = ACTIVATIONS[self.activation]
        h = constant(batch.X)
        for i in range(self.n_layers):
            h = h @ leaves[f"W{i}"] + leaves[f"b{i}"]
            h = sigmoid(h) if i == self.n_layers - 1 else hidden(h)
        return h

    def regularized_names(self) -> list[str]:
        return self.params.names

    def describe(self) -> dict[str, Any]:
        return {"family": self.family, "layer_sizes": self.layer_sizes, "activation": self.activation}

    @classmethod
    def from_description(cls, meta: dict[str, Any], params: ParamVector) -> "MlpModel":
        return cls(list(meta["layer_sizes"]), params, meta.get("activation", "leaky-relu"))


def mlp_predict(model: MlpModel, x) -> Matrix:
    """Output probabilities for one feature vector (1 x Q) or a matrix of them (N x Q)."""
    features = np.asarray(x, dtype=np.float64)
    if features.ndim == 1:
        features = features.reshape(1, -1)
    if features.shape[1] != model.layer_sizes[0]:
        raise ShapeError("mlp_predict", features.shape, (model.layer_sizes[0],))
    return model.predict_proba(TabularBatch(features))
