from typing import Any

import numpy as np

from ..diffcore import Matrix, Node, ParamVector, concat, constant, sigmoid, tanh, transpose
from ..errors import ModelError, ShapeError
from .base import TargetModel
from .batch import Batch, SequenceBatch
from .util import glorot_uniform

GATES = ("z", "r", "h")


class _Cell:
    """Transposed views of the GRU weights for one forward pass."""

    def __init__(self, leaves: dict[str, Node], prefix: str):
        self.V = {g: transpose(leaves[f"{prefix}V_{g}"]) for g in GATES}
        self.U = {g: transpose(leaves[f"{prefix}U_{g}"]) for g in GATES}
        self.b = {g: leaves[f"{prefix}b_{g}"] for g in GATES}
        self.w = transpose(leaves[f"{prefix}w"])
        self.c = leaves[f"{prefix}c"]

    def step(self, x_t: Node, h_prev: Node) -> Node:
        z = sigmoid(x_t @ self.V["z"] + h_prev @ self.U["z"] + self.b["z"])
        r = sigmoid(x_t @ self.V["r"] + h_prev @ self.U["r"] + self.b["r"])
        candidate = tanh(x_t @ self.V["h"] + (r * h_prev) @ self.U["h"] + self.b["h"])
        return (1.0 - z) * h_prev + z * candidate


class GruModel(TargetModel):
    """Single-layer GRU with a logistic output head applied at every timestep."""

    family = "gru"

    def __init__(self, input_dim: int, state_dim: int, n_outputs: int, params: ParamVector):
        super().__init__(params, n_outputs)
        self.input_dim = input_dim
        self.state_dim = state_dim

    @staticmethod
    def init_arrays(input_dim: int, state_dim: int, n_outputs: int, rng: np.random.Generator) -> dict[str, np.ndarray]:
        arrays = {}
        for g in GATES:
            arrays[f"V_{g}"] = glorot_uniform(rng, input_dim, state_dim, (state_dim, input_dim))
        for g in GATES:
            arrays[f"U_{g}"] = glorot_uniform(rng, state_dim, state_dim, (state_dim, state_dim))
        for g in GATES:
            arrays[f"b_{g}"] = np.zeros((1, state_dim))
        arrays["w"] = glorot_uniform(rng, state_dim, n_outputs, (n_outputs, state_dim))
        arrays["c"] = np.zeros((1, n_outputs))
        return arrays

    @classmethod
    def create(cls, input_dim: int, state_dim: int, n_outputs: int = 1, seed: int = 0) -> "GruModel":
        rng = np.random.default_rng(seed)
        arrays = cls.init_arrays(input_dim, state_dim, n_outputs, rng)
        return cls(input_dim, state_dim, n_outputs, ParamVector.from_arrays(arrays))

    def hidden_states(self, leaves: dict[str, Node], batch: SequenceBatch, prefix: str = "") -> list[Node]:
        if batch.input_dim != self.input_dim:
            raise ShapeError("gru-input", batch.X.shape, (self.input_dim,))
        cell = _Cell(leaves, prefix)
        h = constant(np.zeros((batch.n_examples, self.state_dim)))
        states = []
        for t in range(batch.n_steps):
            h_new = cell.step(constant(batch.X[:, t, :]), h)
            if batch.padded:
                keep = constant(batch.mask[:, t : t + 1].astype(np.float64))
                h_new = keep * h_new + (1.0 - keep) * h
            h = h_new
            states.append(h)
        return states

    def logits(self, leaves: dict[str, Node], batch: SequenceBatch, prefix: str = "") -> list[Node]:
        cell = _Cell(leaves, prefix)
        return [h @ cell.w + cell.c for h in self.hidden_states(leaves, batch, prefix)]

    def forward(self, leaves: dict[str, Node], batch: Batch) -> Node:
        if not isinstance(batch, SequenceBatch):
            raise ModelError("GRU models take sequence batches")
        return sigmoid(concat(self.logits(leaves, batch), axis=0))

    def regularized_names(self) -> list[str]:
        return ["w", "c"]

    def describe(self) -> dict[str, Any]:
        return {
            "family": self.family,
            "input_dim": self.input_dim,
            "state_dim": self.state_dim,
            "n_outputs": self.n_outputs,
        }

    @classmethod
    def from_description(cls, meta: dict[str, Any], params: ParamVector) -> "GruModel":
        return cls(int(meta["input_dim"]), int(meta["state_dim"]), int(meta["n_outputs"]), params)


def gru_step(model: GruModel, x_t, h_prev) -> Matrix:
    """One GRU update for a single feature vector (or a batch of rows)."""
    x = np.atleast_2d(np.asarray(x_t, dtype=np.float64))
    h = np.atleast_2d(np.asarray(h_prev, dtype=np.float64))
    if x.shape[1] != model.input_dim:
        raise ShapeError("gru_step", x.shape, (model.input_dim,))
    if h.shape[1] != model.state_dim or h.shape[0] != x.shape[0]:
        raise ShapeError("gru_step", h.shape, (x.shape[0], model.state_dim))
    cell = _Cell(model.params.constants(), "")
    return cell.step(constant(x), constant(h)).value
