from typing import Any

import numpy as np

from ..diffcore import Node, ParamVector, concat, sigmoid
from ..errors import ModelError
from .base import TargetModel
from .batch import Batch, SequenceBatch
from .gru import GruModel
from .hmm import HmmModel

HMM_PREFIX = "hmm."
GRU_PREFIX = "gru."
TREE_FEATURE_MODES = ("inputs", "inputs+beliefs")


class GruHmmModel(TargetModel):
    """An HMM whose per-timestep logit is corrected by a GRU fitted to its residual.

    Both components read their parameters from disjoint prefixed segments of one
    ParamVector. Only the GRU head is regularized, so the tree explains what the
    GRU adds on top of the HMM.
    """

    family = "gru-hmm"

    def __init__(self, hmm: HmmModel, gru: GruModel, params: ParamVector, tree_features: str = "inputs+beliefs"):
        if hmm.input_dim != gru.input_dim or hmm.n_outputs != gru.n_outputs:
            raise ModelError("GRU and HMM components must agree on input and output sizes")
        if tree_features not in TREE_FEATURE_MODES:
            raise ModelError(f"unknown tree feature mode '{tree_features}'")
        super().__init__(params, gru.n_outputs)
        self.hmm = hmm
        self.gru = gru
        self.tree_feature_mode = tree_features

    @classmethod
    def create(
        cls,
        input_dim: int,
        n_states: int,
        state_dim: int,
        n_outputs: int = 1,
        seed: int = 0,
        emission: str = "bernoulli",
        tree_features: str = "inputs+beliefs",
        likelihood_weight: float = 0.0,
    ) -> "GruHmmModel":
        rng = np.random.default_rng(seed)
        arrays = {}
        for name, array in HmmModel.init_arrays(n_states, input_dim, n_outputs, rng, emission).items():
            arrays[HMM_PREFIX + name] = array
        for name, array in GruModel.init_arrays(input_dim, state_dim, n_outputs, rng).items():
            arrays[GRU_PREFIX + name] = array
        params = ParamVector.from_arrays(arrays)
        hmm, gru = cls._components(input_dim, n_states, state_dim, n_outputs, params, emission, likelihood_weight)
        return cls(hmm, gru, params, tree_features)

    @staticmethod
    def _components(
        input_dim: int,
        n_states: int,
        state_dim: int,
        n_outputs: int,
        params: ParamVector,
        emission: str,
        likelihood_weight: float = 0.0,
    ) -> tuple[HmmModel, GruModel]:
        def part(prefix: str) -> ParamVector:
            names = [name for name in params.names if name.startswith(prefix)]
            sub = params.subset(names)
            return ParamVector([(name[len(prefix) :], shape) for name, shape in sub.segments], sub.values)

        hmm = HmmModel(n_states, input_dim, n_outputs, part(HMM_PREFIX), emission, likelihood_weight=likelihood_weight)
        gru = GruModel(input_dim, state_dim, n_outputs, part(GRU_PREFIX))
        return hmm, gru

    def forward(self, leaves: dict[str, Node], batch: Batch) -> Node:
        if not isinstance(batch, SequenceBatch):
            raise ModelError("GRU-HMM models take sequence batches")
        hmm_logits = self.hmm.logits(leaves, batch, HMM_PREFIX)
        gru_logits = self.gru.logits(leaves, batch, GRU_PREFIX)
        return sigmoid(concat([a + b for a, b in zip(hmm_logits, gru_logits)], axis=0))

    def auxiliary_loss(self, leaves: dict[str, Node], batch: Batch) -> Node | None:
        return self.hmm.auxiliary_loss(leaves, batch, HMM_PREFIX)

    def regularized_names(self) -> list[str]:
        return [GRU_PREFIX + "w", GRU_PREFIX + "c"]

    def tree_features(self, batch: Batch) -> np.ndarray:
        inputs = super().tree_features(batch)
        if self.tree_feature_mode == "inputs" or not isinstance(batch, SequenceBatch):
            return inputs
        beliefs = self.hmm.belief_matrix(batch, HMM_PREFIX, self.params.constants())
        return np.hstack([inputs, beliefs[batch.row_mask()]])

    def describe(self) -> dict[str, Any]:
        return {
            "family": self.family,
            "input_dim": self.gru.input_dim,
            "n_states": self.hmm.n_states,
            "state_dim": self.gru.state_dim,
            "n_outputs": self.n_outputs,
            "emission": self.hmm.emission,
            "tree_features": self.tree_feature_mode,
            "likelihood_weight": self.hmm.likelihood_weight,
        }

    @classmethod
    def from_description(cls, meta: dict[str, Any], params: ParamVector) -> "GruHmmModel":
        emission = meta.get("emission", "bernoulli")
        hmm, gru = cls._components(
            int(meta["input_dim"]),
            int(meta["n_states"]),
            int(meta["state_dim"]),
            int(meta["n_outputs"]),
            params,
            emission,
            float(meta.get("likelihood_weight", 0.0)),
        )
        return cls(hmm, gru, params, meta.get("tree_features", "inputs+beliefs"))
