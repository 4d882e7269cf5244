from typing import Any

import numpy as np

from ..diffcore import (
    Matrix,
    Node,
    ParamVector,
    concat,
    constant,
    exp,
    log,
    reduce_sum,
    sigmoid,
    softmax,
    softplus,
    transpose,
)
from ..errors import ModelError, ShapeError
from .base import TargetModel
from .batch import Batch, SequenceBatch
from .util import glorot_uniform

EMISSIONS = ("bernoulli", "gaussian")
BELIEF_MODES = ("filter", "smooth")
LOG_2PI = float(np.log(2.0 * np.pi))


class HmmModel(TargetModel):
    """Discrete-state HMM trained by gradient descent, with a logistic head on its beliefs.

    Probabilities are softmax/sigmoid images of unconstrained logits, so any
    parameter vector describes a valid HMM. The belief at timestep t is the
    filtered posterior p(s_t | x_1..x_t) unless `belief_mode` is "smooth".
    """

    family = "hmm"

    def __init__(
        self,
        n_states: int,
        input_dim: int,
        n_outputs: int,
        params: ParamVector,
        emission: str = "bernoulli",
        belief_mode: str = "filter",
        likelihood_weight: float = 0.0,
    ):
        if emission not in EMISSIONS:
            raise ModelError(f"unknown emission family '{emission}'")
        if belief_mode not in BELIEF_MODES:
            raise ModelError(f"unknown belief mode '{belief_mode}'")
        super().__init__(params, n_outputs)
        self.n_states = n_states
        self.input_dim = input_dim
        self.emission = emission
        self.belief_mode = belief_mode
        self.likelihood_weight = likelihood_weight

    @staticmethod
    def init_arrays(
        n_states: int, input_dim: int, n_outputs: int, rng: np.random.Generator, emission: str = "bernoulli"
    ) -> dict[str, np.ndarray]:
        arrays = {
            "prior": np.zeros((1, n_states)),
            "transition": glorot_uniform(rng, n_states, n_states, (n_states, n_states)),
        }
        if emission == "bernoulli":
            arrays["emit"] = rng.normal(0.0, 1.0, size=(n_states, input_dim))
        else:
            arrays["emit_mean"] = rng.normal(0.0, 1.0, size=(n_states, input_dim))
            arrays["emit_logvar"] = np.zeros((n_states, input_dim))
        arrays["w"] = glorot_uniform(rng, n_states, n_outputs, (n_outputs, n_states))
        return arrays

    @classmethod
    def create(
        cls,
        n_states: int,
        input_dim: int,
        n_outputs: int = 1,
        seed: int = 0,
        emission: str = "bernoulli",
        belief_mode: str = "filter",
        likelihood_weight: float = 0.0,
    ) -> "HmmModel":
        rng = np.random.default_rng(seed)
        arrays = cls.init_arrays(n_states, input_dim, n_outputs, rng, emission)
        return cls(
            n_states, input_dim, n_outputs, ParamVector.from_arrays(arrays), emission, belief_mode, likelihood_weight
        )

    def _emission_loglik(self, leaves: dict[str, Node], prefix: str, x_t: np.ndarray) -> Node:
        x = constant(x_t)
        if self.emission == "bernoulli":
            logits = leaves[f"{prefix}emit"]
            # log sigma(a) = -softplus(-a), log(1 - sigma(a)) = -softplus(a)
            log_on = -softplus(-logits)
            log_off = -softplus(logits)
            return x @ transpose(log_on) + (1.0 - x) @ transpose(log_off)
        mean = leaves[f"{prefix}emit_mean"]
        logvar = leaves[f"{prefix}emit_logvar"]
        precision = exp(-logvar)
        quad = (x * x) @ transpose(precision) - 2.0 * (x @ transpose(mean * precision))
        const = transpose(reduce_sum(mean * mean * precision + logvar, axis=1))
        return -0.5 * (quad + const + self.input_dim * LOG_2PI)

    def beliefs(self, leaves: dict[str, Node], batch: SequenceBatch, prefix: str = "") -> tuple[list[Node], Node]:
        """Per-timestep state posteriors (each N x K) and the masked emission log-likelihood."""
        if batch.input_dim != self.input_dim:
            raise ShapeError("hmm-input", batch.X.shape, (self.input_dim,))
        prior = softmax(leaves[f"{prefix}prior"])
        transition = softmax(leaves[f"{prefix}transition"], axis=1)

        belief = prior
        filtered: list[Node] = []
        scaled: list[Node] = []
        loglik: Node = constant(0.0)
        for t in range(batch.n_steps):
            predicted = belief @ transition
            ll = self._emission_loglik(leaves, prefix, batch.X[:, t, :])
            shift = ll.value.max(axis=1, keepdims=True)
            likelihood = exp(ll - constant(shift))
            joint = predicted * likelihood
            norm = reduce_sum(joint, axis=1)
            if np.any(norm.value <= 0.0):
                raise ModelError(f"zero total likelihood at timestep {t}")
            updated = joint / norm
            keep = constant(batch.mask[:, t : t + 1].astype(np.float64))
            loglik = loglik + reduce_sum(keep * (log(norm) + constant(shift)))
            if batch.padded:
                updated = keep * updated + (1.0 - keep) * (belief if t > 0 else updated)
            belief = updated
            filtered.append(belief)
            scaled.append(likelihood)

        if self.belief_mode == "smooth":
            filtered = self._smooth(filtered, scaled, transition, batch)
        return filtered, loglik

    def _smooth(
        self, filtered: list[Node], scaled: list[Node], transition: Node, batch: SequenceBatch
    ) -> list[Node]:
        backward_msg = constant(np.ones((batch.n_examples, self.n_states)))
        smoothed = [filtered[-1]]
        for t in range(batch.n_steps - 2, -1, -1):
            message = (scaled[t + 1] * backward_msg) @ transpose(transition)
            message = message / reduce_sum(message, axis=1)
            if batch.padded:
                keep = constant(batch.mask[:, t + 1 : t + 2].astype(np.float64))
                message = keep * message + (1.0 - keep) * backward_msg
            backward_msg = message
            joint = filtered[t] * backward_msg
            smoothed.append(joint / reduce_sum(joint, axis=1))
        return smoothed[::-1]

    def logits(self, leaves: dict[str, Node], batch: SequenceBatch, prefix: str = "") -> list[Node]:
        head = transpose(leaves[f"{prefix}w"])
        beliefs, _ = self.beliefs(leaves, batch, prefix)
        return [b @ head for b in beliefs]

    def forward(self, leaves: dict[str, Node], batch: Batch) -> Node:
        if not isinstance(batch, SequenceBatch):
            raise ModelError("HMM models take sequence batches")
        return sigmoid(concat(self.logits(leaves, batch), axis=0))

    def auxiliary_loss(self, leaves: dict[str, Node], batch: Batch, prefix: str = "") -> Node | None:
        if self.likelihood_weight == 0.0 or not isinstance(batch, SequenceBatch):
            return None
        _, loglik = self.beliefs(leaves, batch, prefix)
        n_valid = max(int(batch.mask.sum()), 1)
        return constant(-self.likelihood_weight / n_valid) * loglik

    def regularized_names(self) -> list[str]:
        return ["w"]

    def describe(self) -> dict[str, Any]:
        return {
            "family": self.family,
            "n_states": self.n_states,
            "input_dim": self.input_dim,
            "n_outputs": self.n_outputs,
            "emission": self.emission,
            "belief_mode": self.belief_mode,
            "likelihood_weight": self.likelihood_weight,
        }

    @classmethod
    def from_description(cls, meta: dict[str, Any], params: ParamVector) -> "HmmModel":
        return cls(
            int(meta["n_states"]),
            int(meta["input_dim"]),
            int(meta["n_outputs"]),
            params,
            meta.get("emission", "bernoulli"),
            meta.get("belief_mode", "filter"),
            float(meta.get("likelihood_weight", 0.0)),
        )

    def belief_matrix(self, batch: SequenceBatch, prefix: str = "", leaves: dict[str, Node] | None = None) -> Matrix:
        """Beliefs flattened time-major (rows x K), aligned with `batch.flat_features()`."""
        beliefs, _ = self.beliefs(leaves or self.params.constants(), batch, prefix)
        return np.concatenate([b.value for b in beliefs], axis=0)


def hmm_filter(model: HmmModel, x) -> Matrix:
    """Filtered beliefs for one sequence of T feature vectors, returned as T x K."""
    sequence = np.asarray(x, dtype=np.float64)
    if sequence.ndim != 2 or sequence.shape[0] < 1:
        raise ShapeError("hmm_filter", sequence.shape)
    filtering = model if model.belief_mode == "filter" else HmmModel.from_description(
        {**model.describe(), "belief_mode": "filter"}, model.params
    )
    return filtering.belief_matrix(SequenceBatch(sequence[None, :, :]))
