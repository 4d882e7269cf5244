from dataclasses import dataclass, field

import numpy as np

from ..diffcore import Node, ParamVector, constant, lift, tanh
from ..errors import ShapeError
from ..models.util import glorot_uniform
from .constants import (
    DEFAULT_BATCH_SIZE,
    DEFAULT_CAPACITY,
    DEFAULT_EPOCHS,
    DEFAULT_EPSILON,
    DEFAULT_LEARNING_RATE,
    DEFAULT_WINDOW,
    DIRICHLET_ALPHA,
    HIDDEN_UNITS,
)


@dataclass
class AplSample:
    theta: np.ndarray
    true_apl: float
    step: int


@dataclass
class FitReport:
    step: int
    buffer_size: int
    augmented_count: int
    mean_mse: float
    max_mse: float


@dataclass
class SurrogateState:
    """A tanh MLP mapping a regularized parameter subset to an APL estimate, plus its training data.

    `buffer` holds on-trajectory samples ordered by step. `augmented` holds
    synthetic samples that only feed the next retrain.
    """

    net: ParamVector
    input_dim: int
    rng: np.random.Generator
    capacity: int = DEFAULT_CAPACITY
    window: int = DEFAULT_WINDOW
    epsilon: float = DEFAULT_EPSILON
    learning_rate: float = DEFAULT_LEARNING_RATE
    epochs: int = DEFAULT_EPOCHS
    batch_size: int = DEFAULT_BATCH_SIZE
    dirichlet_alpha: float = DIRICHLET_ALPHA
    buffer: list[AplSample] = field(default_factory=list)
    augmented: list[AplSample] = field(default_factory=list)
    reports: list[FitReport] = field(default_factory=list)

    @property
    def latest_step(self) -> int:
        return self.buffer[-1].step if self.buffer else 0

    def training_set(self) -> tuple[np.ndarray, np.ndarray]:
        samples = self.buffer + self.augmented
        if not samples:
            return np.zeros((0, self.input_dim)), np.zeros((0, 1))
        thetas = np.vstack([s.theta for s in samples])
        targets = np.array([[s.true_apl] for s in samples])
        return thetas, targets


def init_net(input_dim: int, rng: np.random.Generator, hidden: int = HIDDEN_UNITS) -> ParamVector:
    # zero output layer: an untrained surrogate predicts exactly 0
    return ParamVector.from_arrays(
        {
            "W1": glorot_uniform(rng, input_dim, hidden, (input_dim, hidden)),
            "b1": np.zeros((1, hidden)),
            "W2": np.zeros((hidden, 1)),
            "b2": np.zeros((1, 1)),
        }
    )


def create_surrogate(input_dim: int, seed: int = 0, **options) -> SurrogateState:
    rng = np.random.default_rng(seed)
    return SurrogateState(init_net(input_dim, rng), input_dim, rng, **options)


def net_forward(net: dict[str, Node], thetas: Node) -> Node:
    hidden = tanh(thetas @ net["W1"] + net["b1"])
    return hidden @ net["W2"] + net["b2"]


def surrogate_predict(state: SurrogateState, theta: Node | np.ndarray) -> Node:
    """Surrogate APL for one parameter row, differentiable in `theta` when it is a Node."""
    row = lift(theta) if isinstance(theta, Node) else constant(np.asarray(theta, dtype=np.float64).reshape(1, -1))
    if row.shape != (1, state.input_dim):
        raise ShapeError("surrogate_predict", row.shape, (1, state.input_dim))
    return net_forward(state.net.constants(), row)


def surrogate_value(state: SurrogateState, theta: np.ndarray) -> float:
    """Reported surrogate APL, clamped at zero."""
    return max(0.0, surrogate_predict(state, theta).item())
