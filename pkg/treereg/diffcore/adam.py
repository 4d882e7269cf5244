from dataclasses import dataclass, field

import numpy as np

from ..errors import ShapeError
from .params import ParamVector


@dataclass
class AdamState:
    learning_rate: float
    first_moment: np.ndarray
    second_moment: np.ndarray
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step: int = field(default=0)

    @classmethod
    def create(cls, size: int, learning_rate: float = 1e-3, **kwargs) -> "AdamState":
        return cls(learning_rate, np.zeros(size), np.zeros(size), **kwargs)


def adam_step(params: ParamVector, grads: np.ndarray, state: AdamState) -> ParamVector:
    """One bias-corrected Adam update; returns new parameters and advances `state`."""
    grads = np.asarray(grads, dtype=np.float64).ravel()
    if grads.size != params.size or state.first_moment.size != params.size:
        raise ShapeError("adam_step", (params.size,), (grads.size,), (state.first_moment.size,))

    state.step += 1
    state.first_moment *= state.beta1
    state.first_moment += (1.0 - state.beta1) * grads
    state.second_moment *= state.beta2
    state.second_moment += (1.0 - state.beta2) * (grads * grads)

    m_hat = state.first_moment / (1.0 - state.beta1**state.step)
    v_hat = state.second_moment / (1.0 - state.beta2**state.step)
    update = state.learning_rate * m_hat / (np.sqrt(v_hat) + state.epsilon)
    return ParamVector(list(params.segments), params.values - update)
