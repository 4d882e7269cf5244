import logging
from collections.abc import Callable

import numpy as np

from ..errors import InsufficientSamplesError
from ..models import Batch, TargetModel, train_steps
from .state import AplSample, SurrogateState

logger = logging.getLogger("Surrogate")

AplOracle = Callable[[np.ndarray], float]


def _buffer_matrix(state: SurrogateState) -> np.ndarray:
    if not state.buffer:
        raise InsufficientSamplesError("cannot augment from an empty surrogate buffer")
    return np.vstack([sample.theta for sample in state.buffer])


def augment_convex_hull(state: SurrogateState, count: int, oracle: AplOracle) -> list[AplSample]:
    """Label `count` Dirichlet-weighted mixtures of buffered parameters with their true APL."""
    thetas = _buffer_matrix(state)
    if count <= 0:
        return []
    weights = state.rng.dirichlet(np.full(len(thetas), state.dirichlet_alpha), size=count)
    mixtures = weights @ thetas
    samples = [AplSample(theta, float(oracle(theta)), state.latest_step) for theta in mixtures]
    state.augmented.extend(samples)
    logger.debug(f"Added {count} convex-hull samples from a buffer of {len(thetas)}")
    return samples


def augment_random(state: SurrogateState, count: int, scale: float, oracle: AplOracle) -> list[AplSample]:
    """Label `count` Gaussian perturbations of randomly chosen buffered parameters."""
    thetas = _buffer_matrix(state)
    if count <= 0:
        return []
    picks = state.rng.integers(0, len(thetas), size=count)
    noisy = thetas[picks] + scale * state.rng.standard_normal((count, thetas.shape[1]))
    samples = [AplSample(theta, float(oracle(theta)), state.latest_step) for theta in noisy]
    state.augmented.extend(samples)
    logger.debug(f"Added {count} random perturbation samples (scale {scale})")
    return samples


def restart_samples(
    model_factory: Callable[[int], TargetModel],
    count: int,
    measure: Callable[[TargetModel], float],
    batch: Batch,
    epochs: int = 1,
    batch_size: int = 0,
    learning_rate: float = 1e-3,
    seed: int = 0,
    every: int = 1,
) -> list[AplSample]:
    """Briefly train `count` unregularized models from fresh seeds and harvest (theta, APL) along the way."""
    samples: list[AplSample] = []
    for restart in range(count):
        model = model_factory(seed + restart)
        samples.append(AplSample(model.regularized_params().values.copy(), float(measure(model)), 0))
        steps = train_steps(
            model, batch, epochs, batch_size, learning_rate=learning_rate, seed=seed + restart
        )
        for result in steps:
            if result.step % every == 0:
                theta = model.regularized_params().values.copy()
                samples.append(AplSample(theta, float(measure(model)), result.step))
        logger.info(f"Restart {restart + 1}/{count} harvested {len(samples)} samples so far")
    return samples
