import logging

import numpy as np

from ..diffcore import AdamState, adam_step, backward, constant, reduce_mean, reduce_sum, square
from .constants import MIN_FIT_SAMPLES
from .state import FitReport, SurrogateState, net_forward

logger = logging.getLogger("Surrogate")


def squared_errors(state: SurrogateState, thetas: np.ndarray, targets: np.ndarray) -> np.ndarray:
    predictions = net_forward(state.net.constants(), constant(thetas)).value
    return ((predictions - targets) ** 2).ravel()


def retrain_surrogate(state: SurrogateState, step: int = 0) -> FitReport | None:
    """Fit the net to buffer plus augmented samples by minimizing MSE + epsilon * ||weights||^2.

    With fewer than the minimum number of samples the current weights are kept,
    a warning is logged and None is returned. Augmented samples are consumed.
    """
    thetas, targets = state.training_set()
    augmented_count = len(state.augmented)
    if len(thetas) < MIN_FIT_SAMPLES:
        logger.warning(
            f"Skipping surrogate retrain at step {step}: {len(thetas)} samples, need {MIN_FIT_SAMPLES}"
        )
        return None

    optimizer = AdamState.create(state.net.size, state.learning_rate)
    batch_size = state.batch_size if state.batch_size > 0 else len(thetas)
    for _ in range(state.epochs):
        order = state.rng.permutation(len(thetas))
        for start in range(0, len(thetas), batch_size):
            rows = order[start : start + batch_size]
            leaves = state.net.leaves()
            residual = net_forward(leaves, constant(thetas[rows])) - constant(targets[rows])
            loss = reduce_mean(square(residual))
            if state.epsilon > 0:
                ridge = [reduce_sum(square(leaf)) for leaf in leaves.values()]
                loss = loss + constant(state.epsilon) * sum(ridge[1:], ridge[0])
            backward(loss)
            state.net = adam_step(state.net, state.net.gather_grads(leaves), optimizer)

    errors = squared_errors(state, thetas, targets)
    report = FitReport(step, len(state.buffer), augmented_count, float(errors.mean()), float(errors.max()))
    state.reports.append(report)
    state.augmented.clear()
    logger.info(
        f"Retrained surrogate at step {step} on {len(thetas)} samples "
        f"({augmented_count} augmented): mean MSE {report.mean_mse:.4f}, max {report.max_mse:.4f}"
    )
    return report
