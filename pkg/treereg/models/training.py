import logging
from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np

from ..diffcore import AdamState, adam_step, backward
from ..errors import TrainingDiverged
from .base import TargetModel
from .batch import Batch
from .loss import PenaltyTerm, loss_terms

logger = logging.getLogger("Trainer")


@dataclass
class StepResult:
    step: int
    epoch: int
    loss: float
    data_loss: float
    penalty: float
    end_of_epoch: bool


def minibatches(batch: Batch, batch_size: int, rng: np.random.Generator) -> Iterator[Batch]:
    """Shuffle examples (whole sequences for sequence batches) and yield consecutive slices."""
    order = rng.permutation(batch.n_examples)
    size = batch.n_examples if batch_size <= 0 else batch_size
    for start in range(0, batch.n_examples, size):
        yield batch.take(order[start : start + size])


def train_steps(
    model: TargetModel,
    batch: Batch,
    epochs: int,
    batch_size: int,
    lam: float = 0.0,
    regularizer: PenaltyTerm | None = None,
    optimizer: AdamState | None = None,
    learning_rate: float = 1e-3,
    seed: int = 0,
) -> Iterator[StepResult]:
    """Run Adam over shuffled minibatches, updating `model.params` in place after every step.

    Yields once per optimizer step so callers can record samples or retrain a
    surrogate between steps. Raises TrainingDiverged on a non-finite loss.
    """
    state = optimizer or AdamState.create(model.params.size, learning_rate)
    rng = np.random.default_rng(seed)
    step = state.step
    for epoch in range(epochs):
        chunks = list(minibatches(batch, batch_size, rng))
        for index, chunk in enumerate(chunks):
            leaves = model.params.leaves()
            terms = loss_terms(model, chunk, lam, regularizer, leaves)
            data_loss = terms.data.item()
            weighted_penalty = lam * terms.penalty.item()
            if not (np.isfinite(data_loss) and np.isfinite(weighted_penalty)):
                logger.error(f"Step {step + 1} diverged: data loss {data_loss}, lambda*penalty {weighted_penalty}")
                raise TrainingDiverged(step + 1, data_loss, weighted_penalty)

            backward(terms.total)
            grads = model.params.gather_grads(leaves)
            if not np.all(np.isfinite(grads)):
                raise TrainingDiverged(step + 1, data_loss, weighted_penalty)
            model.params = adam_step(model.params, grads, state)
            step = state.step
            yield StepResult(
                step=step,
                epoch=epoch,
                loss=terms.total.item(),
                data_loss=data_loss,
                penalty=terms.penalty.item(),
                end_of_epoch=index == len(chunks) - 1,
            )
