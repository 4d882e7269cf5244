import bisect
import logging

import numpy as np

from ..errors import DataError, ShapeError
from .state import AplSample, SurrogateState

logger = logging.getLogger("Surrogate")


def record_sample(state: SurrogateState, theta: np.ndarray, true_apl: float, step: int) -> SurrogateState:
    """Insert in step order, drop samples older than the window, then drop the oldest above capacity."""
    row = np.asarray(theta, dtype=np.float64).ravel().copy()
    if row.size != state.input_dim:
        raise ShapeError("record_sample", row.shape, (state.input_dim,))
    if not np.isfinite(true_apl) or true_apl < 0:
        raise DataError(f"APL samples must be finite and non-negative, got {true_apl}")

    steps = [sample.step for sample in state.buffer]
    state.buffer.insert(bisect.bisect_right(steps, step), AplSample(row, float(true_apl), int(step)))

    horizon = state.latest_step - state.window
    state.buffer = [sample for sample in state.buffer if sample.step >= horizon]
    overflow = len(state.buffer) - state.capacity
    if overflow > 0:
        del state.buffer[:overflow]
    logger.debug(f"Recorded APL {true_apl:.3f} at step {step}; buffer holds {len(state.buffer)} samples")
    return state
