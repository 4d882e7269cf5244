import numpy as np


def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int, shape: tuple[int, int]) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


def threshold(probabilities: np.ndarray) -> np.ndarray:
    return (np.asarray(probabilities) >= 0.5).astype(np.int64)
