import logging

import numpy as np

from .constants import (
    NOISE_EMISSION,
    NOISE_TRANSITION,
    PARABOLA_BAND,
    PARABOLA_FLIP,
    PARABOLA_SIZE,
    RECTANGLE_CENTERS,
    RECTANGLE_HALF_HEIGHT,
    RECTANGLES_FLIP,
    RECTANGLES_GRID,
    RECTANGLES_SIZE,
    SIGNAL_EMISSION,
    SIGNAL_NOISE_SEQUENCES,
    SIGNAL_NOISE_STEPS,
    SIGNAL_TRANSITION,
    TEST_FRACTION,
    TWO_REGION_SIZE,
)
from .types import HmmSpec, SequenceDataset, TabularDataset

logger = logging.getLogger("DataLoader")


def _split_tags(rng: np.random.Generator, n: int, test_fraction: float) -> np.ndarray:
    tags = np.full(n, "train", dtype=object)
    tags[rng.permutation(n)[: int(round(test_fraction * n))]] = "test"
    return tags.astype(str)


def _flip(rng: np.random.Generator, y: np.ndarray, candidates: np.ndarray, fraction: float) -> np.ndarray:
    count = int(np.round(fraction * len(candidates)))
    chosen = rng.choice(candidates, size=count, replace=False) if count else np.zeros(0, dtype=np.int64)
    y[chosen] = 1.0 - y[chosen]
    return chosen


def parabola_label(X: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(X)
    return (X[:, 1] > 5.0 * (X[:, 0] - 0.5) ** 2 + 0.4).astype(np.float64)


def gen_parabola(
    seed: int,
    n: int = PARABOLA_SIZE,
    band: float = PARABOLA_BAND,
    flip_fraction: float = PARABOLA_FLIP,
    test_fraction: float = TEST_FRACTION,
) -> TabularDataset:
    """Uniform points on the unit square labelled by the parabola, with flips near the boundary."""
    rng = np.random.default_rng(seed)
    X = rng.uniform(0.0, 1.0, size=(n, 2))
    y = parabola_label(X)
    distance = np.abs(X[:, 1] - (5.0 * (X[:, 0] - 0.5) ** 2 + 0.4))
    flipped = _flip(rng, y, np.flatnonzero(distance < band), flip_fraction)
    logger.info(f"Generated parabola dataset: {n} points, {len(flipped)} flipped labels")
    return TabularDataset(X, y, ["x1", "x2"], _split_tags(rng, n, test_fraction), name="parabola")


def signal_noise_specs() -> tuple[HmmSpec, HmmSpec]:
    uniform = np.full(5, 0.2)
    return HmmSpec(uniform, SIGNAL_TRANSITION, SIGNAL_EMISSION), HmmSpec(uniform, NOISE_TRANSITION, NOISE_EMISSION)


def gen_signal_noise_hmm(
    seed: int,
    n: int = SIGNAL_NOISE_SEQUENCES,
    t: int = SIGNAL_NOISE_STEPS,
    test_fraction: float = TEST_FRACTION,
) -> SequenceDataset:
    """Features 1-7 from the signal chain, 8-14 from an independent noise chain.

    y_t = 1 iff the signal chain is in its first state and feature 1 is on.
    """
    rng = np.random.default_rng(seed)
    signal, noise = signal_noise_specs()
    signal_states, signal_obs = signal.sample(rng, n, t)
    _, noise_obs = noise.sample(rng, n, t)
    X = np.concatenate([signal_obs, noise_obs], axis=2)
    latents = signal_states[:, 1:]
    y = ((latents == 0) & (X[:, :, 0] == 1.0)).astype(np.float64)
    sequences = [(X[i], y[i]) for i in range(n)]
    names = [f"x{j}" for j in range(X.shape[2])]
    logger.info(f"Generated signal-and-noise dataset: {n} sequences of {t} steps, positive rate {y.mean():.3f}")
    return SequenceDataset(
        sequences, _split_tags(rng, n, test_fraction), names, [latents[i] for i in range(n)], name="signal_noise"
    )


def rectangles_label(X: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(X)
    column = np.clip(np.floor(X[:, 0]).astype(np.int64), 0, len(RECTANGLE_CENTERS) - 1)
    centers = np.asarray(RECTANGLE_CENTERS)[column]
    return (np.abs(X[:, 1] - centers) <= RECTANGLE_HALF_HEIGHT).astype(np.float64)


def rectangle_regions(X: np.ndarray) -> np.ndarray:
    return np.clip(np.floor(np.atleast_2d(X)[:, 0]).astype(np.int64), 0, len(RECTANGLE_CENTERS) - 1)


def gen_five_rectangles(
    seed: int,
    n: int = RECTANGLES_SIZE,
    flip_fraction: float = RECTANGLES_FLIP,
    grid: int = RECTANGLES_GRID,
) -> TabularDataset:
    """Noisy uniform training points on [0,5]x[0,1] plus a dense noiseless test grid; regions are the unit columns."""
    rng = np.random.default_rng(seed)
    train = np.column_stack([rng.uniform(0.0, 5.0, n), rng.uniform(0.0, 1.0, n)])
    y_train = rectangles_label(train)
    flipped = _flip(rng, y_train, np.arange(n), flip_fraction)

    gx = (np.arange(grid) + 0.5) * 5.0 / grid
    gy = (np.arange(grid) + 0.5) / grid
    test = np.array([[a, b] for a in gx for b in gy])
    X = np.vstack([train, test])
    y = np.concatenate([y_train, rectangles_label(test)])
    split = np.array(["train"] * n + ["test"] * len(test))
    logger.info(f"Generated five-rectangles dataset: {n} training points ({len(flipped)} flipped), {len(test)} test")
    return TabularDataset(
        X,
        y,
        ["x", "y"],
        split,
        regions=rectangle_regions(X),
        region_names=[f"rectangle-{i + 1}" for i in range(len(RECTANGLE_CENTERS))],
        name="five_rectangles",
    )


def two_region_label(X: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(X)
    simple = X[:, 1] > 0.5
    wavy = X[:, 1] > 0.5 + 0.3 * np.sin(4.0 * np.pi * X[:, 0])
    return np.where(X[:, 0] < 0.5, simple, wavy).astype(np.float64)


def gen_two_region(seed: int, n: int = TWO_REGION_SIZE, test_fraction: float = TEST_FRACTION) -> TabularDataset:
    """Unit square split at x1 = 0.5: a single horizontal cut on the left, a sinusoidal boundary on the right."""
    rng = np.random.default_rng(seed)
    X = rng.uniform(0.0, 1.0, size=(n, 2))
    regions = (X[:, 0] >= 0.5).astype(np.int64)
    return TabularDataset(
        X,
        two_region_label(X),
        ["x1", "x2"],
        _split_tags(rng, n, test_fraction),
        regions=regions,
        region_names=["simple", "complex"],
        name="two_region",
    )
