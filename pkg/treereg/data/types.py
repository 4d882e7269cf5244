from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, DataError
from ..models import SequenceBatch, TabularBatch

SPLITS = ("train", "valid", "test")


@dataclass
class TabularDataset:
    X: np.ndarray
    y: np.ndarray
    feature_names: list[str]
    split: np.ndarray
    regions: np.ndarray | None = None
    region_names: list[str] | None = None
    name: str = "tabular"

    def __post_init__(self):
        self.X = np.atleast_2d(np.asarray(self.X, dtype=np.float64))
        self.y = np.asarray(self.y, dtype=np.float64).reshape(len(self.X), -1)
        self.split = np.asarray(self.split).astype(str)
        if len(self.feature_names) != self.X.shape[1]:
            raise DataError(f"{len(self.feature_names)} feature names for {self.X.shape[1]} columns")
        if len(self.split) != len(self.X):
            raise DataError(f"{len(self.split)} split tags for {len(self.X)} rows")

    @property
    def n_outputs(self) -> int:
        return int(self.y.shape[1])

    @property
    def input_dim(self) -> int:
        return int(self.X.shape[1])

    def rows(self, split: str) -> np.ndarray:
        return np.flatnonzero(self.split == split)

    def batch(self, split: str = "train") -> TabularBatch:
        rows = self.rows(split)
        return TabularBatch(self.X[rows], self.y[rows])

    def region_assignments(self, split: str = "train") -> np.ndarray | None:
        return None if self.regions is None else self.regions[self.rows(split)]


@dataclass
class SequenceDataset:
    """Variable-length sequences, each with a split tag; `latents` keeps generator states when known."""

    sequences: list[tuple[np.ndarray, np.ndarray]]
    split: np.ndarray
    feature_names: list[str]
    latents: list[np.ndarray] | None = None
    name: str = "sequence"
    region_names: list[str] | None = None

    def __post_init__(self):
        self.sequences = [
            (np.atleast_2d(np.asarray(x, dtype=np.float64)), np.asarray(y, dtype=np.float64).reshape(len(x), -1))
            for x, y in self.sequences
        ]
        self.split = np.asarray(self.split).astype(str)
        for index, (x, y) in enumerate(self.sequences):
            if len(x) != len(y):
                raise DataError(f"sequence {index} has {len(x)} feature rows but {len(y)} label rows", row=index)

    @property
    def n_outputs(self) -> int:
        return int(self.sequences[0][1].shape[1])

    @property
    def input_dim(self) -> int:
        return int(self.sequences[0][0].shape[1])

    def rows(self, split: str) -> np.ndarray:
        return np.flatnonzero(self.split == split)

    def batch(self, split: str = "train") -> SequenceBatch:
        """Zero-padded N x T_max batch of the sequences in `split`, with a validity mask."""
        chosen = [self.sequences[i] for i in self.rows(split)]
        if not chosen:
            raise DataError(f"no sequences in split '{split}'")
        longest = max(len(x) for x, _ in chosen)
        X = np.zeros((len(chosen), longest, self.input_dim))
        Y = np.zeros((len(chosen), longest, self.n_outputs))
        mask = np.zeros((len(chosen), longest), dtype=bool)
        for n, (x, y) in enumerate(chosen):
            X[n, : len(x)] = x
            Y[n, : len(y)] = y
            mask[n, : len(x)] = True
        return SequenceBatch(X, Y, mask)

    def region_assignments(self, split: str = "train") -> np.ndarray | None:
        raise ConfigError(f"dataset '{self.name}' defines no regions; use k-means regions or a region map")


Dataset = TabularDataset | SequenceDataset


@dataclass
class HmmSpec:
    prior: np.ndarray
    transition: np.ndarray
    emission: np.ndarray

    def __post_init__(self):
        self.prior = np.asarray(self.prior, dtype=np.float64).ravel()
        self.transition = np.asarray(self.transition, dtype=np.float64)
        self.emission = np.asarray(self.emission, dtype=np.float64)
        if not np.allclose(self.prior.sum(), 1.0) or not np.allclose(self.transition.sum(axis=1), 1.0):
            raise DataError("HMM prior and transition rows must sum to 1")

    @property
    def n_states(self) -> int:
        return int(self.prior.size)

    def sample(self, rng: np.random.Generator, n: int, t: int) -> tuple[np.ndarray, np.ndarray]:
        """Draw states s_0..s_T (N x (T+1)) and binary observations for t = 1..T (N x T x P).

        s_0 comes from the prior and emits nothing.
        """
        states = np.zeros((n, t + 1), dtype=np.int64)
        states[:, 0] = _categorical(rng, np.broadcast_to(self.prior, (n, self.n_states)))
        for step in range(1, t + 1):
            states[:, step] = _categorical(rng, self.transition[states[:, step - 1]])
        probabilities = self.emission[states[:, 1:]]
        observations = (rng.random(probabilities.shape) < probabilities).astype(np.float64)
        return states, observations


def _categorical(rng: np.random.Generator, rows: np.ndarray) -> np.ndarray:
    draws = rng.random(len(rows))
    cumulative = np.cumsum(rows, axis=1)
    cumulative[:, -1] = 1.0
    return (cumulative > draws[:, None]).argmax(axis=1)
