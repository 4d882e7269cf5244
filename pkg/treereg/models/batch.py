from dataclasses import dataclass

import numpy as np


@dataclass
class TabularBatch:
    X: np.ndarray
    y: np.ndarray | None = None

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        if self.y is not None:
            self.y = np.asarray(self.y, dtype=np.float64).reshape(len(self.X), -1)

    @property
    def n_examples(self) -> int:
        return int(self.X.shape[0])

    @property
    def input_dim(self) -> int:
        return int(self.X.shape[1])

    def take(self, indices: np.ndarray) -> "TabularBatch":
        return TabularBatch(self.X[indices], None if self.y is None else self.y[indices])

    def row_mask(self) -> np.ndarray:
        return np.ones(self.n_examples, dtype=bool)

    def flat_features(self) -> np.ndarray:
        return self.X

    def flat_labels(self) -> np.ndarray:
        if self.y is None:
            raise ValueError("batch has no labels")
        return self.y


@dataclass
class SequenceBatch:
    """Padded sequences: X is N x T x P, y is N x T x Q, mask is N x T.

    Flattened views are time-major: row t * N + n holds sequence n at timestep t,
    matching the order in which recurrent models emit predictions.
    """

    X: np.ndarray
    y: np.ndarray | None = None
    mask: np.ndarray | None = None

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        n, t = self.X.shape[:2]
        if self.y is not None:
            self.y = np.asarray(self.y, dtype=np.float64).reshape(n, t, -1)
        if self.mask is None:
            self.mask = np.ones((n, t), dtype=bool)
        self.mask = np.asarray(self.mask, dtype=bool)

    @property
    def n_examples(self) -> int:
        return int(self.X.shape[0])

    @property
    def n_steps(self) -> int:
        return int(self.X.shape[1])

    @property
    def input_dim(self) -> int:
        return int(self.X.shape[2])

    @property
    def padded(self) -> bool:
        return not bool(np.all(self.mask))

    def take(self, indices: np.ndarray) -> "SequenceBatch":
        return SequenceBatch(
            self.X[indices], None if self.y is None else self.y[indices], self.mask[indices]
        )

    def row_mask(self) -> np.ndarray:
        return self.mask.T.reshape(-1)

    def flat_features(self) -> np.ndarray:
        return self.X.transpose(1, 0, 2).reshape(-1, self.input_dim)

    def flat_labels(self) -> np.ndarray:
        if self.y is None:
            raise ValueError("batch has no labels")
        return self.y.transpose(1, 0, 2).reshape(-1, self.y.shape[2])


Batch = TabularBatch | SequenceBatch
