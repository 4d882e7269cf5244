import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError
from ..regularize import RegionPartition
from .constants import KMEANS_MAX_ITER, KMEANS_TOLERANCE
from .types import Dataset, TabularDataset

logger = logging.getLogger("KMeans")


@dataclass
class KMeansFit:
    centroids: np.ndarray
    assignments: np.ndarray
    n_iter: int
    history: list[float] = field(default_factory=list)


def _squared_distances(X: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    return ((X[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)


def _plus_plus(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    centroids = [X[rng.integers(len(X))]]
    for _ in range(k - 1):
        nearest = _squared_distances(X, np.array(centroids)).min(axis=1)
        total = nearest.sum()
        index = rng.integers(len(X)) if total == 0 else rng.choice(len(X), p=nearest / total)
        centroids.append(X[index])
    return np.array(centroids, dtype=np.float64)


def kmeans(
    X: np.ndarray, k: int, seed: int = 0, max_iter: int = KMEANS_MAX_ITER, tolerance: float = KMEANS_TOLERANCE
) -> KMeansFit:
    """Lloyd iterations from a k-means++ start until centroids move less than `tolerance`.

    An empty cluster is re-seeded at the point farthest from its nearest centroid.
    """
    data = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if k < 1 or len(data) < k:
        raise ConfigError(f"k-means needs 1 <= k <= N, got k={k}, N={len(data)}")
    rng = np.random.default_rng(seed)
    centroids = _plus_plus(data, k, rng)
    history = []
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        distances = _squared_distances(data, centroids)
        assignments = distances.argmin(axis=1)
        history.append(float(distances[np.arange(len(data)), assignments].sum()))

        updated = centroids.copy()
        for cluster in range(k):
            members = data[assignments == cluster]
            if len(members):
                updated[cluster] = members.mean(axis=0)
            else:
                farthest = int(distances.min(axis=1).argmax())
                logger.debug(f"Cluster {cluster} is empty; re-seeding at row {farthest}")
                updated[cluster] = data[farthest]
        shift = float(np.sqrt(((updated - centroids) ** 2).sum(axis=1)).max())
        centroids = updated
        if shift < tolerance:
            break

    assignments = _squared_distances(data, centroids).argmin(axis=1)
    logger.info(f"k-means with k={k} converged after {n_iter} iterations, inertia {history[-1]:.4f}")
    return KMeansFit(centroids, assignments.astype(np.int64), n_iter, history)


def kmeans_regions(dataset: Dataset | np.ndarray, k: int, seed: int = 0) -> RegionPartition:
    """Cluster the training inputs into k regions; centroids make the partition usable on new points."""
    if isinstance(dataset, TabularDataset):
        reference = dataset.X[dataset.rows("train")]
    elif isinstance(dataset, np.ndarray):
        reference = dataset
    else:
        batch = dataset.batch("train")
        reference = batch.flat_features()[batch.row_mask()]
    fit = kmeans(reference, k, seed)
    return RegionPartition.from_centroids(fit.centroids, reference, [f"cluster-{r}" for r in range(k)])
