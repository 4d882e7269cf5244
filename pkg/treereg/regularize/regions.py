import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import numpy as np

from ..errors import ConfigError, RegionError, ShapeError


@dataclass
class RegionPartition:
    """Exclusive regions of input space, with the reference rows assigned to each.

    Regions are defined by nearest centroid, by bin edges on one feature, or by
    an explicit per-row assignment (which cannot place unseen points).
    """

    names: list[str]
    reference: np.ndarray
    assignments: np.ndarray
    centroids: np.ndarray | None = None
    bin_feature: int | None = None
    bin_edges: np.ndarray | None = None
    _members: dict[int, np.ndarray] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.reference = np.atleast_2d(np.asarray(self.reference, dtype=np.float64))
        self.assignments = np.asarray(self.assignments, dtype=np.int64).ravel()
        if self.assignments.size != self.reference.shape[0]:
            raise ShapeError("RegionPartition", self.reference.shape, self.assignments.shape)
        if self.assignments.size and (self.assignments.min() < 0 or self.assignments.max() >= self.n_regions):
            raise RegionError("assignment outside the declared regions")

    @property
    def n_regions(self) -> int:
        return len(self.names)

    @classmethod
    def from_centroids(cls, centroids: np.ndarray, reference: np.ndarray, names: list[str] | None = None):
        centers = np.atleast_2d(np.asarray(centroids, dtype=np.float64))
        labels = names or [f"region-{r}" for r in range(len(centers))]
        partition = cls(labels, reference, np.zeros(len(np.atleast_2d(reference)), dtype=np.int64), centers)
        partition.assignments = partition.assign(partition.reference)
        return partition

    @classmethod
    def from_bins(cls, feature: int, edges, reference: np.ndarray, names: list[str] | None = None):
        inner = np.asarray(edges, dtype=np.float64).ravel()
        labels = names or [f"region-{r}" for r in range(len(inner) + 1)]
        partition = cls(labels, reference, np.zeros(len(np.atleast_2d(reference)), dtype=np.int64), None, feature, inner)
        partition.assignments = partition.assign(partition.reference)
        return partition

    @classmethod
    def single(cls, reference: np.ndarray) -> "RegionPartition":
        rows = np.atleast_2d(reference)
        return cls(["all"], rows, np.zeros(len(rows), dtype=np.int64), np.zeros((1, rows.shape[1])))

    def assign(self, X: np.ndarray) -> np.ndarray:
        data = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if self.n_regions == 1:
            return np.zeros(len(data), dtype=np.int64)
        if self.centroids is not None:
            distances = ((data[:, None, :] - self.centroids[None, :, :]) ** 2).sum(axis=2)
            return distances.argmin(axis=1).astype(np.int64)
        if self.bin_edges is not None and self.bin_feature is not None:
            return np.searchsorted(self.bin_edges, data[:, self.bin_feature], side="right").astype(np.int64)
        raise RegionError("an explicit assignment cannot place new points")

    def members(self, region: int) -> np.ndarray:
        if region not in self._members:
            self._members[region] = np.flatnonzero(self.assignments == region)
        return self._members[region]

    def region_examples(self, region: int) -> np.ndarray:
        return self.reference[self.members(region)]

    def reorder(self, order: np.ndarray) -> "RegionPartition":
        return replace(self, reference=self.reference[order], assignments=self.assignments[order], _members={})

    def with_reference(self, reference: np.ndarray, assignments: np.ndarray | None = None) -> "RegionPartition":
        rows = np.atleast_2d(np.asarray(reference, dtype=np.float64))
        labels = self.assign(rows) if assignments is None else assignments
        return replace(self, reference=rows, assignments=labels, _members={})

    def check_sizes(self, minimum: int) -> None:
        for region in range(self.n_regions):
            size = len(self.members(region))
            if size < minimum:
                raise RegionError(f"{size} reference examples, need at least {minimum}", self.names[region])

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {"regions": [[r, name] for r, name in enumerate(self.names)]}
        if self.centroids is not None:
            data["centroids"] = self.centroids.tolist()
        elif self.bin_edges is not None:
            data["bins"] = {"feature": self.bin_feature, "edges": self.bin_edges.tolist()}
        else:
            data["assignments"] = self.assignments.tolist()
        return data


def save_region_map(partition: RegionPartition, path: str | os.PathLike) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(json.dumps(partition.to_dict(), indent=2))
    return target


def load_region_map(path: str | os.PathLike, reference: np.ndarray) -> RegionPartition:
    """Read a region map and assign `reference` rows with it."""
    source = Path(path)
    if not source.exists():
        raise ConfigError(f"region map not found: {source}")
    data = json.loads(source.read_text())
    names = [str(name) for _, name in sorted(data["regions"], key=lambda entry: int(entry[0]))]
    if "centroids" in data:
        return RegionPartition.from_centroids(np.asarray(data["centroids"]), reference, names)
    if "bins" in data:
        return RegionPartition.from_bins(int(data["bins"]["feature"]), data["bins"]["edges"], reference, names)
    if "assignments" in data:
        return RegionPartition(names, reference, np.asarray(data["assignments"]))
    raise ConfigError(f"region map {source} has no centroids, bins or assignments")
