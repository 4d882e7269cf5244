from collections.abc import Callable

import numpy as np

from ..dtree import apl
from ..dtree.constants import DEFAULT_PRUNE_FRACTION, MIN_APL_EXAMPLES
from ..errors import RegionError
from ..models import Batch, TargetModel
from .regions import RegionPartition

Predictor = Callable[[np.ndarray], np.ndarray]


class TreeReference:
    """The reference examples on which a model's true APL is measured.

    Valid rows are shuffled once with `seed` so the tree-training and pruning
    halves of every APL computation are drawn from the whole reference set.
    """

    def __init__(
        self,
        batch: Batch,
        h: int,
        prune_fraction: float = DEFAULT_PRUNE_FRACTION,
        pruned: bool = True,
        partition: RegionPartition | None = None,
        seed: int = 0,
    ):
        self.batch = batch
        self.h = h
        self.prune_fraction = prune_fraction
        self.pruned = pruned
        inputs = batch.flat_features()[batch.row_mask()]
        self.order = np.random.default_rng(seed).permutation(len(inputs))
        if partition is None:
            partition = RegionPartition.single(inputs)
        elif len(partition.reference) != len(inputs):
            partition = partition.with_reference(inputs)
        self.partition = partition.reorder(self.order)

    @property
    def n_regions(self) -> int:
        return self.partition.n_regions

    def features_and_labels(self, model: TargetModel) -> tuple[np.ndarray, np.ndarray]:
        mask = self.batch.row_mask()
        features = model.tree_features(self.batch)
        labels = model.predict_labels(self.batch)[mask]
        return features[self.order], labels[self.order]

    def measure(self, model: TargetModel) -> float:
        """True APL of `model` over the whole reference set."""
        features, labels = self.features_and_labels(model)
        return apl(features, labels, self.h, self.prune_fraction, self.pruned)

    def measure_regions(self, model: TargetModel) -> np.ndarray:
        features, labels = self.features_and_labels(model)
        return regional_true_apls(
            self.partition, labels, self.h, self.prune_fraction, self.pruned, features=features
        )

    def measure_region(self, model: TargetModel, region: int) -> float:
        features, labels = self.features_and_labels(model)
        rows = self.partition.members(region)
        return apl(features[rows], labels[rows], self.h, self.prune_fraction, self.pruned)


def regional_true_apls(
    partition: RegionPartition,
    predict: Predictor | np.ndarray,
    h: int,
    prune_fraction: float = DEFAULT_PRUNE_FRACTION,
    pruned: bool = True,
    features: np.ndarray | None = None,
) -> np.ndarray:
    """Pruned APL within each region, using only that region's reference examples.

    `predict` is a callable on feature rows or labels aligned with the
    partition's reference rows. `features` replaces the reference inputs as
    tree features when given (e.g. inputs with appended beliefs).
    """
    rows_all = partition.reference if features is None else np.atleast_2d(features)
    result = np.zeros(partition.n_regions)
    for region in range(partition.n_regions):
        rows = partition.members(region)
        if len(rows) < MIN_APL_EXAMPLES:
            raise RegionError(
                f"{len(rows)} examples, need at least {MIN_APL_EXAMPLES}", partition.names[region]
            )
        X_r = rows_all[rows]
        labels = predict(X_r) if callable(predict) else np.asarray(predict)[rows]
        result[region] = apl(X_r, labels, h, prune_fraction, pruned)
    return result


def evaluation_apl(
    partition: RegionPartition,
    predict: Predictor | np.ndarray,
    h: int,
    prune_fraction: float = DEFAULT_PRUNE_FRACTION,
    pruned: bool = True,
    features: np.ndarray | None = None,
) -> float:
    """Mean of the per-region APLs; the complexity axis shared by every model and baseline."""
    return float(regional_true_apls(partition, predict, h, prune_fraction, pruned, features).mean())
