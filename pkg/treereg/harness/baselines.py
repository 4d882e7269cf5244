import logging
from collections.abc import Callable

import numpy as np
import pandas as pd

from ..data import SPLITS, Dataset
from ..dtree import DecisionTree
from ..dtree.constants import MIN_APL_EXAMPLES
from ..metrics import MetricsRecord
from ..models import threshold
from ..options import RunConfig
from ..regularize import RegionPartition
from .builders import build_dataset, build_partition, reference_inputs, split_partition
from .constants import BASELINES_FILE, TRADEOFF_COLUMNS
from .evaluation import SplitArrays, distill_trees, score_split
from .records import SweepRecord
from .sweep import sweep_directory

logger = logging.getLogger("Baselines")

TreePredictor = Callable[[np.ndarray, RegionPartition], np.ndarray]


def _true_labels(dataset: Dataset, split: str) -> np.ndarray:
    batch = dataset.batch(split)
    return batch.flat_labels()[batch.row_mask()]


def _tree_probabilities(trees: list[DecisionTree], X: np.ndarray) -> np.ndarray:
    return np.column_stack([tree.predict_proba(X) for tree in trees])


def _regional_probabilities(
    global_trees: list[DecisionTree],
    regional: dict[int, list[DecisionTree]],
    X: np.ndarray,
    partition: RegionPartition,
) -> np.ndarray:
    probs = _tree_probabilities(global_trees, X)
    for region, trees in regional.items():
        rows = partition.members(region)
        if len(rows):
            probs[rows] = _tree_probabilities(trees, X[rows])
    return probs


def _score(
    config: RunConfig,
    dataset: Dataset,
    partition: RegionPartition | None,
    predict: TreePredictor,
) -> dict[str, MetricsRecord]:
    """Score a tree predictor the way neural runs are scored, with APL from trees distilled at the run's h."""
    reg = config.regularizer
    train_X = reference_inputs(dataset.batch("train"))
    train_probs = predict(train_X, split_partition(partition, dataset, "train"))
    evaluators = distill_trees(train_X, threshold(train_probs), reg.h, reg.prune_fraction, reg.pruned)
    metrics = {}
    for split in SPLITS:
        if not len(dataset.rows(split)):
            continue
        regions = split_partition(partition, dataset, split)
        X = reference_inputs(dataset.batch(split))
        arrays = SplitArrays(X, predict(X, regions), _true_labels(dataset, split))
        metrics[split] = score_split(arrays, regions, evaluators, reg.h, reg.prune_fraction, reg.pruned)
    return metrics


def run_baseline_trees(config: RunConfig, h_grid: list[int] | None = None) -> list[SweepRecord]:
    """Decision trees trained directly on the labels across an h grid, globally and one per region."""
    config.validate()
    dataset = build_dataset(config)
    partition = build_partition(config, dataset)
    reg = config.regularizer
    seed = config.experiment.seed
    config_hash = config.config_hash()
    X = reference_inputs(dataset.batch("train"))
    y = _true_labels(dataset, "train")
    train_regions = split_partition(partition, dataset, "train")

    records = []
    for h in h_grid or config.sweep.baseline_h:
        global_trees = distill_trees(X, y, h, reg.prune_fraction, reg.pruned, seed)
        metrics = _score(config, dataset, partition, lambda data, _, trees=global_trees: _tree_probabilities(trees, data))
        records.append(SweepRecord(config_hash, "decision-tree", float(h), seed, metrics, trees=global_trees))
        logger.info(f"Decision tree h={h}: test AUC {metrics.get('test', metrics['train']).auc:.4f}")

        if partition is None or partition.n_regions < 2:
            continue
        regional = {}
        for region in range(train_regions.n_regions):
            rows = train_regions.members(region)
            if len(rows) < MIN_APL_EXAMPLES:
                logger.warning(f"Region {train_regions.names[region]} keeps the global tree: {len(rows)} examples")
                continue
            regional[region] = distill_trees(X[rows], y[rows], h, reg.prune_fraction, reg.pruned, seed)
        metrics = _score(
            config,
            dataset,
            partition,
            lambda data, regions, trees=global_trees, by_region=regional: _regional_probabilities(
                trees, by_region, data, regions
            ),
        )
        records.append(SweepRecord(config_hash, "regional-decision-tree", float(h), seed, metrics))
        logger.info(f"Regional decision trees h={h}: test AUC {metrics.get('test', metrics['train']).auc:.4f}")

    directory = sweep_directory(config)
    directory.mkdir(parents=True, exist_ok=True)
    rows = [row for record in records for row in record.rows()]
    pd.DataFrame(rows, columns=TRADEOFF_COLUMNS).to_csv(directory / BASELINES_FILE, index=False)
    logger.info(f"Wrote {len(records)} baseline records to {directory / BASELINES_FILE}")
    return records
