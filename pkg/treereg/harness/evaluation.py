import logging
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from ..data import SPLITS, Dataset
from ..dtree import DecisionTree, fidelity, fit_apl_tree
from ..errors import InsufficientSamplesError, RegionError
from ..metrics import MetricsRecord, score_outputs
from ..models import TargetModel, load_checkpoint, threshold
from ..options import RunConfig
from ..regularize import RegionPartition, evaluation_apl
from .builders import build_dataset, build_partition, split_partition
from .constants import EVAL_FILE, METRIC_COLUMNS

logger = logging.getLogger("Evaluation")


@dataclass
class SplitArrays:
    """Valid rows of one split: tree features, model probabilities and true labels."""

    features: np.ndarray
    probabilities: np.ndarray
    labels: np.ndarray


def model_arrays(model: TargetModel, dataset: Dataset, split: str) -> SplitArrays:
    batch = dataset.batch(split)
    mask = batch.row_mask()
    return SplitArrays(
        model.tree_features(batch),
        np.asarray(model.predict_proba(batch))[mask],
        batch.flat_labels()[mask],
    )


def feature_names(dataset: Dataset, width: int) -> list[str]:
    """Dataset feature names, extended with belief names s[k] for appended columns."""
    names = list(dataset.feature_names)
    return names + [f"s[{k}]" for k in range(width - len(names))]


def distill_trees(
    features: np.ndarray,
    labels: np.ndarray,
    h: int,
    prune_fraction: float,
    pruned: bool,
    seed: int = 0,
) -> list[DecisionTree]:
    """One pruned tree per output, fit to `labels` with a `seed`-shuffled train/prune split."""
    targets = np.asarray(labels).reshape(len(features), -1)
    return [
        fit_apl_tree(features, targets[:, q], h, prune_fraction, pruned, seed)
        for q in range(targets.shape[1])
    ]


def score_split(
    arrays: SplitArrays,
    partition: RegionPartition,
    trees: list[DecisionTree],
    h: int,
    prune_fraction: float,
    pruned: bool,
) -> MetricsRecord:
    """Scores of one split; APL comes from the shared evaluation path, never from a surrogate."""
    predicted = threshold(arrays.probabilities)
    apls = []
    fidelities = []
    for q, tree in enumerate(trees):
        try:
            apls.append(
                evaluation_apl(partition, predicted[:, q], h, prune_fraction, pruned, features=arrays.features)
            )
        except (RegionError, InsufficientSamplesError) as error:
            logger.warning(f"No evaluation APL for output {q}: {error}")
            apls.append(float("nan"))
        fidelities.append(fidelity(tree, predicted[:, q], arrays.features))
    return score_outputs(arrays.probabilities, arrays.labels, apls, fidelities)


def evaluate_model(
    model: TargetModel,
    dataset: Dataset,
    partition: RegionPartition | None,
    trees: list[DecisionTree],
    config: RunConfig,
) -> dict[str, MetricsRecord]:
    reg = config.regularizer
    results = {}
    for split in SPLITS:
        if not len(dataset.rows(split)):
            continue
        arrays = model_arrays(model, dataset, split)
        results[split] = score_split(
            arrays, split_partition(partition, dataset, split), trees, reg.h, reg.prune_fraction, reg.pruned
        )
        logger.info(
            f"{split}: AUC {results[split].auc:.4f}, accuracy {results[split].accuracy:.4f}, "
            f"APL {results[split].apl_eval:.3f}, fidelity {results[split].fidelity:.4f}"
        )
    return results


def metrics_frame(metrics: dict[str, MetricsRecord]) -> pd.DataFrame:
    rows = [
        {"split": split, **vars(output)}
        for split, record in metrics.items()
        for output in record.outputs
    ]
    return pd.DataFrame(rows, columns=METRIC_COLUMNS)


def run_eval(
    checkpoint: str | os.PathLike, config: RunConfig, output_dir: str | os.PathLike | None = None
) -> dict[str, MetricsRecord]:
    """Score a saved model on every split of the configured dataset."""
    model = load_checkpoint(checkpoint)
    dataset = build_dataset(config)
    partition = build_partition(config, dataset)
    reg = config.regularizer
    train = model_arrays(model, dataset, "train")
    trees = distill_trees(train.features, threshold(train.probabilities), reg.h, reg.prune_fraction, reg.pruned)
    metrics = evaluate_model(model, dataset, partition, trees, config)
    if output_dir is not None:
        target = Path(output_dir)
        target.mkdir(parents=True, exist_ok=True)
        metrics_frame(metrics).to_csv(target / EVAL_FILE, index=False)
        logger.info(f"Wrote {target / EVAL_FILE}")
    return metrics
