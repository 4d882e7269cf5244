import logging
import os
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from ..dtree import DecisionTree, fidelity, write_tree
from ..dtree.constants import MIN_APL_EXAMPLES
from ..models import load_checkpoint, threshold
from ..options import RunConfig
from .builders import build_dataset, build_partition, split_partition
from .constants import FIDELITY_FILE, TREES_DIR
from .evaluation import distill_trees, feature_names, model_arrays
from .render import render_model_boundaries

logger = logging.getLogger("Distill")


@dataclass
class DistilledTree:
    region: str
    output: int
    tree: DecisionTree = field(repr=False)
    fidelity: float
    apl: float
    n_train: int
    dot_path: str


def _slug(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", name)


def run_distill(
    checkpoint: str | os.PathLike, config: RunConfig, output_dir: str | os.PathLike
) -> list[DistilledTree]:
    """Fit pruned trees to a saved model's training predictions, one per output and region.

    Fidelity is measured on the test split when there is one. Regions with
    fewer than the minimum number of training examples are skipped.
    """
    model = load_checkpoint(checkpoint)
    dataset = build_dataset(config)
    partition = build_partition(config, dataset)
    reg = config.regularizer
    target = Path(output_dir)

    held_split = "test" if len(dataset.rows("test")) else "train"
    train = model_arrays(model, dataset, "train")
    held = model_arrays(model, dataset, held_split)
    train_regions = split_partition(partition, dataset, "train")
    held_regions = split_partition(partition, dataset, held_split)
    names = feature_names(dataset, train.features.shape[1])
    train_labels = threshold(train.probabilities)
    held_labels = threshold(held.probabilities)

    distilled = []
    for region in range(train_regions.n_regions):
        region_name = train_regions.names[region]
        rows = train_regions.members(region)
        if len(rows) < MIN_APL_EXAMPLES:
            logger.warning(f"Skipping region {region_name}: {len(rows)} training examples, need {MIN_APL_EXAMPLES}")
            continue
        held_rows = held_regions.members(region)
        trees = distill_trees(
            train.features[rows], train_labels[rows], reg.h, reg.prune_fraction, reg.pruned, config.experiment.seed
        )
        for q, tree in enumerate(trees):
            score = (
                fidelity(tree, held_labels[held_rows, q], held.features[held_rows]) if len(held_rows) else float("nan")
            )
            stem = f"output-{q}" if train_regions.n_regions == 1 else f"{_slug(region_name)}-output-{q}"
            dot = write_tree(tree, names, target / TREES_DIR, stem)
            path_lengths = float(np.mean(tree.path_lengths(train.features[rows])))
            distilled.append(DistilledTree(region_name, q, tree, score, path_lengths, len(rows), str(dot)))
            logger.info(
                f"Region {region_name}, output {q}: {tree.n_leaves} leaves, APL {path_lengths:.2f}, "
                f"{held_split} fidelity {score:.4f}"
            )

    report = pd.DataFrame(
        [
            {
                "region": d.region,
                "output": d.output,
                "fidelity": d.fidelity,
                "apl": d.apl,
                "n_leaves": d.tree.n_leaves,
                "n_train": d.n_train,
                "dot": d.dot_path,
            }
            for d in distilled
        ],
        columns=["region", "output", "fidelity", "apl", "n_leaves", "n_train", "dot"],
    )
    target.mkdir(parents=True, exist_ok=True)
    report.to_csv(target / FIDELITY_FILE, index=False)
    if config.experiment.images:
        render_model_boundaries(model, dataset, target / TREES_DIR)
    return distilled
