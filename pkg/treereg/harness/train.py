import logging
import time
from pathlib import Path

import numpy as np
import pandas as pd

from ..data import Dataset
from ..dtree import DecisionTree, write_tree
from ..errors import TrainingDiverged
from ..models import TargetModel, save_checkpoint, threshold, train_steps
from ..options import RunConfig
from ..regularize import Penalty, RegionPartition, TrackingRow
from .builders import build_dataset, build_partition, build_penalty, model_factory
from .constants import (
    CHECKPOINTS_DIR,
    CONFIG_FILE,
    FINAL_CHECKPOINT,
    METRICS_FILE,
    SURROGATE_FILE,
    SURROGATE_FIT_FILE,
    TIMING_FILE,
    TREES_DIR,
)
from .evaluation import distill_trees, evaluate_model, feature_names, metrics_frame, model_arrays
from .records import SweepRecord, lam_key
from .render import render_model_boundaries

logger = logging.getLogger("Trainer")


def run_directory(config: RunConfig) -> Path:
    experiment = config.experiment
    name = experiment.run_name or (
        f"{experiment.name}/{config.regularizer.kind}-lam{lam_key(config.regularizer.lam)}-seed{experiment.seed}"
    )
    return Path(experiment.output_dir) / name


def tracking_correlation(rows: list[TrackingRow], retrain_steps: set[int]) -> float | None:
    """Pearson correlation of surrogate and true APL at retrain checkpoints, over all samples if too few."""
    frame = pd.DataFrame([vars(row) for row in rows], columns=["step", "region", "true_apl", "surrogate_apl"])
    at_retrain = frame[frame["step"].isin(retrain_steps)]
    if len(at_retrain) >= 3:
        frame = at_retrain
    if len(frame) < 2 or frame["true_apl"].nunique() < 2 or frame["surrogate_apl"].nunique() < 2:
        return None
    return float(frame["true_apl"].corr(frame["surrogate_apl"]))


def _write_surrogate_logs(penalty: Penalty, directory: Path) -> float | None:
    if not penalty.tracking:
        return None
    pd.DataFrame([vars(row) for row in penalty.tracking]).to_csv(directory / SURROGATE_FILE, index=False)
    reports = [{"region": region, **vars(report)} for region, report in penalty.fit_reports]
    pd.DataFrame(
        reports, columns=["region", "step", "buffer_size", "augmented_count", "mean_mse", "max_mse"]
    ).to_csv(directory / SURROGATE_FIT_FILE, index=False)
    correlation = tracking_correlation(penalty.tracking, {report.step for _, report in penalty.fit_reports})
    if correlation is not None:
        logger.info(f"Surrogate/true APL correlation at retrain checkpoints: {correlation:.3f}")
    return correlation


def _write_trees(
    model: TargetModel, dataset: Dataset, trees: list[DecisionTree], directory: Path, images: bool
) -> dict[str, str]:
    artifacts = {}
    names = feature_names(dataset, trees[0].n_features)
    for q, tree in enumerate(trees):
        dot = write_tree(tree, names, directory, f"output-{q}")
        artifacts[f"tree-{q}"] = str(dot)
    if images:
        artifacts.update(render_model_boundaries(model, dataset, directory))
    return artifacts


def train_model(
    config: RunConfig, dataset: Dataset, partition: RegionPartition | None, directory: Path | None = None
) -> tuple[TargetModel, Penalty, list[dict]]:
    """Train one model with the configured penalty, interleaving surrogate updates after every step."""
    seed = config.experiment.seed
    reg = config.regularizer
    opt = config.optimizer
    batch = dataset.batch("train")
    factory = model_factory(config, dataset)
    model = factory(seed)
    penalty = build_penalty(config, model, batch, partition, seed)
    if reg.lam > 0:
        penalty.warm_start(factory, batch, seed)

    timing = []
    started = time.perf_counter()
    losses: list[float] = []
    steps = train_steps(
        model, batch, opt.epochs, opt.batch_size, reg.lam, penalty, learning_rate=opt.learning_rate, seed=seed
    )
    try:
        for result in steps:
            losses.append(result.loss)
            if reg.lam > 0:
                penalty.after_step(model, result)
            if not result.end_of_epoch:
                continue
            elapsed = time.perf_counter() - started
            timing.append({"epoch": result.epoch, "seconds": elapsed})
            logger.info(
                f"Epoch {result.epoch + 1}/{opt.epochs}: loss {np.mean(losses):.4f}, "
                f"data {result.data_loss:.4f}, penalty {result.penalty:.4f} ({elapsed:.2f}s)"
            )
            losses.clear()
            started = time.perf_counter()
            every = config.experiment.checkpoint_every
            if directory is not None and every > 0 and (result.epoch + 1) % every == 0:
                save_checkpoint(model, directory / CHECKPOINTS_DIR / f"epoch-{result.epoch + 1}.npz")
    except TrainingDiverged as error:
        logger.error(f"Training diverged with {reg.kind} at lambda={reg.lam}: {error}")
        raise
    return model, penalty, timing


def run_train(config: RunConfig, config_hash: str | None = None) -> SweepRecord:
    """Train, distill and evaluate one run, persisting every artifact into its run directory."""
    config.validate()
    directory = run_directory(config)
    directory.mkdir(parents=True, exist_ok=True)
    config.save(directory / CONFIG_FILE)
    reg = config.regularizer
    seed = config.experiment.seed
    logger.info(f"Run {directory}: {config.model.family} on {config.data.dataset}, {reg.kind} at lambda={reg.lam}")

    dataset = build_dataset(config)
    partition = build_partition(config, dataset)
    model, penalty, timing = train_model(config, dataset, partition, directory)
    checkpoint = save_checkpoint(
        model, directory / CHECKPOINTS_DIR / FINAL_CHECKPOINT, regularizer=reg.kind, lam=reg.lam, seed=seed
    )

    train = model_arrays(model, dataset, "train")
    trees = distill_trees(train.features, threshold(train.probabilities), reg.h, reg.prune_fraction, reg.pruned, seed)
    metrics = evaluate_model(model, dataset, partition, trees, config)

    metrics_frame(metrics).to_csv(directory / METRICS_FILE, index=False)
    pd.DataFrame(timing, columns=["epoch", "seconds"]).to_csv(directory / TIMING_FILE, index=False)
    correlation = _write_surrogate_logs(penalty, directory)
    artifacts = {"checkpoint": str(checkpoint), "metrics": str(directory / METRICS_FILE)}
    artifacts.update(_write_trees(model, dataset, trees, directory / TREES_DIR, config.experiment.images))

    return SweepRecord(
        config_hash or config.config_hash(),
        reg.kind,
        reg.lam,
        seed,
        metrics,
        artifacts,
        trees,
        correlation,
    )
