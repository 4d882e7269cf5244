from .baselines import run_baseline_trees
from .builders import build_dataset, build_partition, build_penalty, model_factory, split_partition
from .distill import DistilledTree, run_distill
from .evaluation import distill_trees, evaluate_model, metrics_frame, run_eval, score_split
from .records import CsvAppender, SweepRecord, completed_keys
from .render import render_boundary, render_model_boundaries
from .sweep import SweepFailure, SweepResult, run_sweep, sweep_jobs
from .train import run_directory, run_train, tracking_correlation, train_model

__all__ = [
    "CsvAppender",
    "DistilledTree",
    "SweepFailure",
    "SweepRecord",
    "SweepResult",
    "build_dataset",
    "build_partition",
    "build_penalty",
    "completed_keys",
    "distill_trees",
    "evaluate_model",
    "metrics_frame",
    "model_factory",
    "render_boundary",
    "render_model_boundaries",
    "run_baseline_trees",
    "run_directory",
    "run_distill",
    "run_eval",
    "run_sweep",
    "run_train",
    "score_split",
    "split_partition",
    "sweep_jobs",
    "tracking_correlation",
    "train_model",
]
