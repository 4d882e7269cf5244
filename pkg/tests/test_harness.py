import json

import numpy as np
import pandas as pd
import pytest

from treereg.dtree import load_tree
from treereg.errors import ConfigError, TrainingDiverged
from treereg.harness import (
    build_dataset,
    build_partition,
    build_penalty,
    model_factory,
    run_baseline_trees,
    run_directory,
    run_distill,
    run_eval,
    run_sweep,
    run_train,
    sweep_jobs,
    tracking_correlation,
)
from treereg.harness import sweep as sweep_module
from treereg.harness.constants import METRIC_COLUMNS, TRADEOFF_COLUMNS
from treereg.models import load_checkpoint
from treereg.regularize import TrackingRow


def test_run_directory_names_the_sweep_coordinates(tiny_config):
    tiny_config.regularizer.kind = "l2"
    tiny_config.regularizer.lam = 0.5
    assert run_directory(tiny_config).parts[-2:] == ("parabola", "l2-lam0.5-seed0")
    tiny_config.experiment.run_name = "custom"
    assert run_directory(tiny_config).name == "custom"


def test_run_train_writes_every_artifact(tiny_config):
    tiny_config.regularizer.kind = "l2"
    tiny_config.regularizer.lam = 1e-3
    record = run_train(tiny_config, config_hash="abc")
    directory = run_directory(tiny_config)
    assert record.key == ("abc", "l2", "0.001", 0)
    for name in ("config.resolved", "metrics.csv", "timing.csv", "checkpoints/final.npz", "trees/output-0.dot"):
        assert (directory / name).exists(), name

    resolved = json.loads((directory / "config.resolved").read_text())
    assert resolved["regularizer"]["lam"] == 1e-3

    metrics = pd.read_csv(directory / "metrics.csv")
    assert list(metrics.columns) == METRIC_COLUMNS
    assert set(metrics["split"]) == set(record.metrics) == {"train", "test"}
    assert metrics["auc"].between(0, 1).all()
    assert len(pd.read_csv(directory / "timing.csv")) == tiny_config.optimizer.epochs

    tree = load_tree(directory / "trees/output-0.json")
    assert tree.h == tiny_config.regularizer.h
    assert load_checkpoint(directory / "checkpoints/final.npz").family == "mlp"


def test_tree_regularized_run_logs_the_surrogate(tiny_config):
    tiny_config.regularizer.kind = "tree-global"
    tiny_config.regularizer.lam = 0.1
    record = run_train(tiny_config)
    directory = run_directory(tiny_config)
    tracking = pd.read_csv(directory / "surrogate.csv")
    assert list(tracking.columns) == ["step", "region", "true_apl", "surrogate_apl"]
    assert (tracking["true_apl"] >= 0).all() and (tracking["surrogate_apl"] >= 0).all()
    fits = pd.read_csv(directory / "surrogate_fit.csv")
    assert list(fits.columns) == ["region", "step", "buffer_size", "augmented_count", "mean_mse", "max_mse"]
    assert len(fits) >= 1
    assert record.config_hash == tiny_config.config_hash()


def test_unregularized_run_skips_the_surrogate(tiny_config):
    run_train(tiny_config)
    assert not (run_directory(tiny_config) / "surrogate.csv").exists()


def test_tracking_correlation_prefers_retrain_checkpoints():
    rows = [TrackingRow(step, 0, float(step), float(step) * 2) for step in range(6)]
    rows.append(TrackingRow(6, 0, 1.0, 50.0))
    assert tracking_correlation(rows, {0, 2, 4}) == pytest.approx(1.0)
    assert tracking_correlation(rows, {6}) < 1.0
    assert tracking_correlation(rows[:1], set()) is None
    assert tracking_correlation([TrackingRow(s, 0, 1.0, float(s)) for s in range(4)], set()) is None


def test_sweep_jobs_run_the_unregularized_kind_once_per_seed(tiny_config):
    tiny_config.sweep.kinds = ["none", "l1"]
    tiny_config.sweep.lambdas = [0.0, 0.1, 0.1]
    tiny_config.sweep.seeds = [0, 1]
    assert sweep_jobs(tiny_config) == [
        ("none", 0.0, 0),
        ("none", 0.0, 1),
        ("l1", 0.0, 0),
        ("l1", 0.0, 1),
        ("l1", 0.1, 0),
        ("l1", 0.1, 1),
    ]


def test_sweep_is_reentrant(tiny_config):
    tiny_config.sweep.kinds = ["none", "l2"]
    first = run_sweep(tiny_config)
    assert len(first.records) == 3 and not first.failures
    tradeoff = tiny_config.experiment.output_dir + "/parabola/tradeoff.csv"
    frame = pd.read_csv(tradeoff)
    assert list(frame.columns) == TRADEOFF_COLUMNS
    assert set(zip(frame["regularizer"], frame["lam"])) == {("none", 0.0), ("l2", 0.0), ("l2", 1.0)}

    second = run_sweep(tiny_config)
    assert second.records == [] and second.skipped == 3
    assert len(pd.read_csv(tradeoff)) == len(frame)


def test_sweep_records_failures_and_keeps_going(tiny_config, monkeypatch):
    tiny_config.sweep.kinds = ["l2"]
    real = sweep_module.run_train

    def flaky(config, config_hash=None):
        if config.regularizer.lam > 0:
            raise TrainingDiverged(4, 0.3, float("inf"))
        return real(config, config_hash)

    monkeypatch.setattr(sweep_module, "run_train", flaky)
    result = run_sweep(tiny_config)
    assert len(result.records) == 1
    assert [(f.regularizer, f.lam) for f in result.failures] == [("l2", 1.0)]
    failures = pd.read_csv(tiny_config.experiment.output_dir + "/parabola/failures.csv")
    assert failures["error"].str.contains("non-finite").all()

    # the failed member is retried on the next run
    monkeypatch.setattr(sweep_module, "run_train", real)
    retry = run_sweep(tiny_config)
    assert retry.skipped == 1 and len(retry.records) == 1


def test_sweep_over_seeds_reports_tree_stability(tiny_config):
    tiny_config.sweep.kinds = ["none"]
    tiny_config.sweep.seeds = [0, 1]
    run_sweep(tiny_config)
    stability = pd.read_csv(tiny_config.experiment.output_dir + "/parabola/stability.csv")
    assert len(stability) == 1
    row = stability.iloc[0]
    assert row["n_trees"] == 2 and 1 <= row["modal_count"] <= 2


def test_distill_and_eval_a_checkpoint(tiny_config, tmp_path):
    run_train(tiny_config)
    checkpoint = run_directory(tiny_config) / "checkpoints/final.npz"

    distilled = run_distill(checkpoint, tiny_config, tmp_path / "distill")
    assert len(distilled) == 1 and distilled[0].region == "all"
    assert 0.0 <= distilled[0].fidelity <= 1.0
    report = pd.read_csv(tmp_path / "distill/fidelity.csv")
    assert list(report["output"]) == [0]
    assert (tmp_path / "distill/trees/output-0.dot").exists()

    metrics = run_eval(checkpoint, tiny_config, tmp_path / "eval")
    written = pd.read_csv(tmp_path / "eval/eval.csv")
    assert set(written["split"]) == set(metrics) == {"train", "test"}


def test_distill_fits_one_tree_per_region(tiny_config, tmp_path):
    tiny_config.data.dataset = "five_rectangles"
    tiny_config.data.rectangles_grid = 20
    tiny_config.regions.kind = "dataset"
    run_train(tiny_config)
    checkpoint = run_directory(tiny_config) / "checkpoints/final.npz"
    distilled = run_distill(checkpoint, tiny_config, tmp_path)
    assert [d.region for d in distilled] == [f"rectangle-{i}" for i in range(1, 6)]
    assert all(d.dot_path.endswith(f"{d.region}-output-0.dot") for d in distilled)


def test_baseline_trees_cover_the_h_grid(tiny_config):
    tiny_config.data.dataset = "two_region"
    tiny_config.regions.kind = "dataset"
    records = run_baseline_trees(tiny_config, [5, 50])
    assert [(r.regularizer, r.lam) for r in records] == [
        ("decision-tree", 5.0),
        ("regional-decision-tree", 5.0),
        ("decision-tree", 50.0),
        ("regional-decision-tree", 50.0),
    ]
    baselines = pd.read_csv(tiny_config.experiment.output_dir + "/parabola/baselines.csv")
    assert set(baselines["regularizer"]) == {"decision-tree", "regional-decision-tree"}
    assert records[0].trees and not records[1].trees


def test_regional_penalty_needs_regions(tiny_config):
    tiny_config.regularizer.kind = "tree-regional-l1"
    dataset = build_dataset(tiny_config)
    model = model_factory(tiny_config, dataset)(0)
    with pytest.raises(ConfigError):
        build_penalty(tiny_config, model, dataset.batch("train"), build_partition(tiny_config, dataset), 0)


def test_dataset_regions_follow_the_training_rows(tiny_config):
    tiny_config.data.dataset = "two_region"
    tiny_config.regions.kind = "dataset"
    dataset = build_dataset(tiny_config)
    partition = build_partition(tiny_config, dataset)
    assert partition.n_regions == 2
    np.testing.assert_array_equal(partition.assignments, dataset.region_assignments("train"))


def test_sweep_survives_unexpected_member_errors(tiny_config, monkeypatch):
    tiny_config.sweep.kinds = ["l2"]
    tiny_config.sweep.seeds = [0, 1]
    real = sweep_module.run_train

    def broken(config, config_hash=None):
        if config.regularizer.lam > 0:
            raise RuntimeError("disk went away")
        return real(config, config_hash)

    monkeypatch.setattr(sweep_module, "run_train", broken)
    result = run_sweep(tiny_config)
    assert len(result.records) == 2
    assert sorted((f.regularizer, f.lam, f.seed) for f in result.failures) == [("l2", 1.0, 0), ("l2", 1.0, 1)]
    failures = pd.read_csv(tiny_config.experiment.output_dir + "/parabola/failures.csv")
    assert len(failures) == 2 and failures["error"].eq("disk went away").all()
    stability = pd.read_csv(tiny_config.experiment.output_dir + "/parabola/stability.csv")
    assert list(stability["lam"]) == [0.0] and list(stability["n_trees"]) == [2]
