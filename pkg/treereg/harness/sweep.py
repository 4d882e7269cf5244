import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path

import pandas as pd

from ..dtree import DecisionTree, load_tree
from ..errors import TreeRegError
from ..metrics import tree_stability
from ..options import RunConfig
from .constants import FAILURES_FILE, STABILITY_FILE, TRADEOFF_FILE, TREES_DIR
from .records import CsvAppender, SweepRecord, completed_keys, lam_key, tradeoff_appender
from .train import run_directory, run_train

logger = logging.getLogger("Sweep")


@dataclass
class SweepFailure:
    regularizer: str
    lam: float
    seed: int
    error: str


@dataclass
class SweepResult:
    records: list[SweepRecord] = field(default_factory=list)
    failures: list[SweepFailure] = field(default_factory=list)
    skipped: int = 0


def sweep_directory(config: RunConfig) -> Path:
    return Path(config.experiment.output_dir) / (config.experiment.run_name or config.experiment.name)


def sweep_jobs(config: RunConfig) -> list[tuple[str, float, int]]:
    """Cross product of regularizer kinds, lambdas and seeds; the unregularized kind runs once per seed."""
    jobs = []
    seen = set()
    for kind in config.sweep.kinds:
        lambdas = [0.0] if kind == "none" else config.sweep.lambdas
        for lam in lambdas:
            for seed in config.sweep.seeds:
                if (kind, lam_key(lam), seed) in seen:
                    continue
                seen.add((kind, lam_key(lam), seed))
                jobs.append((kind, float(lam), int(seed)))
    return jobs


def member_config(config: RunConfig, kind: str, lam: float, seed: int) -> RunConfig:
    member = config.copy()
    member.regularizer.kind = kind
    member.regularizer.lam = lam
    member.experiment.seed = seed
    member.experiment.output_dir = str(sweep_directory(config))
    member.experiment.run_name = f"{kind}-lam{lam_key(lam)}-seed{seed}"
    return member


def run_sweep(config: RunConfig) -> SweepResult:
    """Train every (regularizer, lambda, seed) member, appending finished members to the tradeoff CSV.

    Members already present in the CSV under the same config hash are skipped,
    so a finished sweep can be re-run without changing anything. A failing
    member is logged and recorded; the rest of the sweep continues.
    """
    config.validate()
    directory = sweep_directory(config)
    directory.mkdir(parents=True, exist_ok=True)
    config_hash = config.config_hash()
    tradeoff = tradeoff_appender(directory / TRADEOFF_FILE)
    failures_log = CsvAppender(directory / FAILURES_FILE, ["config_hash", "regularizer", "lam", "seed", "error"])
    done = completed_keys(tradeoff.path)

    result = SweepResult()
    pending = []
    for kind, lam, seed in sweep_jobs(config):
        if (config_hash, kind, lam_key(lam), seed) in done:
            result.skipped += 1
        else:
            pending.append((kind, lam, seed))
    logger.info(
        f"Sweep {directory} ({config_hash[:12]}): {len(pending)} members to run, {result.skipped} already done"
    )

    def run_member(kind: str, lam: float, seed: int) -> SweepRecord:
        record = run_train(member_config(config, kind, lam, seed), config_hash)
        tradeoff.append(record.rows())
        return record

    with ThreadPoolExecutor(max_workers=config.sweep.workers) as pool:
        futures = {pool.submit(run_member, *job): job for job in pending}
        for future in as_completed(futures):
            kind, lam, seed = futures[future]
            try:
                result.records.append(future.result())
                logger.info(f"Finished {kind} lambda={lam:g} seed={seed} ({len(result.records)}/{len(pending)})")
            except Exception as error:
                if isinstance(error, TreeRegError):
                    logger.warning(f"Sweep member {kind} lambda={lam:g} seed={seed} failed: {error}")
                else:
                    logger.exception(f"Sweep member {kind} lambda={lam:g} seed={seed} failed unexpectedly")
                result.failures.append(SweepFailure(kind, lam, seed, str(error)))
                failures_log.append(
                    [{"config_hash": config_hash, "regularizer": kind, "lam": lam, "seed": seed, "error": str(error)}]
                )

    write_stability(config, directory)
    return result


def _member_trees(config: RunConfig, kind: str, lam: float, seed: int) -> list[DecisionTree]:
    trees_dir = run_directory(member_config(config, kind, lam, seed)) / TREES_DIR
    return [load_tree(path) for path in sorted(trees_dir.glob("output-*.json"))]


def write_stability(config: RunConfig, directory: Path) -> Path | None:
    """Group the distilled trees of each (regularizer, lambda) across seeds by structure."""
    rows = []
    seeds = config.sweep.seeds
    if len(seeds) < 2:
        return None
    for kind, lam in dict.fromkeys((k, v) for k, v, _ in sweep_jobs(config)):
        per_seed = [_member_trees(config, kind, lam, seed) for seed in seeds]
        per_seed = [trees for trees in per_seed if trees]
        if len(per_seed) < 2:
            continue
        for q in range(min(len(trees) for trees in per_seed)):
            report = tree_stability([trees[q] for trees in per_seed])
            rows.append(
                {
                    "regularizer": kind,
                    "lam": lam,
                    "output": q,
                    "n_trees": report.n_trees,
                    "modal_count": report.modal_count,
                    "distinct_shapes": report.distinct_shapes,
                }
            )
    if not rows:
        return None
    target = directory / STABILITY_FILE
    pd.DataFrame(rows).to_csv(target, index=False)
    logger.info(f"Wrote tree stability for {len(rows)} groups to {target}")
    return target
