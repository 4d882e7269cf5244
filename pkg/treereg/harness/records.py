import os
import threading
from dataclasses import dataclass, field
from pathlib import Path

import pandas as pd

from ..dtree import DecisionTree
from ..metrics import MetricsRecord
from .constants import RUN_KEY, TRADEOFF_COLUMNS


def lam_key(lam: float) -> str:
    return f"{float(lam):.12g}"


@dataclass
class SweepRecord:
    """Outcome of one (config, regularizer, lambda, seed) run."""

    config_hash: str
    regularizer: str
    lam: float
    seed: int
    metrics: dict[str, MetricsRecord]
    artifacts: dict[str, str] = field(default_factory=dict)
    trees: list[DecisionTree] = field(default_factory=list, repr=False)
    tracking_correlation: float | None = None

    @property
    def key(self) -> tuple[str, str, str, int]:
        return self.config_hash, self.regularizer, lam_key(self.lam), int(self.seed)

    def rows(self) -> list[dict]:
        return [
            {
                "config_hash": self.config_hash,
                "regularizer": self.regularizer,
                "lam": self.lam,
                "seed": self.seed,
                "split": split,
                **vars(output),
            }
            for split, record in self.metrics.items()
            for output in record.outputs
        ]


class CsvAppender:
    """Appends rows to one CSV under a lock; the header is written with the first rows."""

    def __init__(self, path: str | os.PathLike, columns: list[str]):
        self.path = Path(path)
        self.columns = columns
        self.lock = threading.Lock()

    def append(self, rows: list[dict]) -> None:
        if not rows:
            return
        frame = pd.DataFrame(rows, columns=self.columns)
        with self.lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            exists = self.path.exists() and self.path.stat().st_size > 0
            frame.to_csv(self.path, mode="a", header=not exists, index=False)


def completed_keys(path: str | os.PathLike) -> set[tuple[str, str, str, int]]:
    """Run keys already present in a tradeoff CSV."""
    source = Path(path)
    if not source.exists() or source.stat().st_size == 0:
        return set()
    frame = pd.read_csv(source, usecols=RUN_KEY, dtype={"config_hash": str, "regularizer": str})
    return {(h, r, lam_key(lam), int(s)) for h, r, lam, s in frame.itertuples(index=False)}


def tradeoff_appender(path: str | os.PathLike) -> CsvAppender:
    return CsvAppender(path, TRADEOFF_COLUMNS)
