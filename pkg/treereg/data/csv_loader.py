import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from ..errors import ConfigError, DataError
from .types import TabularDataset

logger = logging.getLogger("DataLoader")


@dataclass
class CsvSchema:
    """How to read one CSV: target columns, their binarization rule and the categorical inputs.

    A target value v becomes label 1 when v >= threshold.
    """

    target: list[str]
    threshold: float = 0.5
    categorical: list[str] = field(default_factory=list)
    drop: list[str] = field(default_factory=list)
    delimiter: str = ","
    test_fraction: float = 0.3
    valid_fraction: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.target, str):
            self.target = [self.target]
        if not self.target:
            raise ConfigError("a CSV schema needs at least one target column")
        if not 0.0 <= self.test_fraction + self.valid_fraction < 1.0:
            raise ConfigError("test and validation fractions must leave a training split")


WINE_SCHEMA = CsvSchema(target=["quality"], threshold=5.0, delimiter=";")


def load_schema(path: str | os.PathLike) -> CsvSchema:
    source = Path(path)
    if not source.exists():
        raise ConfigError(f"schema file not found: {source}")
    data = json.loads(source.read_text())
    try:
        return CsvSchema(**data)
    except TypeError as error:
        raise ConfigError(f"invalid schema {source}: {error}") from None


def _numeric(frame: pd.DataFrame, column: str) -> np.ndarray:
    raw = frame[column]
    values = pd.to_numeric(raw, errors="coerce")
    bad = values.isna()
    if bad.any():
        row = int(np.flatnonzero(bad.to_numpy())[0])
        cell = raw.iloc[row]
        reason = "missing value" if pd.isna(cell) else f"unparseable value {cell!r}"
        raise DataError(reason, row=row, column=column)
    return values.to_numpy(dtype=np.float64)


def _split_tags(n: int, schema: CsvSchema) -> np.ndarray:
    order = np.random.default_rng(schema.seed).permutation(n)
    n_test = int(round(schema.test_fraction * n))
    n_valid = int(round(schema.valid_fraction * n))
    tags = np.full(n, "train", dtype=object)
    tags[order[:n_test]] = "test"
    tags[order[n_test : n_test + n_valid]] = "valid"
    return tags.astype(str)


def load_csv(path: str | os.PathLike, schema: CsvSchema) -> TabularDataset:
    """Parse a headed CSV, binarize targets, one-hot categoricals and z-score continuous columns.

    Means and standard deviations come from the training split only; a
    column that is constant there maps to 0.
    """
    source = Path(path)
    if not source.exists():
        raise DataError(f"CSV file not found: {source}")
    try:
        frame = pd.read_csv(source, sep=schema.delimiter)
    except pd.errors.EmptyDataError:
        raise DataError(f"empty CSV file: {source}") from None
    frame.columns = [str(c).strip().strip('"') for c in frame.columns]
    if frame.empty:
        raise DataError(f"CSV file has a header but no rows: {source}")

    for column in [*schema.target, *schema.categorical, *schema.drop]:
        if column not in frame.columns:
            raise DataError("missing column", column=column)

    y = np.column_stack([_numeric(frame, c) >= schema.threshold for c in schema.target]).astype(np.float64)
    inputs = [c for c in frame.columns if c not in schema.target and c not in schema.drop]
    continuous = [c for c in inputs if c not in schema.categorical]

    split = _split_tags(len(frame), schema)
    train = split == "train"
    blocks = []
    names: list[str] = []
    for column in continuous:
        values = _numeric(frame, column)
        mean = values[train].mean()
        std = values[train].std()
        blocks.append((values - mean) / std if std > 0 else np.zeros_like(values))
        names.append(column)
    for column in schema.categorical:
        dummies = pd.get_dummies(frame[column].astype(str), prefix=column, prefix_sep="=", dtype=np.float64)
        blocks.extend(dummies[c].to_numpy() for c in dummies.columns)
        names.extend(dummies.columns)

    if not blocks:
        raise DataError(f"no input columns left in {source}")
    X = np.column_stack(blocks)
    logger.info(
        f"Loaded {source.name}: {len(frame)} rows, {X.shape[1]} features, positive rate {y.mean(axis=0).round(3).tolist()}"
    )
    return TabularDataset(X, y, names, split, name=source.stem)
