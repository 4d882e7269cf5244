import logging
import os
from pathlib import Path

import numpy as np
import pandas as pd

from ..errors import DataError
from .types import Dataset, SequenceDataset, TabularDataset

logger = logging.getLogger("DataLoader")

LABEL_PREFIX = "y"


def save_dataset(dataset: Dataset, directory: str | os.PathLike) -> tuple[Path, Path]:
    """Write `<name>.csv` (features and labels) and `<name>.splits.csv` (row, split, region)."""
    target = Path(directory)
    target.mkdir(parents=True, exist_ok=True)
    if isinstance(dataset, TabularDataset):
        frame = pd.DataFrame(dataset.X, columns=dataset.feature_names)
        for q in range(dataset.n_outputs):
            frame[f"{LABEL_PREFIX}{q}"] = dataset.y[:, q].astype(np.int64)
        splits = pd.DataFrame({"row": np.arange(len(frame)), "split": dataset.split})
        if dataset.regions is not None:
            splits["region"] = dataset.regions
            if dataset.region_names:
                splits["region_name"] = [dataset.region_names[r] for r in dataset.regions]
    else:
        parts = []
        for index, (x, y) in enumerate(dataset.sequences):
            part = pd.DataFrame(x, columns=dataset.feature_names)
            for q in range(y.shape[1]):
                part[f"{LABEL_PREFIX}{q}"] = y[:, q].astype(np.int64)
            part.insert(0, "timestep", np.arange(len(x)))
            part.insert(0, "sequence", index)
            parts.append(part)
        frame = pd.concat(parts, ignore_index=True)
        splits = pd.DataFrame(
            {"row": np.arange(len(frame)), "split": dataset.split[frame["sequence"].to_numpy()], "sequence": frame["sequence"]}
        )
    data_path = target / f"{dataset.name}.csv"
    splits_path = target / f"{dataset.name}.splits.csv"
    frame.to_csv(data_path, index=False)
    splits.to_csv(splits_path, index=False)
    logger.info(f"Cached dataset '{dataset.name}' to {data_path}")
    return data_path, splits_path


def load_dataset(directory: str | os.PathLike, name: str) -> Dataset:
    data_path = Path(directory) / f"{name}.csv"
    splits_path = Path(directory) / f"{name}.splits.csv"
    if not data_path.exists() or not splits_path.exists():
        raise DataError(f"no cached dataset '{name}' in {directory}")
    frame = pd.read_csv(data_path)
    splits = pd.read_csv(splits_path)
    labels = [c for c in frame.columns if c.startswith(LABEL_PREFIX) and c[len(LABEL_PREFIX) :].isdigit()]
    if "sequence" in frame.columns:
        features = [c for c in frame.columns if c not in labels and c not in ("sequence", "timestep")]
        sequences = []
        tags = []
        for _, part in frame.groupby("sequence", sort=True):
            part = part.sort_values("timestep")
            sequences.append((part[features].to_numpy(), part[labels].to_numpy()))
            tags.append(splits.loc[part.index[0], "split"])
        return SequenceDataset(sequences, np.array(tags), features, name=name)
    features = [c for c in frame.columns if c not in labels]
    regions = splits["region"].to_numpy() if "region" in splits.columns else None
    region_names = None
    if regions is not None and "region_name" in splits.columns:
        named = splits.drop_duplicates("region").set_index("region")["region_name"]
        region_names = [str(named.get(r, f"region-{r}")) for r in range(int(regions.max()) + 1)]
    return TabularDataset(
        frame[features].to_numpy(),
        frame[labels].to_numpy(),
        features,
        splits["split"].to_numpy(),
        regions,
        region_names,
        name=name,
    )
