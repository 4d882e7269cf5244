from .cache import load_dataset, save_dataset
from .csv_loader import WINE_SCHEMA, CsvSchema, load_csv, load_schema
from .kmeans import KMeansFit, kmeans, kmeans_regions
from .synthetic import (
    gen_five_rectangles,
    gen_parabola,
    gen_signal_noise_hmm,
    gen_two_region,
    parabola_label,
    rectangle_regions,
    rectangles_label,
    signal_noise_specs,
    two_region_label,
)
from .types import SPLITS, Dataset, HmmSpec, SequenceDataset, TabularDataset

__all__ = [
    "SPLITS",
    "WINE_SCHEMA",
    "CsvSchema",
    "Dataset",
    "HmmSpec",
    "KMeansFit",
    "SequenceDataset",
    "TabularDataset",
    "gen_five_rectangles",
    "gen_parabola",
    "gen_signal_noise_hmm",
    "gen_two_region",
    "kmeans",
    "kmeans_regions",
    "load_csv",
    "load_dataset",
    "load_schema",
    "parabola_label",
    "rectangle_regions",
    "rectangles_label",
    "save_dataset",
    "signal_noise_specs",
    "two_region_label",
]
