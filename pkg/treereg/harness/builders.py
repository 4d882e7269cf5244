import logging
from collections.abc import Callable
from dataclasses import replace

import numpy as np

from ..data import (
    WINE_SCHEMA,
    Dataset,
    TabularDataset,
    gen_five_rectangles,
    gen_parabola,
    gen_signal_noise_hmm,
    gen_two_region,
    kmeans_regions,
    load_csv,
    load_dataset,
    load_schema,
)
from ..errors import ConfigError
from ..models import Batch, TargetModel, create_model
from ..options import RunConfig
from ..regularize import (
    Augmentation,
    GlobalTreePenalty,
    L1Penalty,
    L2Penalty,
    Penalty,
    RegionPartition,
    RegionalTreePenalty,
    RetrainSchedule,
    TreeReference,
    load_region_map,
)
from ..surrogate import create_surrogate

logger = logging.getLogger("Harness")

BUILTIN_SCHEMAS = {"wine": WINE_SCHEMA}


def build_dataset(config: RunConfig) -> Dataset:
    data = config.data
    if data.dataset == "parabola":
        return gen_parabola(data.data_seed, band=data.parabola_band, test_fraction=data.test_fraction)
    if data.dataset == "signal_noise":
        return gen_signal_noise_hmm(data.data_seed, test_fraction=data.test_fraction)
    if data.dataset == "five_rectangles":
        return gen_five_rectangles(data.data_seed, grid=data.rectangles_grid)
    if data.dataset == "two_region":
        return gen_two_region(data.data_seed, test_fraction=data.test_fraction)
    if data.dataset == "csv":
        if data.schema_path:
            schema = load_schema(data.schema_path)
        elif config.experiment.name in BUILTIN_SCHEMAS:
            schema = replace(
                BUILTIN_SCHEMAS[config.experiment.name], seed=data.data_seed, test_fraction=data.test_fraction
            )
        else:
            raise ConfigError("a CSV dataset needs data.schema_path")
        return load_csv(data.csv_path, schema)
    if data.dataset == "cached":
        return load_dataset(data.cache_dir, data.cache_name or config.experiment.name)
    raise ConfigError(f"unknown dataset '{data.dataset}'")


def reference_inputs(batch: Batch) -> np.ndarray:
    return batch.flat_features()[batch.row_mask()]


def build_partition(config: RunConfig, dataset: Dataset) -> RegionPartition | None:
    """Regions over the training inputs, or None when the run uses none."""
    regions = config.regions
    if regions.kind == "none":
        return None
    inputs = reference_inputs(dataset.batch("train"))
    if regions.kind == "kmeans":
        return kmeans_regions(inputs, regions.k, regions.seed)
    if regions.kind == "file":
        return load_region_map(regions.region_map, inputs)
    if not isinstance(dataset, TabularDataset) or dataset.regions is None:
        raise ConfigError(f"dataset '{dataset.name}' defines no regions")
    names = dataset.region_names or [f"region-{r}" for r in range(int(dataset.regions.max()) + 1)]
    return RegionPartition(names, inputs, dataset.region_assignments("train"))


def split_partition(partition: RegionPartition | None, dataset: Dataset, split: str) -> RegionPartition:
    """The partition re-assigned over the valid rows of `split`."""
    inputs = reference_inputs(dataset.batch(split))
    if partition is None:
        return RegionPartition.single(inputs)
    if partition.n_regions > 1 and partition.centroids is None and partition.bin_edges is None:
        return partition.with_reference(inputs, dataset.region_assignments(split))
    return partition.with_reference(inputs)


def model_factory(config: RunConfig, dataset: Dataset) -> Callable[[int], TargetModel]:
    model = config.model

    def create(seed: int) -> TargetModel:
        return create_model(
            model.family,
            dataset.input_dim,
            dataset.n_outputs,
            seed,
            hidden_sizes=model.hidden_sizes,
            activation=model.activation,
            state_dim=model.state_dim,
            n_states=model.n_states,
            emission=model.emission,
            belief_mode=model.belief_mode,
            likelihood_weight=model.hmm_likelihood_weight,
            tree_features=model.tree_features,
        )

    return create


def surrogate_options(config: RunConfig) -> dict:
    s = config.surrogate
    return {
        "capacity": s.capacity,
        "window": s.window,
        "epsilon": s.epsilon,
        "learning_rate": s.learning_rate,
        "epochs": s.epochs,
        "batch_size": s.batch_size,
        "dirichlet_alpha": s.dirichlet_alpha,
    }


def build_penalty(
    config: RunConfig,
    model: TargetModel,
    batch: Batch,
    partition: RegionPartition | None,
    seed: int,
) -> Penalty:
    kind = config.regularizer.kind
    if kind == "none":
        return Penalty()
    if kind == "l1":
        return L1Penalty()
    if kind == "l2":
        return L2Penalty()

    reg = config.regularizer
    s = config.surrogate
    dim = model.regularized_params().size
    tree_options = {
        "augmentation": Augmentation(s.augmentation_count, s.random_count, s.random_scale),
        "restarts": s.restarts,
        "restart_epochs": s.restart_epochs,
        "sample_every": reg.sample_every,
    }
    schedule = RetrainSchedule(s.retrain_period, s.retrain_unit)
    if kind == "tree-global":
        reference = TreeReference(batch, reg.h, reg.prune_fraction, reg.pruned, seed=seed)
        surrogate = create_surrogate(dim, seed, **surrogate_options(config))
        return GlobalTreePenalty(reference, surrogate, schedule, **tree_options)

    if partition is None:
        raise ConfigError(f"regularizer '{kind}' needs regions (regions.kind is 'none')")
    reference = TreeReference(batch, reg.h, reg.prune_fraction, reg.pruned, partition, seed=seed)
    surrogates = [create_surrogate(dim, seed + r, **surrogate_options(config)) for r in range(partition.n_regions)]
    mode = kind.rsplit("-", 1)[1]
    logger.info(f"Regional tree penalty over {partition.n_regions} regions: {', '.join(partition.names)}")
    return RegionalTreePenalty(reference, surrogates, schedule, mode, reg.regional_normalize, **tree_options)
