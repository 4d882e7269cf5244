import json

import numpy as np
import pytest
from sklearn.cluster import KMeans

from treereg.data import (
    SPLITS,
    CsvSchema,
    SequenceDataset,
    TabularDataset,
    gen_five_rectangles,
    gen_parabola,
    gen_signal_noise_hmm,
    gen_two_region,
    kmeans,
    kmeans_regions,
    load_csv,
    load_dataset,
    load_schema,
    parabola_label,
    rectangles_label,
    save_dataset,
    signal_noise_specs,
)
from treereg.errors import ConfigError, DataError

WINE_LIKE = """\
"fixed acidity";"alcohol";"color";"quality"
7.4;9.4;red;5
7.8;9.8;red;5
11.2;9.8;white;6
7.4;9.4;red;7
6.0;10.5;white;4
7.9;11.0;white;6
"""


def test_parabola_labels_follow_the_curve_outside_the_flip_band():
    dataset = gen_parabola(seed=3)
    assert dataset.X.shape == (500, 2)
    assert dataset.feature_names == ["x1", "x2"]
    assert len(dataset.rows("test")) == 150
    distance = np.abs(dataset.X[:, 1] - (5.0 * (dataset.X[:, 0] - 0.5) ** 2 + 0.4))
    clean = parabola_label(dataset.X)
    outside = distance >= 0.1
    np.testing.assert_array_equal(dataset.y[outside, 0], clean[outside])
    flipped = int((dataset.y[:, 0] != clean).sum())
    assert flipped == round(0.1 * int((~outside).sum()))


def test_generators_are_deterministic_per_seed():
    first, second, other = gen_parabola(seed=1), gen_parabola(seed=1), gen_parabola(seed=2)
    np.testing.assert_array_equal(first.X, second.X)
    np.testing.assert_array_equal(first.split, second.split)
    assert not np.array_equal(first.X, other.X)


def test_signal_noise_sequences_respect_the_generating_chains():
    dataset = gen_signal_noise_hmm(seed=0, n=40, t=20)
    assert isinstance(dataset, SequenceDataset)
    assert len(dataset.sequences) == 40
    assert dataset.input_dim == 14 and dataset.n_outputs == 1
    for (x, y), latent in zip(dataset.sequences, dataset.latents):
        assert x.shape == (20, 14)
        np.testing.assert_array_equal(y[:, 0], (latent == 0) & (x[:, 0] == 1.0))
        # the signal chain's first state never emits features 5 to 7
        assert np.all(x[latent == 0, 4:7] == 0.0)


def test_signal_noise_positive_rate_matches_stationary_distribution():
    signal, _ = signal_noise_specs()
    values, vectors = np.linalg.eig(signal.transition.T)
    stationary = np.real(vectors[:, np.argmin(np.abs(values - 1.0))])
    stationary /= stationary.sum()
    dataset = gen_signal_noise_hmm(seed=1, n=1000, t=100)
    rate = np.mean([y.mean() for _, y in dataset.sequences])
    assert rate == pytest.approx(stationary[0] * 0.5, abs=0.01)


def test_sequence_batches_are_padded_and_masked():
    x = np.ones((3, 2))
    dataset = SequenceDataset(
        [(x, np.ones(3)), (x[:2], np.zeros(2))], np.array(["train", "train"]), ["a", "b"]
    )
    batch = dataset.batch("train")
    assert batch.X.shape == (2, 3, 2)
    np.testing.assert_array_equal(batch.mask, [[True, True, True], [True, True, False]])
    with pytest.raises(DataError):
        dataset.batch("valid")
    with pytest.raises(DataError) as info:
        SequenceDataset([(x, np.ones(2))], np.array(["train"]), ["a", "b"])
    assert info.value.row == 0


def test_sequence_datasets_have_no_dataset_regions():
    x = np.ones((3, 2))
    dataset = SequenceDataset([(x, np.ones(3))], np.array(["train"]), ["a", "b"], name="toy")
    with pytest.raises(ConfigError, match="toy"):
        dataset.region_assignments("train")


def test_five_rectangles_has_noiseless_grid_test_set():
    dataset = gen_five_rectangles(seed=0, grid=20)
    train, test = dataset.rows("train"), dataset.rows("test")
    assert len(train) == 250 and len(test) == 400
    np.testing.assert_array_equal(dataset.y[test, 0], rectangles_label(dataset.X[test]))
    assert int((dataset.y[train, 0] != rectangles_label(dataset.X[train])).sum()) == round(0.05 * 250)
    assert dataset.region_names == [f"rectangle-{i}" for i in range(1, 6)]
    np.testing.assert_array_equal(dataset.regions, np.floor(dataset.X[:, 0]).clip(0, 4))
    assert sorted(np.bincount(dataset.region_assignments("test"))) == [80] * 5


def test_rectangles_label_examples():
    np.testing.assert_array_equal(rectangles_label([[0.5, 0.4], [0.5, 0.7], [3.5, 0.7], [4.5, 0.1]]), [1, 0, 1, 0])


def test_two_region_splits_at_half():
    dataset = gen_two_region(seed=0)
    np.testing.assert_array_equal(dataset.regions, (dataset.X[:, 0] >= 0.5).astype(int))
    left = dataset.X[:, 0] < 0.5
    np.testing.assert_array_equal(dataset.y[left, 0], dataset.X[left, 1] > 0.5)


def test_load_csv_binarizes_targets_and_zscores_on_train(tmp_path):
    path = tmp_path / "wine.csv"
    path.write_text(WINE_LIKE)
    schema = CsvSchema(target="quality", threshold=6, categorical=["color"], delimiter=";", test_fraction=0.34)
    dataset = load_csv(path, schema)
    assert dataset.name == "wine"
    assert dataset.feature_names == ["fixed acidity", "alcohol", "color=red", "color=white"]
    np.testing.assert_array_equal(dataset.y[:, 0], [0, 0, 1, 1, 0, 1])
    train = dataset.rows("train")
    assert len(dataset.rows("test")) == 2
    np.testing.assert_allclose(dataset.X[train, :2].mean(axis=0), 0.0, atol=1e-12)
    np.testing.assert_allclose(dataset.X[train, :2].std(axis=0), 1.0)
    np.testing.assert_array_equal(dataset.X[:, 2] + dataset.X[:, 3], 1.0)


def test_load_csv_reports_row_and_column_of_bad_cells(tmp_path):
    path = tmp_path / "broken.csv"
    path.write_text("a,b,label\n1,2,1\n3,oops,0\n")
    with pytest.raises(DataError) as info:
        load_csv(path, CsvSchema(target="label"))
    assert (info.value.row, info.value.column) == (1, "b")
    assert "oops" in str(info.value)

    path.write_text("a,b,label\n1,2,1\n3,,0\n")
    with pytest.raises(DataError, match="missing value"):
        load_csv(path, CsvSchema(target="label"))


def test_load_csv_structural_errors(tmp_path):
    with pytest.raises(DataError, match="not found"):
        load_csv(tmp_path / "absent.csv", CsvSchema(target="y"))
    empty = tmp_path / "empty.csv"
    empty.write_text("a,label\n")
    with pytest.raises(DataError):
        load_csv(empty, CsvSchema(target="label"))
    headed = tmp_path / "headed.csv"
    headed.write_text("a,b\n1,2\n")
    with pytest.raises(DataError) as info:
        load_csv(headed, CsvSchema(target="label"))
    assert info.value.column == "label"


def test_constant_training_column_maps_to_zero(tmp_path):
    path = tmp_path / "flat.csv"
    path.write_text("a,b,label\n" + "".join(f"{i},1.0,{i % 2}\n" for i in range(10)))
    dataset = load_csv(path, CsvSchema(target="label"))
    np.testing.assert_array_equal(dataset.X[:, 1], 0.0)


def test_schema_file(tmp_path):
    path = tmp_path / "schema.json"
    path.write_text(json.dumps({"target": "quality", "threshold": 6, "delimiter": ";"}))
    schema = load_schema(path)
    assert schema.target == ["quality"] and schema.threshold == 6
    path.write_text(json.dumps({"target": "quality", "colour": "red"}))
    with pytest.raises(ConfigError):
        load_schema(path)
    with pytest.raises(ConfigError):
        CsvSchema(target=[])
    with pytest.raises(ConfigError):
        CsvSchema(target="y", test_fraction=0.6, valid_fraction=0.4)


def _blobs(rng):
    centers = np.array([[0.0, 0.0], [5.0, 5.0], [0.0, 5.0]])
    return np.vstack([center + 0.3 * rng.normal(size=(40, 2)) for center in centers]), centers


def test_kmeans_recovers_separated_blobs(rng):
    X, centers = _blobs(rng)
    fit = kmeans(X, 3, seed=0)
    for center in centers:
        assert np.min(np.linalg.norm(fit.centroids - center, axis=1)) < 0.2
    assert len(set(fit.assignments.tolist())) == 3
    assert all(later <= earlier + 1e-9 for earlier, later in zip(fit.history, fit.history[1:]))

    reference = KMeans(n_clusters=3, n_init=10, random_state=0).fit(X)
    assert fit.history[-1] == pytest.approx(reference.inertia_, rel=1e-6)


def test_kmeans_rejects_bad_k(rng):
    with pytest.raises(ConfigError):
        kmeans(rng.normal(size=(3, 2)), 4)
    with pytest.raises(ConfigError):
        kmeans(rng.normal(size=(3, 2)), 0)


def test_kmeans_regions_use_training_rows(rng):
    X, _ = _blobs(rng)
    split = np.array(["train"] * 100 + ["test"] * 20)
    dataset = TabularDataset(X, np.zeros(len(X)), ["a", "b"], split)
    partition = kmeans_regions(dataset, 3, seed=0)
    assert partition.names == ["cluster-0", "cluster-1", "cluster-2"]
    assert len(partition.reference) == 100
    assert partition.assign(X[100:]).shape == (20,)


def test_cache_round_trip_keeps_tabular_regions(tmp_path):
    dataset = gen_five_rectangles(seed=0, n=30, grid=10)
    data_path, splits_path = save_dataset(dataset, tmp_path)
    assert data_path.name == "five_rectangles.csv" and splits_path.exists()
    restored = load_dataset(tmp_path, "five_rectangles")
    np.testing.assert_allclose(restored.X, dataset.X)
    np.testing.assert_array_equal(restored.y, dataset.y)
    np.testing.assert_array_equal(restored.split, dataset.split)
    np.testing.assert_array_equal(restored.regions, dataset.regions)
    assert restored.region_names == dataset.region_names


def test_cache_round_trip_keeps_sequences(tmp_path):
    dataset = gen_signal_noise_hmm(seed=0, n=5, t=4)
    save_dataset(dataset, tmp_path)
    restored = load_dataset(tmp_path, "signal_noise")
    assert isinstance(restored, SequenceDataset)
    assert restored.feature_names == dataset.feature_names
    np.testing.assert_array_equal(restored.split, dataset.split)
    for (x, y), (rx, ry) in zip(dataset.sequences, restored.sequences):
        np.testing.assert_array_equal(rx, x)
        np.testing.assert_array_equal(ry, y)


def test_missing_cache_is_a_data_error(tmp_path):
    with pytest.raises(DataError):
        load_dataset(tmp_path, "nothing")


def test_split_names():
    assert SPLITS == ("train", "valid", "test")
