import logging

import numpy as np
import pytest

from treereg.diffcore import ParamVector, check_gradients, parameter
from treereg.errors import DataError, InsufficientSamplesError, ShapeError
from treereg.models import MlpModel, TabularBatch
from treereg.surrogate import (
    augment_convex_hull,
    augment_random,
    create_surrogate,
    record_sample,
    restart_samples,
    retrain_surrogate,
    surrogate_predict,
    surrogate_value,
)


def test_untrained_surrogate_predicts_zero():
    state = create_surrogate(4, seed=0)
    assert surrogate_predict(state, np.ones(4)).item() == 0.0
    with pytest.raises(ShapeError):
        surrogate_predict(state, np.ones(3))


def test_buffer_keeps_step_order_and_capacity():
    state = create_surrogate(2, capacity=3)
    for step in (5, 1, 3, 4):
        record_sample(state, np.full(2, step), float(step), step)
    assert [s.step for s in state.buffer] == [3, 4, 5]
    assert all(s.true_apl >= 0 for s in state.buffer)


def test_buffer_drops_samples_older_than_window():
    state = create_surrogate(1, window=10)
    record_sample(state, [0.0], 1.0, 0)
    record_sample(state, [1.0], 1.0, 5)
    record_sample(state, [2.0], 1.0, 12)
    assert [s.step for s in state.buffer] == [5, 12]


def test_record_sample_validates_inputs():
    state = create_surrogate(2)
    with pytest.raises(ShapeError):
        record_sample(state, [1.0, 2.0, 3.0], 1.0, 0)
    with pytest.raises(DataError):
        record_sample(state, [1.0, 2.0], -0.5, 0)
    with pytest.raises(DataError):
        record_sample(state, [1.0, 2.0], float("nan"), 0)


def test_record_sample_copies_theta():
    state = create_surrogate(2)
    theta = np.array([1.0, 2.0])
    record_sample(state, theta, 1.0, 0)
    theta[0] = 99.0
    assert state.buffer[0].theta[0] == 1.0


def test_retrain_is_skipped_with_too_few_samples(caplog):
    state = create_surrogate(2)
    for step in range(9):
        record_sample(state, np.full(2, step), 1.0, step)
    before = state.net.values.copy()
    with caplog.at_level(logging.WARNING, logger="Surrogate"):
        assert retrain_surrogate(state, step=9) is None
    assert "Skipping surrogate retrain" in caplog.text
    np.testing.assert_array_equal(state.net.values, before)


def test_fit_on_constant_targets_reproduces_the_constant(rng):
    state = create_surrogate(3, seed=1, learning_rate=1e-2, epochs=400, batch_size=0, epsilon=0.0)
    thetas = rng.normal(size=(20, 3))
    for step, theta in enumerate(thetas):
        record_sample(state, theta, 2.0, step)
    report = retrain_surrogate(state, step=20)
    assert report is not None and report.buffer_size == 20
    for theta in thetas:
        assert surrogate_predict(state, theta).item() == pytest.approx(2.0, abs=0.05)


def test_fit_tracks_a_linear_apl_signal(rng):
    state = create_surrogate(2, seed=0, learning_rate=1e-2, epochs=300, batch_size=16)
    thetas = rng.uniform(-1, 1, size=(60, 2))
    for step, theta in enumerate(thetas):
        record_sample(state, theta, 3.0 + theta[0], step)
    initial = float(np.mean([(0.0 - (3.0 + t[0])) ** 2 for t in thetas]))
    report = retrain_surrogate(state, step=60)
    assert report.mean_mse < 0.1 * initial
    assert report.max_mse >= report.mean_mse
    assert state.reports == [report]


def test_surrogate_value_clamps_negative_predictions():
    state = create_surrogate(1)
    bias = state.net.subset(["b2"])
    state.net = state.net.replace(ParamVector(bias.segments, np.array([-3.0])))
    assert surrogate_value(state, [0.0]) == 0.0
    assert surrogate_predict(state, [0.0]).item() == pytest.approx(-3.0)


def test_surrogate_is_differentiable_in_theta(rng):
    state = create_surrogate(3, seed=0)
    state.net.values[:] = rng.normal(size=state.net.size)
    theta = parameter(rng.normal(size=(1, 3)))
    assert check_gradients(lambda: surrogate_predict(state, theta), [theta]).ok


def test_convex_hull_samples_stay_inside_the_buffer_hull():
    state = create_surrogate(2, seed=0)
    record_sample(state, [0.0, 0.0], 0.0, 0)
    record_sample(state, [1.0, 1.0], 2.0, 1)
    seen = []
    samples = augment_convex_hull(state, 25, lambda theta: seen.append(theta) or 1.0)
    assert len(samples) == len(seen) == len(state.augmented) == 25
    for sample in samples:
        assert sample.theta[0] == pytest.approx(sample.theta[1])
        assert 0.0 <= sample.theta[0] <= 1.0
        assert sample.true_apl == 1.0
    # augmented samples are training-only and survive window eviction
    record_sample(state, [5.0, 5.0], 1.0, 10_000)
    assert len(state.buffer) == 1 and len(state.augmented) == 25


def test_augmented_samples_are_consumed_by_retrain(rng):
    state = create_surrogate(2, seed=0, epochs=2)
    record_sample(state, rng.normal(size=2), 1.0, 0)
    augment_convex_hull(state, 12, lambda theta: 1.0)
    report = retrain_surrogate(state)
    assert report.augmented_count == 12 and report.buffer_size == 1
    assert state.augmented == []


def test_random_augmentation_perturbs_buffered_rows():
    state = create_surrogate(2, seed=0)
    record_sample(state, [10.0, -10.0], 1.0, 0)
    samples = augment_random(state, 8, 0.01, lambda theta: 0.5)
    assert len(samples) == 8
    for sample in samples:
        np.testing.assert_allclose(sample.theta, [10.0, -10.0], atol=0.1)


def test_augmentation_needs_a_buffer():
    with pytest.raises(InsufficientSamplesError):
        augment_convex_hull(create_surrogate(2), 5, lambda theta: 0.0)


def test_restarts_harvest_along_short_trajectories(rng):
    X = rng.normal(size=(32, 2))
    batch = TabularBatch(X, (X[:, 0] > 0).astype(float))
    samples = restart_samples(
        lambda seed: MlpModel.create([2, 3, 1], seed=seed),
        count=2,
        measure=lambda model: 1.5,
        batch=batch,
        epochs=2,
        batch_size=0,
        learning_rate=1e-2,
    )
    # one sample at initialization plus one per optimizer step, for each restart
    assert len(samples) == 6
    assert [s.step for s in samples] == [0, 1, 2, 0, 1, 2]
    assert not np.allclose(samples[0].theta, samples[3].theta)
