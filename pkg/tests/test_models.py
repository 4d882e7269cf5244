import itertools

import numpy as np
import pytest
import torch
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from treereg.diffcore import check_gradients, constant
from treereg.errors import ConfigError, ModelError, ShapeError, TrainingDiverged
from treereg.models import (
    GruHmmModel,
    GruModel,
    HmmModel,
    MlpModel,
    SequenceBatch,
    TabularBatch,
    binary_cross_entropy,
    create_model,
    gru_step,
    hmm_filter,
    load_checkpoint,
    loss_terms,
    mlp_predict,
    model_loss,
    save_checkpoint,
    threshold,
    train_steps,
)


def _sequences(rng, n=3, t=4, p=2, padded=False):
    X = (rng.random((n, t, p)) > 0.5).astype(float)
    y = (rng.random((n, t, 1)) > 0.5).astype(float)
    mask = np.ones((n, t), dtype=bool)
    if padded:
        mask[0, -2:] = False
    return SequenceBatch(X, y, mask)


def _models(rng):
    return {
        "mlp": (MlpModel.create([2, 5, 4, 1], seed=1), TabularBatch(rng.normal(size=(7, 2)), rng.random((7, 1)) > 0.5)),
        "mlp-tanh": (MlpModel.create([2, 3, 2], seed=2, activation="tanh"), TabularBatch(rng.normal(size=(5, 2)), rng.random((5, 2)) > 0.5)),
        "gru": (GruModel.create(2, 3, seed=3), _sequences(rng, padded=True)),
        "hmm": (HmmModel.create(3, 2, seed=4), _sequences(rng)),
        "hmm-gaussian-smooth": (
            HmmModel.create(2, 2, seed=5, emission="gaussian", belief_mode="smooth", likelihood_weight=0.5),
            SequenceBatch(rng.normal(size=(2, 3, 2)), rng.random((2, 3, 1)) > 0.5),
        ),
        "gru-hmm": (GruHmmModel.create(2, 2, 3, seed=6, likelihood_weight=0.1), _sequences(rng, padded=True)),
    }


@pytest.mark.parametrize(
    "name", ["mlp", "mlp-tanh", "gru", "hmm", "hmm-gaussian-smooth", "gru-hmm"]
)
def test_every_family_passes_gradient_check(name, rng):
    model, batch = _models(rng)[name]
    leaves = model.params.leaves()
    report = check_gradients(lambda: model_loss(model, batch, 0.0, None, leaves), list(leaves.values()))
    assert report.ok, report


def test_mlp_forward_matches_torch(rng):
    model = MlpModel.create([3, 4, 2], seed=0)
    x = rng.normal(size=(5, 3))
    arrays = model.params.unflatten()
    t = torch.tensor(x)
    hidden = torch.nn.functional.leaky_relu(t @ torch.tensor(arrays["W0"]) + torch.tensor(arrays["b0"]), 0.01)
    expected = torch.sigmoid(hidden @ torch.tensor(arrays["W1"]) + torch.tensor(arrays["b1"]))
    np.testing.assert_allclose(mlp_predict(model, x), expected.numpy(), rtol=1e-10)
    assert mlp_predict(model, x[0]).shape == (1, 2)


def test_gru_step_matches_numpy_reference(rng):
    model = GruModel.create(2, 3, seed=0)
    a = model.params.unflatten()
    x, h = rng.normal(size=(4, 2)), rng.normal(size=(4, 3))

    def sig(v):
        return 1.0 / (1.0 + np.exp(-v))

    z = sig(x @ a["V_z"].T + h @ a["U_z"].T + a["b_z"])
    r = sig(x @ a["V_r"].T + h @ a["U_r"].T + a["b_r"])
    candidate = np.tanh(x @ a["V_h"].T + (r * h) @ a["U_h"].T + a["b_h"])
    np.testing.assert_allclose(gru_step(model, x, h), (1 - z) * h + z * candidate, rtol=1e-10)


def test_gru_step_rejects_wrong_widths():
    model = GruModel.create(2, 3)
    with pytest.raises(ShapeError):
        gru_step(model, np.zeros(3), np.zeros(3))
    with pytest.raises(ShapeError):
        gru_step(model, np.zeros(2), np.zeros(2))


@settings(max_examples=30, deadline=None)
@given(
    arrays(np.float64, (12, 2), elements=st.floats(-10, 10)),
    st.integers(0, 1000),
)
def test_gru_state_stays_within_unit_box(inputs, seed):
    model = GruModel.create(2, 3, seed=seed)
    h = np.zeros((1, 3))
    for x in inputs:
        h = gru_step(model, x, h)
        assert np.all(np.isfinite(h))
        # closed bound; tanh saturates to exactly 1.0 in float64
        assert np.abs(h).max() <= 1.0


@settings(max_examples=20, deadline=None)
@given(
    arrays(np.float64, (3, 2), elements=st.floats(-1, 1)),
    st.integers(0, 1000),
)
def test_gru_state_is_strictly_inside_unit_box_for_moderate_inputs(inputs, seed):
    model = GruModel.create(2, 3, seed=seed)
    h = np.zeros((1, 3))
    for x in inputs:
        h = gru_step(model, x, h)
        assert np.abs(h).max() < 1.0


def _brute_force_filter(model: HmmModel, x: np.ndarray) -> np.ndarray:
    arrays = model.params.unflatten()
    prior = np.exp(arrays["prior"][0]) / np.exp(arrays["prior"][0]).sum()
    transition = np.exp(arrays["transition"])
    transition /= transition.sum(axis=1, keepdims=True)
    on = 1.0 / (1.0 + np.exp(-arrays["emit"]))
    emission = np.array([[np.prod(np.where(row > 0.5, on[k], 1.0 - on[k])) for k in range(model.n_states)] for row in x])

    T, K = len(x), model.n_states
    beliefs = np.zeros((T, K))
    for t in range(T):
        for path in itertools.product(range(K), repeat=t + 2):
            weight = prior[path[0]]
            for step in range(1, t + 2):
                weight *= transition[path[step - 1], path[step]] * emission[step - 1, path[step]]
            beliefs[t, path[-1]] += weight
        beliefs[t] /= beliefs[t].sum()
    return beliefs


def test_hmm_filter_matches_path_enumeration(rng):
    model = HmmModel.create(3, 2, seed=7)
    x = (rng.random((4, 2)) > 0.5).astype(float)
    beliefs = hmm_filter(model, x)
    assert beliefs.shape == (4, 3)
    np.testing.assert_allclose(beliefs, _brute_force_filter(model, x), rtol=1e-9)


def test_hmm_smoothed_beliefs_end_at_filtered_belief(rng):
    smooth = HmmModel.create(2, 2, seed=8, belief_mode="smooth")
    x = (rng.random((5, 2)) > 0.5).astype(float)
    smoothed = smooth.belief_matrix(SequenceBatch(x[None]))
    filtered = hmm_filter(smooth, x)
    np.testing.assert_allclose(smoothed.sum(axis=1), 1.0)
    np.testing.assert_allclose(smoothed[-1], filtered[-1])


def test_padded_timesteps_carry_state_and_are_masked(rng):
    batch = _sequences(rng, n=2, t=4, padded=True)
    model = GruModel.create(2, 3, seed=0)
    probs = model.predict_proba(batch)
    assert probs.shape == (8, 1)
    rows = batch.row_mask()
    assert rows.sum() == 6
    # time-major rows: sequence 0 at t=2 and t=3 repeat its t=1 prediction
    np.testing.assert_allclose(probs[4], probs[2])
    np.testing.assert_allclose(probs[6], probs[2])


def test_sequence_models_regularize_only_their_output_heads():
    gru, hmm = GruModel.create(2, 3, seed=0), HmmModel.create(3, 2, seed=0)
    assert gru.regularized_names() == ["w", "c"]
    assert gru.regularized_params().size == 3 + 1
    assert hmm.regularized_names() == ["w"]
    assert hmm.regularized_params().size == 3


def test_gru_hmm_regularizes_only_gru_head():
    model = GruHmmModel.create(2, 3, 4, seed=0)
    assert model.regularized_names() == ["gru.w", "gru.c"]
    assert model.regularized_params().size == 5
    with pytest.raises(ModelError):
        model.forward(model.params.constants(), TabularBatch(np.zeros((2, 2))))


def test_gru_hmm_tree_features_append_beliefs(rng):
    batch = _sequences(rng, n=2, t=3, padded=True)
    both = GruHmmModel.create(2, 3, 4, seed=0)
    inputs_only = GruHmmModel.create(2, 3, 4, seed=0, tree_features="inputs")
    assert both.tree_features(batch).shape == (4, 5)
    assert inputs_only.tree_features(batch).shape == (4, 2)


@pytest.mark.parametrize("emission", ["bernoulli", "gaussian"])
def test_gru_hmm_with_silent_gru_head_predicts_like_its_hmm(emission, rng):
    model = GruHmmModel.create(2, 3, 4, seed=2, emission=emission)
    silent = model.with_regularized(np.zeros(model.regularized_params().size))
    batch = _sequences(rng, n=3, t=5, padded=True)
    np.testing.assert_allclose(silent.predict_proba(batch), silent.hmm.predict_proba(batch), rtol=0, atol=1e-12)
    assert not np.allclose(model.predict_proba(batch), silent.predict_proba(batch))


@pytest.mark.parametrize("family", ["mlp", "gru", "hmm", "gru-hmm"])
def test_checkpoint_round_trip_preserves_predictions(family, tmp_path, rng):
    model = create_model(family, input_dim=2, n_outputs=1, seed=3, hidden_sizes=[4], state_dim=3, n_states=2)
    batch = TabularBatch(rng.normal(size=(4, 2))) if family == "mlp" else _sequences(rng)
    path = save_checkpoint(model, tmp_path / "model.npz", epoch=12)
    restored = load_checkpoint(path)
    assert type(restored) is type(model)
    np.testing.assert_array_equal(restored.params.values, model.params.values)
    np.testing.assert_allclose(restored.predict_proba(batch), model.predict_proba(batch))


def test_load_checkpoint_missing_file(tmp_path):
    with pytest.raises(ModelError, match="not found"):
        load_checkpoint(tmp_path / "absent.npz")


def test_create_model_rejects_unknown_family():
    with pytest.raises(ConfigError):
        create_model("transformer", 2, 1, 0)


def test_with_regularized_replaces_only_the_subset():
    model = GruModel.create(2, 3, seed=0)
    theta = np.arange(model.regularized_params().size, dtype=float)
    updated = model.with_regularized(theta)
    np.testing.assert_array_equal(updated.regularized_params().values, theta)
    np.testing.assert_array_equal(updated.params.unflatten()["V_z"], model.params.unflatten()["V_z"])


def test_binary_cross_entropy_value_and_shape_check():
    probs = constant([[0.8], [0.4]])
    loss = binary_cross_entropy(probs, np.array([[1.0], [0.0]]))
    assert loss.item() == pytest.approx(-(np.log(0.8) + np.log(0.6)) / 2)
    with pytest.raises(ShapeError):
        binary_cross_entropy(probs, np.ones((2, 2)))


def test_loss_rejects_negative_lambda(rng):
    model, batch = _models(rng)["mlp"]
    with pytest.raises(ConfigError):
        loss_terms(model, batch, -1.0, None)


def test_threshold_uses_half_inclusive():
    np.testing.assert_array_equal(threshold(np.array([[0.49], [0.5], [0.9]])), [[0], [1], [1]])


def test_training_reduces_loss_on_separable_data(rng):
    X = rng.normal(size=(64, 2))
    batch = TabularBatch(X, (X[:, 0] > 0).astype(float))
    model = MlpModel.create([2, 8, 1], seed=0)
    before = model_loss(model, batch, 0.0, None).item()
    steps = list(train_steps(model, batch, epochs=30, batch_size=16, learning_rate=1e-2))
    assert len(steps) == 30 * 4
    assert sum(s.end_of_epoch for s in steps) == 30
    assert model_loss(model, batch, 0.0, None).item() < before


class _ExplodingPenalty:
    def penalty(self, model, leaves):
        return constant([[1e308]])


def test_training_raises_when_loss_diverges(rng):
    model, batch = _models(rng)["mlp"]
    with pytest.raises(TrainingDiverged):
        next(train_steps(model, batch, epochs=1, batch_size=0, lam=10.0, regularizer=_ExplodingPenalty()))
