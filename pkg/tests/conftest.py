import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from treereg.data import gen_parabola, gen_signal_noise_hmm
from treereg.options import RunConfig

settings.register_profile("default", max_examples=50, deadline=None)
settings.register_profile(
    "fast", max_examples=10, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture(scope="session")
def parabola():
    return gen_parabola(seed=0)


@pytest.fixture(scope="session")
def signal_noise():
    return gen_signal_noise_hmm(seed=0, n=12, t=8)


@pytest.fixture
def tiny_config(tmp_path):
    """A parabola run small enough for unit tests."""
    config = RunConfig.preset("parabola")
    config.experiment.output_dir = str(tmp_path / "runs")
    config.experiment.images = False
    config.model.hidden_sizes = [8]
    config.optimizer.epochs = 3
    config.optimizer.batch_size = 128
    config.optimizer.learning_rate = 1e-2
    config.surrogate.epochs = 5
    config.surrogate.restarts = 1
    config.surrogate.retrain_period = 1
    config.surrogate.augmentation_count = 5
    config.sweep.lambdas = [0.0, 1.0]
    return config
