from ..errors import ConfigError
from .base import TargetModel
from .gru import GruModel
from .gru_hmm import GruHmmModel
from .hmm import HmmModel
from .mlp import MlpModel


def create_model(
    family: str,
    input_dim: int,
    n_outputs: int,
    seed: int,
    hidden_sizes: list[int] | tuple[int, ...] = (100, 100),
    activation: str = "leaky-relu",
    state_dim: int = 25,
    n_states: int = 5,
    emission: str = "bernoulli",
    belief_mode: str = "filter",
    likelihood_weight: float = 0.0,
    tree_features: str = "inputs+beliefs",
) -> TargetModel:
    """Freshly initialized model of the named family; unused size arguments are ignored."""
    if family == "mlp":
        return MlpModel.create([input_dim, *hidden_sizes, n_outputs], seed=seed, activation=activation)
    if family == "gru":
        return GruModel.create(input_dim, state_dim, n_outputs, seed=seed)
    if family == "hmm":
        return HmmModel.create(
            n_states,
            input_dim,
            n_outputs,
            seed=seed,
            emission=emission,
            belief_mode=belief_mode,
            likelihood_weight=likelihood_weight,
        )
    if family == "gru-hmm":
        return GruHmmModel.create(
            input_dim,
            n_states,
            state_dim,
            n_outputs,
            seed=seed,
            emission=emission,
            tree_features=tree_features,
            likelihood_weight=likelihood_weight,
        )
    raise ConfigError(f"unknown model family '{family}'")
