from .base import TargetModel, regularized_params
from .batch import Batch, SequenceBatch, TabularBatch
from .checkpoint import FAMILIES, load_checkpoint, save_checkpoint
from .factory import create_model
from .gru import GruModel, gru_step
from .gru_hmm import GruHmmModel
from .hmm import HmmModel, hmm_filter
from .loss import LossTerms, PenaltyTerm, binary_cross_entropy, loss_terms, model_loss
from .mlp import MlpModel, mlp_predict
from .training import StepResult, minibatches, train_steps
from .util import glorot_uniform, threshold

__all__ = [
    "FAMILIES",
    "Batch",
    "GruHmmModel",
    "GruModel",
    "HmmModel",
    "LossTerms",
    "MlpModel",
    "PenaltyTerm",
    "SequenceBatch",
    "StepResult",
    "TabularBatch",
    "TargetModel",
    "binary_cross_entropy",
    "create_model",
    "glorot_uniform",
    "gru_step",
    "hmm_filter",
    "load_checkpoint",
    "loss_terms",
    "minibatches",
    "mlp_predict",
    "model_loss",
    "regularized_params",
    "save_checkpoint",
    "threshold",
    "train_steps",
]
