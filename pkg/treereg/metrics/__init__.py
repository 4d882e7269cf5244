from .scores import MetricsRecord, OutputScores, accuracy, auc, f1, score_outputs
from .stability import StabilityReport, same_structure, tree_stability

__all__ = [
    "MetricsRecord",
    "OutputScores",
    "StabilityReport",
    "accuracy",
    "auc",
    "f1",
    "same_structure",
    "score_outputs",
    "tree_stability",
]
