from dataclasses import asdict, dataclass, field

import numpy as np
import pandas as pd

from ..errors import DataError


def auc(scores, labels) -> float:
    """Mann-Whitney AUC: P(score+ > score-) + 0.5 P(tie), with ties given midranks."""
    s = np.asarray(scores, dtype=np.float64).ravel()
    y = np.asarray(labels).ravel().astype(bool)
    if s.size != y.size:
        raise DataError(f"{s.size} scores for {y.size} labels")
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DataError("AUC needs both classes among the labels")
    ranks = pd.Series(s).rank(method="average").to_numpy()
    return float((ranks[y].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def _confusion(preds, labels) -> tuple[int, int, int, int]:
    p = np.asarray(preds).ravel().astype(bool)
    y = np.asarray(labels).ravel().astype(bool)
    if p.size != y.size:
        raise DataError(f"{p.size} predictions for {y.size} labels")
    return int((p & y).sum()), int((p & ~y).sum()), int((~p & y).sum()), int((~p & ~y).sum())


def f1(preds, labels) -> float:
    tp, fp, fn, _ = _confusion(preds, labels)
    denominator = 2 * tp + fp + fn
    return 2.0 * tp / denominator if denominator else 0.0


def accuracy(preds, labels) -> float:
    tp, fp, fn, tn = _confusion(preds, labels)
    total = tp + fp + fn + tn
    return (tp + tn) / total if total else 0.0


@dataclass
class OutputScores:
    output: int
    auc: float
    f1: float
    accuracy: float
    apl_eval: float
    fidelity: float


@dataclass
class MetricsRecord:
    """Scores for one split; summary fields are means over outputs, `outputs` keeps each one."""

    auc: float
    accuracy: float
    f1: float
    apl_eval: float
    fidelity: float
    outputs: list[OutputScores] = field(default_factory=list)

    def as_dict(self) -> dict:
        data = asdict(self)
        data.pop("outputs")
        return data


def score_outputs(
    probabilities: np.ndarray,
    labels: np.ndarray,
    apl_per_output: list[float],
    fidelity_per_output: list[float],
) -> MetricsRecord:
    """Per-output AUC, F1 and accuracy; AUC is NaN for an output whose labels hold one class."""
    probs = np.asarray(probabilities, dtype=np.float64).reshape(len(labels), -1)
    targets = np.asarray(labels).reshape(len(labels), -1)
    outputs = []
    for q in range(targets.shape[1]):
        try:
            area = auc(probs[:, q], targets[:, q])
        except DataError:
            area = float("nan")
        preds = probs[:, q] >= 0.5
        outputs.append(
            OutputScores(
                q,
                area,
                f1(preds, targets[:, q]),
                accuracy(preds, targets[:, q]),
                float(apl_per_output[q]),
                float(fidelity_per_output[q]),
            )
        )
    return MetricsRecord(
        auc=float(np.nanmean([o.auc for o in outputs])) if any(np.isfinite(o.auc) for o in outputs) else float("nan"),
        accuracy=float(np.mean([o.accuracy for o in outputs])),
        f1=float(np.mean([o.f1 for o in outputs])),
        apl_eval=float(np.sum([o.apl_eval for o in outputs])),
        fidelity=float(np.mean([o.fidelity for o in outputs])),
        outputs=outputs,
    )
