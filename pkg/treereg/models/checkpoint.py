import json
import logging
import os
from pathlib import Path

import numpy as np

from ..diffcore import ParamVector
from ..errors import ModelError
from .base import TargetModel
from .gru import GruModel
from .gru_hmm import GruHmmModel
from .hmm import HmmModel
from .mlp import MlpModel

FAMILIES: dict[str, type[TargetModel]] = {
    cls.family: cls for cls in (MlpModel, GruModel, HmmModel, GruHmmModel)
}

logger = logging.getLogger("Checkpoint")


def save_checkpoint(model: TargetModel, path: str | os.PathLike, **extra) -> Path:
    """Write family, shape metadata and the flat parameter array to one .npz file."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    meta = {**model.describe(), **extra}
    segments = [[name, list(shape)] for name, shape in model.params.segments]
    with open(target, "wb") as f:
        np.savez(
            f,
            family=np.array(model.family),
            meta=np.array(json.dumps(meta, sort_keys=True)),
            segments=np.array(json.dumps(segments)),
            values=model.params.values,
        )
    logger.debug(f"Saved {model.family} checkpoint ({model.params.size} parameters) to {target}")
    return target


def load_checkpoint(path: str | os.PathLike) -> TargetModel:
    source = Path(path)
    if not source.exists():
        raise ModelError(f"checkpoint not found: {source}")
    with np.load(source, allow_pickle=False) as archive:
        family = str(archive["family"])
        meta = json.loads(str(archive["meta"]))
        segments = [(name, (int(r), int(c))) for name, (r, c) in json.loads(str(archive["segments"]))]
        values = np.array(archive["values"], dtype=np.float64)
    if family not in FAMILIES:
        raise ModelError(f"unknown model family '{family}' in {source}")
    return FAMILIES[family].from_description(meta, ParamVector(segments, values))
