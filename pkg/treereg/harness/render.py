import os
from collections.abc import Callable
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw

from ..data import Dataset, TabularDataset
from ..errors import DataError
from ..models import TabularBatch, TargetModel
from .constants import BOUNDARY_MARGIN, BOUNDARY_RESOLUTION, POINT_RADIUS

NEGATIVE_SHADE = np.array([244, 204, 204], dtype=np.float64)
POSITIVE_SHADE = np.array([207, 226, 243], dtype=np.float64)
POINT_COLORS = {0: (153, 0, 0), 1: (11, 83, 148)}


def render_boundary(
    predict: Callable[[np.ndarray], np.ndarray],
    X: np.ndarray,
    labels: np.ndarray,
    path: str | os.PathLike,
    resolution: int = BOUNDARY_RESOLUTION,
) -> Path:
    """Shade P(y=1) over the bounding box of 2-D inputs and overlay the labelled points."""
    points = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if points.shape[1] != 2:
        raise DataError(f"decision boundaries need 2-D inputs, got {points.shape[1]} features")
    low = points.min(axis=0)
    high = points.max(axis=0)
    pad = BOUNDARY_MARGIN * np.maximum(high - low, 1e-12)
    low, high = low - pad, high + pad

    xs = np.linspace(low[0], high[0], resolution)
    ys = np.linspace(high[1], low[1], resolution)
    grid = np.array([[x, y] for y in ys for x in xs])
    p = np.clip(np.asarray(predict(grid), dtype=np.float64).reshape(len(grid), -1)[:, 0], 0.0, 1.0)
    shade = (1.0 - p)[:, None] * NEGATIVE_SHADE + p[:, None] * POSITIVE_SHADE
    image = Image.fromarray(shade.reshape(resolution, resolution, 3).astype(np.uint8))

    draw = ImageDraw.Draw(image)
    scale = (resolution - 1) / (high - low)
    for (x, y), label in zip(points, np.asarray(labels).reshape(len(points), -1)[:, 0]):
        cx = (x - low[0]) * scale[0]
        cy = (high[1] - y) * scale[1]
        box = [cx - POINT_RADIUS, cy - POINT_RADIUS, cx + POINT_RADIUS, cy + POINT_RADIUS]
        draw.ellipse(box, fill=POINT_COLORS[int(label >= 0.5)])

    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    image.save(target)
    return target


def render_model_boundaries(model: TargetModel, dataset: Dataset, directory: str | os.PathLike) -> dict[str, str]:
    """One boundary image per output for 2-D tabular datasets; nothing for anything else."""
    if not isinstance(dataset, TabularDataset) or dataset.input_dim != 2:
        return {}
    train = dataset.batch("train")
    images = {}
    for q in range(dataset.n_outputs):
        path = render_boundary(
            lambda X, q=q: model.predict_proba(TabularBatch(X))[:, q],
            train.X,
            train.y[:, q],
            Path(directory) / f"output-{q}.png",
        )
        images[f"boundary-{q}"] = str(path)
    return images
