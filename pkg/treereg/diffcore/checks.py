from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from .graph import Matrix, Node, backward


@dataclass
class GradCheckReport:
    max_abs_error: float
    max_rel_error: float
    ok: bool


def numeric_gradient(build: Callable[[], Node], leaf: Node, step: float = 1e-5) -> Matrix:
    """Central finite differences of the scalar returned by `build` with respect to `leaf`."""
    grad = np.zeros_like(leaf.value)
    it = np.nditer(leaf.value, flags=["multi_index"])
    for _ in it:
        index = it.multi_index
        original = leaf.value[index]
        leaf.value[index] = original + step
        upper = build().item()
        leaf.value[index] = original - step
        lower = build().item()
        leaf.value[index] = original
        grad[index] = (upper - lower) / (2.0 * step)
    return grad


def check_gradients(
    build: Callable[[], Node],
    leaves: Sequence[Node],
    step: float = 1e-5,
    rtol: float = 1e-4,
    atol: float = 1e-6,
) -> GradCheckReport:
    grads = backward(build())
    analytic = [np.array(grads.get(leaf, np.zeros_like(leaf.value))) for leaf in leaves]
    max_abs = 0.0
    max_rel = 0.0
    ok = True
    for leaf, exact in zip(leaves, analytic):
        approx = numeric_gradient(build, leaf, step)
        diff = np.abs(exact - approx)
        scale = np.maximum(np.abs(exact), np.abs(approx))
        max_abs = max(max_abs, float(diff.max(initial=0.0)))
        rel = diff / np.where(scale > 0, scale, 1.0)
        max_rel = max(max_rel, float(rel.max(initial=0.0)))
        ok = ok and bool(np.all(diff <= atol + rtol * scale))
    return GradCheckReport(max_abs, max_rel, ok)
