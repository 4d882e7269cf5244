import numpy as np

from ..diffcore import Matrix, Node, apply
from ..errors import ShapeError


def sparsemax(omega) -> np.ndarray:
    """Euclidean projection of `omega` onto the probability simplex.

    Sort descending, find the largest support size k with 1 + k * z_k above the
    running sum, and shift by tau = (sum of the top k - 1) / k.
    """
    z = np.asarray(omega, dtype=np.float64).ravel()
    if z.size == 0:
        raise ShapeError("sparsemax", z.shape)
    # the projection is shift invariant
    z = z - z.max()
    ordered = np.sort(z)[::-1]
    cumulative = np.cumsum(ordered)
    ranks = np.arange(1, z.size + 1)
    k = int(ranks[1.0 + ranks * ordered > cumulative][-1])
    tau = (cumulative[k - 1] - 1.0) / k
    return np.maximum(z - tau, 0.0)


def sparsemax_node(omega: Node) -> Node:
    """Row-vector sparsemax with its exact Jacobian (identity on the support minus the support mean)."""
    if omega.shape[0] != 1:
        raise ShapeError("sparsemax", omega.shape)
    p = sparsemax(omega.value).reshape(1, -1)
    support = (p > 0).astype(np.float64)
    size = support.sum()

    def vjp(g: Matrix) -> tuple[Matrix]:
        return (support * (g - (support * g).sum() / size),)

    return apply("sparsemax", (omega,), p, vjp)
