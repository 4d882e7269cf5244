from dataclasses import dataclass

from ..dtree import DecisionTree, TreeNode
from ..errors import DataError

THRESHOLD_TOLERANCE = 1e-6


@dataclass
class StabilityReport:
    modal_count: int
    distinct_shapes: int
    n_trees: int


def same_structure(a: TreeNode, b: TreeNode, tol: float = THRESHOLD_TOLERANCE) -> bool:
    """Same topology and split features, with thresholds equal up to `tol`; leaf contents are ignored."""
    if a.is_leaf or b.is_leaf:
        return a.is_leaf and b.is_leaf
    if a.feature != b.feature or abs(a.threshold - b.threshold) > tol:  # type: ignore[operator]
        return False
    return same_structure(a.left, b.left, tol) and same_structure(a.right, b.right, tol)  # type: ignore[arg-type]


def tree_stability(trees: list[DecisionTree], tol: float = THRESHOLD_TOLERANCE) -> StabilityReport:
    """Group trees by structure; reports the size of the largest group and the number of groups."""
    if len(trees) < 2:
        raise DataError("tree stability compares at least two trees")
    groups: list[list[DecisionTree]] = []
    for tree in trees:
        for group in groups:
            if same_structure(group[0].root, tree.root, tol):
                group.append(tree)
                break
        else:
            groups.append([tree])
    return StabilityReport(max(len(g) for g in groups), len(groups), len(trees))
