from .apl import apl, fidelity, fit_apl_tree
from .export import export_dot, load_tree, write_tree
from .prune import prune_tree
from .tree import DecisionTree, TreeNode, gini_gain, path_length, train_tree

__all__ = [
    "DecisionTree",
    "TreeNode",
    "apl",
    "export_dot",
    "fidelity",
    "fit_apl_tree",
    "gini_gain",
    "load_tree",
    "path_length",
    "prune_tree",
    "train_tree",
    "write_tree",
]
