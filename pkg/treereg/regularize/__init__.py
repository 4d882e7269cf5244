from .norms import l1, l2
from .penalties import (
    Augmentation,
    GlobalTreePenalty,
    L1Penalty,
    L2Penalty,
    Penalty,
    RegionalRegState,
    RegionalTreePenalty,
    RetrainSchedule,
    TrackingRow,
    global_tree_penalty,
    regional_tree_penalty,
)
from .reference import TreeReference, evaluation_apl, regional_true_apls
from .regions import RegionPartition, load_region_map, save_region_map
from .sparsemax import sparsemax, sparsemax_node

__all__ = [
    "Augmentation",
    "GlobalTreePenalty",
    "L1Penalty",
    "L2Penalty",
    "Penalty",
    "RegionPartition",
    "RegionalRegState",
    "RegionalTreePenalty",
    "RetrainSchedule",
    "TrackingRow",
    "TreeReference",
    "evaluation_apl",
    "global_tree_penalty",
    "l1",
    "l2",
    "load_region_map",
    "regional_tree_penalty",
    "regional_true_apls",
    "save_region_map",
    "sparsemax",
    "sparsemax_node",
]
