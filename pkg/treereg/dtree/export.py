import json
import os
from collections.abc import Sequence
from pathlib import Path

from jinja2 import Template

from ..errors import DataError
from .constants import DOT_TEMPLATE
from .tree import DecisionTree, TreeNode

LEAF_COLORS = {0: "#f4cccc", 1: "#cfe2f3"}


def _escape(name: str) -> str:
    return name.replace("\\", "\\\\").replace('"', '\\"')


def export_dot(tree: DecisionTree, feature_names: Sequence[str], graph_name: str = "tree") -> str:
    """Render the tree as a DOT digraph; every feature used by a split must be named."""
    nodes = []
    edges = []
    counter = 0

    def visit(node: TreeNode) -> int:
        nonlocal counter
        node_id = counter
        counter += 1
        if node.is_leaf:
            nodes.append(
                {
                    "id": node_id,
                    "leaf": True,
                    "label": node.label,
                    "probability": node.probability,
                    "n_samples": node.n_samples,
                    "color": LEAF_COLORS[node.label],
                }
            )
            return node_id
        if node.feature is None or node.feature >= len(feature_names):
            raise DataError(f"no feature name for split feature index {node.feature}")
        nodes.append(
            {"id": node_id, "leaf": False, "name": _escape(feature_names[node.feature]), "threshold": node.threshold}
        )
        left = visit(node.left)  # type: ignore[arg-type]
        right = visit(node.right)  # type: ignore[arg-type]
        edges.append({"source": node_id, "target": left, "label": "yes"})
        edges.append({"source": node_id, "target": right, "label": "no"})
        return node_id

    visit(tree.root)
    with open(DOT_TEMPLATE) as file:
        return Template(file.read()).render(graph_name=_escape(graph_name), nodes=nodes, edges=edges) + "\n"


def write_tree(tree: DecisionTree, feature_names: Sequence[str], directory: str | os.PathLike, stem: str) -> Path:
    """Write `<stem>.dot` and `<stem>.json` into `directory`; returns the DOT path."""
    target = Path(directory)
    target.mkdir(parents=True, exist_ok=True)
    dot_path = target / f"{stem}.dot"
    dot_path.write_text(export_dot(tree, feature_names, graph_name=stem))
    payload = {"feature_names": list(feature_names), **tree.to_dict()}
    (target / f"{stem}.json").write_text(json.dumps(payload, indent=2))
    return dot_path


def load_tree(path: str | os.PathLike) -> DecisionTree:
    with open(path) as file:
        return DecisionTree.from_dict(json.load(file))
