import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from sklearn.metrics import accuracy_score, f1_score, roc_auc_score

from treereg.dtree import DecisionTree, TreeNode
from treereg.errors import DataError
from treereg.metrics import accuracy, auc, f1, same_structure, score_outputs, tree_stability

binary_pairs = st.integers(2, 30).flatmap(
    lambda n: st.tuples(st.lists(st.integers(0, 1), min_size=n, max_size=n), st.lists(st.integers(0, 1), min_size=n, max_size=n))
)


def test_auc_example():
    assert auc([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1]) == pytest.approx(0.75)


def test_auc_counts_ties_as_half():
    assert auc([0.5, 0.5], [0, 1]) == pytest.approx(0.5)


@given(st.lists(st.floats(0, 1), min_size=2, max_size=40), st.randoms())
def test_auc_matches_sklearn_and_ignores_monotone_transforms(scores, random):
    labels = [random.randint(0, 1) for _ in scores]
    assume(0 < sum(labels) < len(labels))
    value = auc(scores, labels)
    assert value == pytest.approx(roc_auc_score(labels, scores))
    assert auc([8.0 * s for s in scores], labels) == pytest.approx(value)


def test_auc_needs_both_classes():
    with pytest.raises(DataError):
        auc([0.1, 0.2], [1, 1])
    with pytest.raises(DataError):
        auc([0.1], [1, 0])


def test_f1_example():
    # TP=2, FP=1, FN=1
    assert f1([1, 1, 1, 0, 0], [1, 1, 0, 1, 0]) == pytest.approx(2 / 3)
    assert f1([0, 0], [0, 0]) == 0.0


@given(binary_pairs)
def test_f1_and_accuracy_match_sklearn(pair):
    preds, labels = pair
    assert accuracy(preds, labels) == pytest.approx(accuracy_score(labels, preds))
    assert f1(preds, labels) == pytest.approx(f1_score(labels, preds, zero_division=0.0))


def test_score_outputs_summarizes_each_output():
    probs = np.array([[0.9, 0.2], [0.2, 0.7], [0.6, 0.1], [0.3, 0.8]])
    labels = np.array([[1, 0], [0, 1], [1, 0], [0, 0]])
    record = score_outputs(probs, labels, [1.5, 2.0], [1.0, 0.5])
    assert [o.output for o in record.outputs] == [0, 1]
    assert record.outputs[0].auc == 1.0 and record.outputs[0].accuracy == 1.0
    assert record.outputs[1].accuracy == 0.75
    assert record.apl_eval == pytest.approx(3.5)
    assert record.fidelity == pytest.approx(0.75)
    assert record.accuracy == pytest.approx(0.875)
    assert set(record.as_dict()) == {"auc", "accuracy", "f1", "apl_eval", "fidelity"}


def test_single_class_output_gets_nan_auc():
    record = score_outputs(np.array([[0.2], [0.4]]), np.array([[0], [0]]), [0.0], [1.0])
    assert math.isnan(record.auc)
    assert record.accuracy == 1.0


def _stump(feature, threshold):
    return DecisionTree(TreeNode((5, 5), feature, threshold, TreeNode((5, 0)), TreeNode((0, 5))), h=1, n_features=2)


def test_same_structure_ignores_leaf_contents_and_tiny_threshold_drift():
    a, b = _stump(0, 0.5), _stump(0, 0.5 + 1e-9)
    b.root.left = TreeNode((2, 3))
    assert same_structure(a.root, b.root)
    assert not same_structure(a.root, _stump(1, 0.5).root)
    assert not same_structure(a.root, _stump(0, 0.6).root)
    assert not same_structure(a.root, TreeNode((5, 5)))


def test_tree_stability_reports_modal_group():
    trees = [_stump(0, 0.5), _stump(0, 0.5), _stump(1, 0.5), _stump(0, 0.5), DecisionTree(TreeNode((3, 1)), 1, 2)]
    report = tree_stability(trees)
    assert (report.modal_count, report.distinct_shapes, report.n_trees) == (3, 3, 5)
    with pytest.raises(DataError):
        tree_stability(trees[:1])
