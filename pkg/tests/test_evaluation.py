"""
评估层测试：混淆矩阵、宏/微平均指标、导出表
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.core.errors import ShapeError
from src.core.models import ModelKind
from src.evaluation import confusion, confusion_frame, evaluate, macro_f1, prediction_rows, score
from src.models import fit, make_params

TRUTH = ["a", "a", "b", "b", "c"]
PRED = ["a", "b", "b", "b", "c"]


class TestConfusion:
    def test_hand_counted_case(self):
        cm = confusion(TRUTH, PRED)
        assert cm.classes == ["a", "b", "c"]
        assert cm.counts == [[1, 1, 0], [0, 2, 0], [0, 0, 1]]
        assert cm.total == 5

    def test_classes_are_union(self):
        cm = confusion(["a", "a"], ["a", "z"])
        assert cm.classes == ["a", "z"]
        assert cm.counts == [[1, 1], [0, 0]]

    def test_length_mismatch(self):
        with pytest.raises(ShapeError):
            confusion(["a", "b"], ["a"])

    def test_empty(self):
        with pytest.raises(ShapeError):
            confusion([], [])


class TestScore:
    def test_hand_counted_macro_and_micro(self):
        card = score(confusion(TRUTH, PRED))
        assert card.macro_f1 == pytest.approx((2 / 3 + 4 / 5 + 1.0) / 3, abs=1e-4)
        assert card.macro_f1 == pytest.approx(0.8222, abs=1e-4)
        assert card.micro_f1 == 0.8
        assert card.accuracy == 0.8

    def test_identity_is_perfect(self):
        card = score(confusion(TRUTH, TRUTH))
        assert all(value == 1.0 for value in card.model_dump().values())

    def test_absent_class_drags_macro_down(self):
        # 'z' 只出现在预测里：precision 0/1, recall 0/0 都记 0
        card = score(confusion(["a", "a"], ["a", "z"]))
        assert card.macro_recall == pytest.approx(0.25)
        assert card.macro_precision == pytest.approx(0.5)

    def test_macro_f1_shortcut(self):
        assert macro_f1(TRUTH, PRED) == pytest.approx(0.8222, abs=1e-4)

    @settings(max_examples=1000, deadline=None)
    @given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)), min_size=1, max_size=60))
    def test_micro_equals_accuracy(self, pairs):
        truth = [f"c{t}" for t, _ in pairs]
        pred = [f"c{p}" for _, p in pairs]
        card = score(confusion(truth, pred))
        expected = np.mean([t == p for t, p in pairs])
        assert card.accuracy == pytest.approx(expected)
        assert card.micro_precision == card.micro_recall == card.micro_f1 == card.accuracy
        assert 0.0 <= card.macro_f1 <= 1.0


class TestExports:
    def test_prediction_rows(self):
        frame = prediction_rows(TRUTH, PRED)
        assert list(frame.columns) == ["row", "truth", "pred", "correct"]
        assert frame["correct"].tolist() == [True, False, True, True, True]

    def test_prediction_rows_mismatch(self):
        with pytest.raises(ShapeError):
            prediction_rows(TRUTH, PRED[:3])

    def test_confusion_frame(self):
        cm = confusion(TRUTH, PRED)
        frame = confusion_frame(cm)
        assert frame.loc["a", "b"] == 1
        assert frame.index.name == "truth"
        normalized = confusion_frame(cm, normalized=True)
        assert normalized.loc["a"].tolist() == [0.5, 0.5, 0.0]


class TestEvaluate:
    def test_separable_blobs(self, blobs):
        model = fit(ModelKind.DT, make_params(ModelKind.DT, {}, seed=0), blobs)
        cm, card = evaluate(model, blobs)
        assert card.accuracy == 1.0
        assert cm.classes == ["B", "NONE", "T"]
        assert np.trace(cm.as_array()) == blobs.n_rows
