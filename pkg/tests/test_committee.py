"""
委员会测试：准入、重要性排名、F1 加权投票、完整流程
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.core.config import DEFAULT_CONCENTRATION_RANGES
from src.core.errors import AdmissionError, DegenerateDataError, ParameterError, ShapeError
from src.core.models import CommitteePolicy, ModelKind, ModelScorecard
from src.committee import (
    CommitteeRunner,
    admit,
    rank_by_importance,
    run_committee,
    selection_diagnostics,
    weighted_vote,
)
from src.data.synthesis import factorial_mixtures, planted_sensitivity, synth_dataset
from src.modes import build_modes, evaluate_modes

PLANTED_INFORMATIVE = [1, 4, 6]

SENSORS = ["s1", "s2", "s3"]


def _card(f1: float) -> ModelScorecard:
    return ModelScorecard(
        accuracy=f1, macro_precision=f1, macro_recall=f1, macro_f1=f1,
        micro_precision=f1, micro_recall=f1, micro_f1=f1,
    )


class TestWeightedVote:
    def test_two_model_hand_arithmetic(self):
        ranking = weighted_vote(
            {"RF": ["s1", "s2", "s3"], "XGB": ["s2", "s1", "s3"]},
            {"RF": 0.8, "XGB": 0.6},
            K=3,
            sensor_ids=SENSORS,
        )
        scores = [ranking.weighted_scores[s] for s in SENSORS]
        np.testing.assert_allclose(scores, [3.6 / 8.4, 3.4 / 8.4, 1.4 / 8.4])
        np.testing.assert_allclose(scores, [0.4286, 0.4048, 0.1667], atol=1e-4)
        assert ranking.selected == ["s1", "s2", "s3"]

    def test_single_model(self):
        ranking = weighted_vote({"DT": SENSORS}, {"DT": 1.0}, K=5)
        np.testing.assert_allclose([ranking.weighted_scores[s] for s in SENSORS], [5 / 12, 4 / 12, 3 / 12])

    def test_unranked_sensor_scores_zero(self):
        ranking = weighted_vote({"DT": ["s2"]}, {"DT": 0.9}, K=1, sensor_ids=SENSORS)
        assert ranking.weighted_scores == {"s1": 0.0, "s2": 1.0, "s3": 0.0}
        # 平票按列顺序
        assert ranking.selected == ["s2", "s1", "s3"]

    def test_zero_weights(self):
        with pytest.raises(DegenerateDataError):
            weighted_vote({"DT": SENSORS}, {"DT": 0.0}, K=3)

    def test_rank_list_longer_than_k(self):
        with pytest.raises(ParameterError):
            weighted_vote({"DT": SENSORS}, {"DT": 1.0}, K=2)

    def test_missing_weight(self):
        with pytest.raises(ShapeError):
            weighted_vote({"DT": SENSORS, "RF": SENSORS}, {"DT": 1.0}, K=3)

    def test_unknown_sensor(self):
        with pytest.raises(ShapeError):
            weighted_vote({"DT": ["s9"]}, {"DT": 1.0}, K=1, sensor_ids=SENSORS)

    @settings(max_examples=1000, deadline=None)
    @given(data=st.data())
    def test_scores_sum_to_one(self, data):
        n = data.draw(st.integers(min_value=2, max_value=12))
        ids = [f"S{i + 1}" for i in range(n)]
        K = data.draw(st.integers(min_value=1, max_value=n))
        n_models = data.draw(st.integers(min_value=1, max_value=5))
        ranks, weights = {}, {}
        for j in range(n_models):
            ranks[f"m{j}"] = data.draw(st.permutations(ids))[:K]
            weights[f"m{j}"] = data.draw(st.floats(min_value=0.01, max_value=1.0))
        ranking = weighted_vote(ranks, weights, K, sensor_ids=ids)
        assert sum(ranking.weighted_scores.values()) == pytest.approx(1.0, abs=1e-9)
        assert sorted(ranking.selected) == sorted(ids)

    @settings(max_examples=100, deadline=None)
    @given(factor=st.floats(min_value=0.05, max_value=1.0))
    def test_invariant_to_common_f1_scale(self, factor):
        ranks = {"RF": ["s1", "s2", "s3"], "XGB": ["s2", "s1", "s3"]}
        base = weighted_vote(ranks, {"RF": 0.8, "XGB": 0.6}, K=3)
        scaled = weighted_vote(ranks, {"RF": 0.8 * factor, "XGB": 0.6 * factor}, K=3)
        for sid in SENSORS:
            assert scaled.weighted_scores[sid] == pytest.approx(base.weighted_scores[sid])


class TestAdmission:
    def test_threshold_zero_admits_everyone(self):
        cards = {ModelKind.DT: _card(0.1), ModelKind.RF: _card(0.9)}
        assert admit(cards, CommitteePolicy(admission_threshold=0.0)) == [ModelKind.DT, ModelKind.RF]

    def test_threshold_is_inclusive(self):
        cards = {ModelKind.DT: _card(0.7), ModelKind.RF: _card(0.69)}
        assert admit(cards, CommitteePolicy(admission_threshold=0.7)) == [ModelKind.DT]

    def test_nobody_admitted(self):
        cards = {ModelKind.DT: _card(0.6), ModelKind.RF: _card(0.95)}
        with pytest.raises(AdmissionError) as info:
            admit(cards, CommitteePolicy(admission_threshold=1.0))
        assert info.value.best_kind == "RF"

    def test_gate_uses_minimum_metric(self):
        card = _card(0.9).model_copy(update={"micro_recall": 0.5})
        with pytest.raises(AdmissionError):
            admit({ModelKind.LR: card}, CommitteePolicy(admission_threshold=0.7))
        assert admit({ModelKind.LR: card}, CommitteePolicy(admission_threshold=0.7, metric="macro_f1")) == [
            ModelKind.LR
        ]


class TestRanking:
    def test_ties_keep_column_order(self):
        assert rank_by_importance([0.2, 0.4, 0.2, 0.2], ["a", "b", "c", "d"], 3) == ["b", "a", "c"]

    def test_bad_k(self):
        with pytest.raises(ParameterError):
            rank_by_importance([0.5, 0.5], ["a", "b"], 3)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            rank_by_importance([1.0], ["a", "b"], 1)

    def test_diagnostics(self):
        diag = selection_diagnostics({"RF": ["s1", "s2"], "XGB": ["s2", "s3"]}, 2, SENSORS)
        assert diag["frequency"] == {"s1": 1, "s2": 2, "s3": 1}
        assert diag["rank_counts"]["s2"] == [1, 1]


class TestCommitteeRunner:
    POLICY = CommitteePolicy(
        kinds=(ModelKind.ET, ModelKind.RF), repeats=2, rank_depth=3, admission_threshold=0.5,
    )
    OVERRIDES = {ModelKind.ET: {"n_estimators": 30}, ModelKind.RF: {"n_estimators": 30}}

    def test_planted_sensors_win(self, planted):
        outcome = CommitteeRunner(planted, self.POLICY, seed=1, model_overrides=self.OVERRIDES).run()
        expected = {planted.sensor_ids[i] for i in PLANTED_INFORMATIVE}
        assert set(outcome.ranking.top(3)) == expected
        assert outcome.admitted == [ModelKind.ET, ModelKind.RF]
        assert len(outcome.shot_scorecards[ModelKind.RF]) == 2
        assert set(outcome.diagnostics) == {"frequency", "rank_counts"}

    def test_workers_do_not_change_result(self, planted):
        a = run_committee(planted, self.POLICY, seed=4, model_overrides=self.OVERRIDES, workers=1)
        b = run_committee(planted, self.POLICY, seed=4, model_overrides=self.OVERRIDES, workers=3)
        assert a == b

    def test_rank_depth_above_sensor_count(self, blobs):
        with pytest.raises(ParameterError):
            CommitteeRunner(blobs, CommitteePolicy(rank_depth=5), seed=0)


def _full_array(seed: int):
    """17 个传感器，随机植入 5 个信息传感器"""
    informative = sorted(np.random.default_rng(seed).choice(17, size=5, replace=False).tolist())
    D = planted_sensitivity(17, 3, informative, density=0.62, seed=seed)
    mixtures = factorial_mixtures(3, DEFAULT_CONCENTRATION_RANGES, seed=seed, scale=1e-2)
    return synth_dataset(D, mixtures, repeats=6, noise_sd=0.01, seed=seed), informative


@pytest.mark.slow
class TestFullArraySweep:
    POLICY = CommitteePolicy(
        kinds=(ModelKind.ET, ModelKind.RF), repeats=1, rank_depth=5, admission_threshold=0.5,
    )
    OVERRIDES = {
        ModelKind.ET: {"n_estimators": 40},
        ModelKind.RF: {"n_estimators": 40},
        ModelKind.XGB: {"n_estimators": 15},
    }

    def test_planted_five_recovered_and_green_keeps_f1(self):
        hits, reductions = 0, []
        for seed in range(50):
            ds, informative = _full_array(seed)
            outcome = CommitteeRunner(ds, self.POLICY, seed=seed, model_overrides=self.OVERRIDES).run()
            if set(outcome.ranking.top(5)) == {ds.sensor_ids[i] for i in informative}:
                hits += 1
            report = evaluate_modes(
                build_modes(outcome.ranking, [5]), ds, repeats=2, seed=seed, overrides=self.OVERRIDES,
            )
            reductions.append(report.entry("green-5").f1_reduction_vs_blue)
        assert hits >= 45
        assert float(np.mean(reductions)) <= 0.05
