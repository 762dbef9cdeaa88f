"""
工作模式测试：能耗、F1 降幅、模式构造与评估
"""

import numpy as np
import pytest

from src.core.errors import ParameterError, ShapeError
from src.core.models import ModelKind, SensorRanking
from src.committee import weighted_vote
from src.modes import (
    BLUE,
    build_modes,
    energy_savings,
    energy_savings_weighted,
    evaluate_mode,
    evaluate_modes,
    f1_reduction,
    green_name,
)

XGB_FAST = {ModelKind.XGB: {"n_estimators": 10}}


def _planted_ranking(ds) -> SensorRanking:
    """手工排名：信息传感器排在最前"""
    order = [ds.sensor_ids[i] for i in (1, 4, 6, 0, 2, 3, 5, 7)]
    return weighted_vote({"RF": order}, {"RF": 1.0}, K=len(order), sensor_ids=ds.sensor_ids)


class TestEnergy:
    def test_uniform_power(self):
        assert energy_savings(5, 17) == pytest.approx(0.706, abs=5e-4)
        assert energy_savings(3, 17) == pytest.approx(0.824, abs=5e-4)
        assert energy_savings(17, 17) == 0.0

    def test_fewer_sensors_save_more(self):
        values = [energy_savings(k, 17) for k in range(1, 18)]
        assert values == sorted(values, reverse=True)

    @pytest.mark.parametrize("active,total", [(0, 5), (6, 5), (1, 0)])
    def test_out_of_range(self, active, total):
        with pytest.raises(ParameterError):
            energy_savings(active, total)

    def test_weighted_power(self):
        power = {"S1": 1.0, "S2": 3.0, "S3": 4.0}
        assert energy_savings_weighted(["S2"], power) == pytest.approx(5 / 8)
        assert energy_savings_weighted(["S1", "S2", "S3"], power) == pytest.approx(0.0)

    def test_weighted_power_unknown_sensor(self):
        with pytest.raises(ShapeError):
            energy_savings_weighted(["S9"], {"S1": 1.0})

    def test_f1_reduction(self):
        assert f1_reduction(0.90, 0.84) == pytest.approx(0.06)
        assert f1_reduction(0.90, 0.77) == pytest.approx(0.13)
        assert f1_reduction(0.80, 0.85) == pytest.approx(-0.05)
        with pytest.raises(ParameterError):
            f1_reduction(1.2, 0.5)


class TestBuildModes:
    def test_blue_then_greens(self, planted):
        modes = build_modes(_planted_ranking(planted), [3, 1])
        assert [m.name for m in modes] == [BLUE, green_name(3), "green-1"]
        assert modes[0].active_sensors == list(planted.sensor_ids)
        assert modes[1].active_sensors == ["S2", "S5", "S7"]
        assert all(m.readout_model_kind == ModelKind.XGB for m in modes)

    def test_greens_are_prefixes(self, planted):
        modes = build_modes(_planted_ranking(planted), [5, 3, 2])
        actives = [m.active_sensors for m in modes[1:]]
        for longer, shorter in zip(actives, actives[1:]):
            assert longer[:len(shorter)] == shorter

    @pytest.mark.parametrize("sizes", [[0], [9], [3, 3]])
    def test_bad_sizes(self, planted, sizes):
        with pytest.raises(ParameterError):
            build_modes(_planted_ranking(planted), sizes)


class TestEvaluateModes:
    def test_report(self, planted):
        modes = build_modes(_planted_ranking(planted), [3])
        report = evaluate_modes(modes, planted, repeats=2, seed=7, overrides=XGB_FAST)
        blue = report.entry(BLUE)
        green = report.entry("green-3")
        assert report.total_sensors == 8
        assert blue.f1_reduction_vs_blue == 0.0
        assert blue.energy_savings == 0.0
        assert green.energy_savings == pytest.approx(5 / 8)
        assert green.f1_reduction_vs_blue == pytest.approx(blue.mean.macro_f1 - green.mean.macro_f1)
        assert len(green.repeats) == 2
        # 植入的三个传感器足以区分全部 8 种混合物
        assert green.mean.macro_f1 >= blue.mean.macro_f1 - 0.15

    def test_inactive_columns_do_not_matter(self, planted):
        mode = build_modes(_planted_ranking(planted), [3])[1]
        X = np.array(planted.features)
        dead = [0, 2, 3, 5, 7]
        X[:, dead] = np.random.default_rng(0).normal(0.0, 50.0, size=(planted.n_rows, len(dead)))
        a = evaluate_mode(mode, planted, repeats=2, seed=3, overrides=XGB_FAST[ModelKind.XGB])
        b = evaluate_mode(mode, planted.with_features(X), repeats=2, seed=3, overrides=XGB_FAST[ModelKind.XGB])
        assert a.repeats == b.repeats

    def test_power_figures(self, planted):
        modes = build_modes(_planted_ranking(planted), [1])
        power = {sid: 2.0 if sid == "S2" else 1.0 for sid in planted.sensor_ids}
        report = evaluate_modes(modes, planted, repeats=1, seed=0, power=power, overrides=XGB_FAST)
        assert report.entry("green-1").energy_savings == pytest.approx(1.0 - 2.0 / 9.0)

    def test_workers_do_not_change_report(self, planted):
        modes = build_modes(_planted_ranking(planted), [3, 1])
        a = evaluate_modes(modes, planted, repeats=2, seed=5, overrides=XGB_FAST, workers=1)
        b = evaluate_modes(modes, planted, repeats=2, seed=5, overrides=XGB_FAST, workers=4)
        assert a == b

    def test_missing_blue(self, planted):
        modes = build_modes(_planted_ranking(planted), [3])[1:]
        with pytest.raises(ParameterError):
            evaluate_modes(modes, planted, repeats=1, seed=0)
