"""
命令行测试：参数校验、synth / pipeline / theory / report 输出包与退出码
"""

import json

import pandas as pd
import pytest

from src.cli import main
from src.core.config import RunConfig

SMALL_RUN = {
    "committee": {"kinds": ["ET", "RF"], "repeats": 2, "rank_depth": 4, "admission_threshold": 0.5},
    "synth": {"n_sensors": 10, "n_analytes": 3, "n_informative": 4, "repeats": 6, "concentration_scale": 0.01},
    "models": {"ET": {"n_estimators": 30}, "RF": {"n_estimators": 30}, "XGB": {"n_estimators": 10}},
    "modes": {"sizes": [4, 2, 1], "repeats": 2},
    "theory": {"trials": 50, "n_max": 8},
}


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "small.json"
    path.write_text(json.dumps(SMALL_RUN), encoding="utf-8")
    return str(path)


def _json(path):
    return json.loads(path.read_text(encoding="utf-8"))


class TestArguments:
    def test_density_out_of_range(self, tmp_path, capsys):
        with pytest.raises(SystemExit) as info:
            main(["synth", "--out", str(tmp_path), "--density", "1.5"])
        assert info.value.code == 2
        assert "--density" in capsys.readouterr().err

    def test_bad_mode_sizes(self, tmp_path):
        with pytest.raises(SystemExit) as info:
            main(["pipeline", "--out", str(tmp_path), "--mode-sizes", "5,x"])
        assert info.value.code == 2

    def test_invalid_config_value(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"committee": {"admission_threshold": 2}}', encoding="utf-8")
        assert main(["synth", "--config", str(path), "--out", str(tmp_path / "run")]) == 2

    def test_unreadable_config(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        assert main(["synth", "--config", str(path), "--out", str(tmp_path / "run")]) == 2
        assert main(["synth", "--config", str(tmp_path / "missing.json"), "--out", str(tmp_path / "run")]) == 2


class TestSynth:
    def test_writes_dataset_and_manifest(self, tmp_path, small_config):
        out = tmp_path / "run"
        assert main(["synth", "--config", small_config, "--out", str(out), "--seed", "3"]) == 0
        frame = pd.read_csv(out / "data" / "dataset.csv")
        manifest = _json(out / "data" / "manifest.json")
        assert len(frame) == 48
        assert len(manifest["informative"]) == 4
        assert manifest["rows"] == 48
        assert (out / "config.json").exists()

    def test_reproducible(self, tmp_path, small_config):
        for name in ("a", "b"):
            assert main(["synth", "--config", small_config, "--out", str(tmp_path / name), "--seed", "9"]) == 0
        for rel in ("data/dataset.csv", "data/manifest.json"):
            assert (tmp_path / "a" / rel).read_bytes() == (tmp_path / "b" / rel).read_bytes()

    def test_density_override(self, tmp_path, small_config):
        out = tmp_path / "run"
        assert main(["synth", "--config", small_config, "--out", str(out), "--density", "0.3"]) == 0
        assert _json(out / "data" / "manifest.json")["density"] == 0.3


class TestPipeline:
    @pytest.mark.slow
    def test_planted_sensors_are_selected(self, tmp_path, small_config):
        out = tmp_path / "run"
        assert main(["pipeline", "--config", small_config, "--out", str(out), "--seed", "5"]) == 0
        summary = _json(out / "summary.json")
        assert set(summary["selected"]) == set(summary["planted"])
        assert [m["name"] for m in summary["modes"]] == ["blue", "green-4", "green-2", "green-1"]
        for rel in ("timings.json", "committee/ranking.json", "committee/weighted_scores.csv",
                    "evaluation/RF_scorecard.json", "evaluation/ET_confusion.csv", "models/RF.json",
                    "modes/mode_table.csv", "theory/verdict.json", "theory/curve_mu0.62.csv"):
            assert (out / rel).exists(), rel

        (out / "modes" / "mode_table.csv").unlink()
        assert main(["report", "--out", str(out)]) == 0
        table = pd.read_csv(out / "modes" / "mode_table.csv")
        assert table["mode"].tolist() == ["blue", "green-4", "green-2", "green-1"]

    @pytest.mark.slow
    def test_summary_does_not_depend_on_workers(self, tmp_path, small_config):
        for name, workers in (("one", "1"), ("two", "2")):
            args = ["pipeline", "--config", small_config, "--out", str(tmp_path / name), "--workers", workers]
            assert main(args) == 0
        assert (tmp_path / "one" / "summary.json").read_bytes() == (tmp_path / "two" / "summary.json").read_bytes()

    def test_missing_data_fails_load_stage(self, tmp_path):
        out = tmp_path / "run"
        assert main(["pipeline", "--out", str(out), "--data", str(tmp_path / "nope.csv")]) == 1
        assert not (out / "summary.json").exists()


class TestTheoryAndReport:
    def test_one_curve_per_mu(self, tmp_path):
        out = tmp_path / "run"
        assert main(["theory", "--out", str(out), "--mu-fracs", "0.4,0.62", "--trials", "20"]) == 0
        curve = pd.read_csv(out / "theory" / "curve_mu0.4.csv")
        assert list(curve.columns) == ["n", "analytic", "mc_mean", "mc_ci_low", "mc_ci_high"]
        assert (out / "theory" / "curve_mu0.62.csv").exists()
        verdict = _json(out / "theory" / "verdict.json")
        assert [c["mu_frac"] for c in verdict["curves"]] == [0.4, 0.62]
        assert verdict["trials"] == 20

    def test_perfect_sensor_has_no_min_count(self, tmp_path):
        out = tmp_path / "run"
        assert main(["theory", "--out", str(out), "--mu-fracs", "1", "--trials", "10"]) == 0
        assert _json(out / "theory" / "verdict.json")["curves"][0]["min_sensors"] is None

    def test_bundle_records_config_and_seed(self, tmp_path):
        out = tmp_path / "run"
        assert main(["theory", "--out", str(out), "--mu-fracs", "0.5", "--trials", "10", "--seed", "17"]) == 0
        cfg = RunConfig.model_validate_json((out / "config.json").read_text(encoding="utf-8"))
        assert cfg.seed == 17
        assert list(cfg.theory.mu_fracs) == [0.5]
        assert cfg.theory.trials == 10
        assert _json(out / "theory" / "verdict.json")["seed"] == 17

    def test_report_without_summary(self, tmp_path):
        assert main(["report", "--out", str(tmp_path / "empty")]) == 2
