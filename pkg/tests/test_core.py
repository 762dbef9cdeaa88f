"""
Core 基础设施测试：配置、种子派生、并行、输出包、阶段追踪
"""

import pytest
from pydantic import ValidationError

from src.core.bundle import BundleManager
from src.core.config import RunConfig, get_config, load_run_config
from src.core.errors import AdmissionError, CRSError, StageError
from src.core.models import CapabilityModel, ConfusionMatrix, ModelScorecard
from src.core.parallel import run_parallel
from src.core.seeding import derive_seed, make_rng
from src.observability.tracing import StageTimer, trace_span, trace_stage


def _card(**overrides) -> ModelScorecard:
    values = dict(
        accuracy=0.9, macro_precision=0.9, macro_recall=0.9, macro_f1=0.9,
        micro_precision=0.9, micro_recall=0.9, micro_f1=0.9,
    )
    values.update(overrides)
    return ModelScorecard(**values)


class TestSeeding:
    def test_same_path_same_seed(self):
        assert derive_seed(7, "split", 3) == derive_seed(7, "split", 3)

    def test_paths_are_independent(self):
        seeds = {derive_seed(7, "split", 0), derive_seed(7, "split", 1), derive_seed(7, "fit", 0, "RF"),
                 derive_seed(8, "split", 0)}
        assert len(seeds) == 4

    def test_negative_token_rejected(self):
        with pytest.raises(ValueError):
            derive_seed(1, -1)

    def test_make_rng_reproducible(self):
        a = make_rng(5, "mc", 3, 10).random(4)
        b = make_rng(5, "mc", 3, 10).random(4)
        assert (a == b).all()


class TestParallel:
    def test_order_is_preserved(self):
        tasks = [(i,) for i in range(20)]
        assert run_parallel(lambda i: i * i, tasks, workers=4) == [i * i for i in range(20)]

    def test_sequential_and_parallel_agree(self):
        def draw(i):
            return float(make_rng(3, "task", i).random())

        tasks = [(i,) for i in range(8)]
        assert run_parallel(draw, tasks, workers=1) == run_parallel(draw, tasks, workers=3)


class TestBundle:
    def test_json_round_trip(self, bundle_dir):
        bundle = BundleManager(bundle_dir)
        bundle.write_json("committee/ranking.json", {"selected": ["S1", "S2"]})
        assert bundle.read_json("committee/ranking.json") == {"selected": ["S1", "S2"]}
        assert bundle.exists("committee/ranking.json")
        assert bundle.path("committee/ranking.json").parent.name == "committee"

    def test_refuses_escape(self, bundle_dir):
        bundle = BundleManager(bundle_dir)
        with pytest.raises(ValueError):
            bundle.write_text("../outside.txt", "x")

    def test_pydantic_payload(self, bundle_dir):
        bundle = BundleManager(bundle_dir)
        bundle.write_json("card.json", _card())
        assert bundle.read_json("card.json")["macro_f1"] == 0.9


class TestConfig:
    def test_overrides_use_dotted_paths(self):
        cfg = RunConfig().with_overrides(**{"committee.admission_threshold": 0.5, "seed": 11, "out": None})
        assert cfg.committee.admission_threshold == 0.5
        assert cfg.seed == 11
        assert cfg.out == RunConfig().out

    def test_invalid_override_raises(self):
        with pytest.raises(ValidationError):
            RunConfig().with_overrides(**{"committee.admission_threshold": 1.5})

    def test_json_round_trip(self):
        cfg = RunConfig(seed=3).with_overrides(**{"modes.sizes": [4, 2], "models": {"RF": {"n_estimators": 10}}})
        again = RunConfig.model_validate_json(cfg.model_dump_json())
        assert again == cfg

    def test_env_defaults(self, monkeypatch):
        monkeypatch.setenv("CRS_WORKERS", "3")
        monkeypatch.setenv("CRS_DEFAULT_SEED", "not-a-number")
        cfg = get_config()
        assert cfg.workers == 3
        assert cfg.default_seed == 2024
        assert load_run_config().workers == 3

    def test_config_file_wins_over_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("CRS_DEFAULT_SEED", "5")
        path = tmp_path / "run.json"
        path.write_text('{"seed": 9}', encoding="utf-8")
        assert load_run_config(str(path)).seed == 9

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_run_config(str(tmp_path / "missing.json"))


class TestModels:
    def test_gate_takes_minimum(self):
        card = _card(micro_recall=0.4)
        assert card.gate() == 0.4
        assert card.gate("macro_f1") == 0.9

    def test_mean_of(self):
        mean = ModelScorecard.mean_of([_card(macro_f1=0.8), _card(macro_f1=0.6)])
        assert mean.macro_f1 == pytest.approx(0.7)

    def test_confusion_must_be_square(self):
        with pytest.raises(ValidationError):
            ConfusionMatrix(classes=["a", "b"], counts=[[1, 0]])

    def test_row_normalized_zero_row(self):
        cm = ConfusionMatrix(classes=["a", "b"], counts=[[2, 2], [0, 0]])
        assert cm.row_normalized == [[0.5, 0.5], [0.0, 0.0]]

    def test_capability_from_sensitivity(self):
        model = CapabilityModel.from_sensitivity([[1.0, 0.0], [1.0, 1.0]], sigma_frac=0.0)
        assert model.mu_frac == pytest.approx(0.75)
        assert model.m == 2


class TestErrors:
    def test_domain_errors_are_builtin_compatible(self):
        err = AdmissionError(0.7, "RF", 0.65)
        assert isinstance(err, CRSError)
        assert isinstance(err, RuntimeError)
        assert "RF" in str(err)


class TestTracing:
    def test_span_records_duration(self):
        timer = StageTimer()
        with trace_span("load", timer):
            pass
        assert "load" in timer.as_dict()

    def test_span_wraps_failure_with_stage_name(self):
        with pytest.raises(StageError) as info:
            with trace_span("committee"):
                raise ValueError("boom")
        assert info.value.stage == "committee"
        assert isinstance(info.value.cause, ValueError)

    def test_inner_stage_name_is_kept(self):
        with pytest.raises(StageError) as info:
            with trace_span("outer"):
                with trace_span("inner"):
                    raise KeyError("x")
        assert info.value.stage == "inner"

    def test_decorator(self):
        @trace_stage("theory")
        def fail():
            raise RuntimeError("nope")

        with pytest.raises(StageError, match="theory"):
            fail()
