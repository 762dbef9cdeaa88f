"""
命令实现：synth / pipeline / theory

每个命令接收一个完整的 RunConfig，所有产物写进 cfg.out 指向的输出包。

流水线阶段（每个阶段一个 trace_span，失败时异常带阶段名）：
    load → committee → evaluation → vote → modes → theory

设计亮点：
1. summary.json 只放确定性内容，耗时单独写 timings.json
2. 输出包里保存原样的 config.json，拿它重新跑可以逐字节复现
3. 合成数据时 manifest 记录植入的信息传感器，方便端到端核对
"""

import logging
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from src.committee.runner import CommitteeOutcome, CommitteeRunner
from src.core.bundle import BundleManager, to_jsonable
from src.core.config import RunConfig
from src.core.errors import CapabilityDomainError
from src.core.models import CapabilityModel, ModelScorecard, ModeReport, TheoryValidation
from src.core.seeding import make_rng
from src.data.dataset import LabeledDataset, export_csv, load_csv
from src.data.synthesis import (
    SensitivityMatrix,
    default_sensor_ids,
    factorial_mixtures,
    planted_sensitivity,
    sensor_capability,
    synth_dataset,
    synth_sensitivity,
)
from src.evaluation.metrics import confusion_frame
from src.models.persistence import save_model
from src.modes.modes import build_modes, evaluate_modes
from src.observability.tracing import StageTimer, trace_span, trace_stage
from src.theory.capability import min_sensors
from src.theory.validation import validate_green_modes
from .reports import mode_table, render_pipeline, render_theory

logger = logging.getLogger(__name__)

DATASET_FILE = "data/dataset.csv"
MANIFEST_FILE = "data/manifest.json"


# ==================== 数据 ====================

def informative_sensors(cfg: RunConfig) -> List[int]:
    """植入的信息传感器下标（升序）；n_informative 为 None 时全部传感器都有响应"""
    synth = cfg.synth
    k = synth.n_informative
    if k is None or k >= synth.n_sensors:
        return list(range(synth.n_sensors))
    rng = make_rng(cfg.synth_seed, "synth", "informative")
    return sorted(int(i) for i in rng.choice(synth.n_sensors, size=k, replace=False))


def synthesize(cfg: RunConfig) -> Tuple[LabeledDataset, Dict[str, Any]]:
    """
    按 cfg.synth 合成数据集

    Returns:
        (数据集, manifest)
    """
    synth = cfg.synth
    seed = cfg.synth_seed
    informative = informative_sensors(cfg)
    if len(informative) == synth.n_sensors:
        D = synth_sensitivity(synth.n_sensors, synth.n_analytes, synth.density, seed)
    else:
        D = planted_sensitivity(synth.n_sensors, synth.n_analytes, informative, synth.density, seed)

    mixtures = factorial_mixtures(
        synth.n_analytes, synth.concentration_ranges, seed,
        include_empty=synth.include_empty, scale=synth.concentration_scale,
    )
    ids = default_sensor_ids(synth.n_sensors)
    ds = synth_dataset(D, mixtures, synth.repeats, synth.noise_sd, seed, sensor_ids=ids)
    manifest = build_manifest(cfg, D, ids, informative, ds)
    logger.info(f"合成数据: {ds.n_rows} 行, {ds.n_sensors} 个传感器, 信息传感器 {manifest['informative']}")
    return ds, manifest


def build_manifest(cfg: RunConfig, D: SensitivityMatrix, ids: Tuple[str, ...],
                   informative: List[int], ds: LabeledDataset) -> Dict[str, Any]:
    capability = sensor_capability(D)
    live = capability[informative]
    return {
        "seed": cfg.synth_seed,
        "n_sensors": D.n,
        "n_analytes": D.m,
        "density": cfg.synth.density,
        "rows": ds.n_rows,
        "classes": ds.classes,
        "informative": [ids[i] for i in informative],
        "sensitivity": D.entries.tolist(),
        "sensor_capability": dict(zip(ids, capability.tolist())),
        "mu_frac_estimate": float(live.mean()) if live.size else 0.0,
    }


@trace_stage("synth")
def write_synthetic(cfg: RunConfig, bundle: BundleManager) -> Tuple[LabeledDataset, Dict[str, Any]]:
    ds, manifest = synthesize(cfg)
    export_csv(ds, bundle.path(DATASET_FILE))
    bundle.write_json(MANIFEST_FILE, manifest)
    return ds, manifest


def load_dataset(cfg: RunConfig, bundle: BundleManager) -> Tuple[LabeledDataset, Optional[Dict[str, Any]]]:
    """cfg.data 给出时读 CSV，否则合成并写进输出包"""
    if cfg.data:
        return load_csv(cfg.data), None
    return write_synthetic(cfg, bundle)


def cmd_synth(cfg: RunConfig) -> int:
    """合成数据集：data/dataset.csv + data/manifest.json"""
    bundle = BundleManager(cfg.out)
    bundle.write_text("config.json", cfg.model_dump_json(indent=2) + "\n")
    write_synthetic(cfg, bundle)
    logger.info(f"✓ 数据集已写入 {bundle.path(DATASET_FILE)}")
    return 0


# ==================== 流水线 ====================

def write_evaluation(bundle: BundleManager, outcome: CommitteeOutcome) -> None:
    """每种模型的 scorecard、最后一轮的混淆矩阵和逐行预测，以及持久化模型"""
    for kind, mean in outcome.mean_scorecards.items():
        model = outcome.models[kind]
        shots = outcome.shot_scorecards[kind]
        bundle.write_json(f"evaluation/{kind.value}_scorecard.json", {
            "kind": kind.value,
            "mean": mean,
            "std": ModelScorecard.std_of(shots),
            "shots": shots,
            "converged": model.converged,
            "warnings": list(model.warnings),
        })
        frame = confusion_frame(outcome.confusions[kind]).reset_index()
        bundle.write_csv(f"evaluation/{kind.value}_confusion.csv", frame)
        bundle.write_csv(f"evaluation/{kind.value}_predictions.csv", outcome.predictions[kind])
        save_model(model, bundle.path(f"models/{kind.value}.json"))


def write_committee(bundle: BundleManager, outcome: CommitteeOutcome) -> None:
    ranking = outcome.ranking
    bundle.write_json("committee/ranking.json", {
        "admitted": [k.value for k in outcome.admitted],
        "ranking": ranking,
    })
    rows = [
        {"position": i + 1, "sensor": sid, "score": ranking.weighted_scores[sid]}
        for i, sid in enumerate(ranking.selected)
    ]
    bundle.write_csv("committee/weighted_scores.csv", rows, columns=["position", "sensor", "score"])
    bundle.write_json("committee/diagnostics.json", {
        **outcome.diagnostics,
        "mean_importance": {
            k.value: dict(zip(ranking.sensor_ids, np.asarray(v, dtype=float).tolist()))
            for k, v in outcome.mean_importance.items()
        },
    })


def write_modes(bundle: BundleManager, report: ModeReport) -> None:
    bundle.write_json("modes/modes.json", report)
    bundle.write_csv("modes/mode_table.csv", mode_table(report))
    repeats = [
        {"mode": e.mode.name, "repeat": r, **card.model_dump()}
        for e in report.entries for r, card in enumerate(e.repeats)
    ]
    bundle.write_csv("modes/mode_repeats.csv", pd.DataFrame(repeats))


def capability_model(cfg: RunConfig, mu_frac: Optional[float] = None) -> CapabilityModel:
    t = cfg.theory
    return CapabilityModel(
        mu_frac=t.mu_frac if mu_frac is None else mu_frac,
        sigma_frac=t.sigma_frac, m=t.m, epsilon=t.epsilon,
    )


def green_points(report: Optional[ModeReport]) -> Tuple[List[int], List[float]]:
    """绿色模式的 (传感器数, 实测能力)，实测能力取该模式的平均宏 F1"""
    if report is None:
        return [], []
    greens = [e for e in report.entries if not e.mode.is_blue]
    return [len(e.mode.active_sensors) for e in greens], [e.mean.macro_f1 for e in greens]


def run_theory(cfg: RunConfig, mu_fracs: List[float], report: Optional[ModeReport] = None
               ) -> Dict[float, TheoryValidation]:
    ns, caps = green_points(report)
    n_max = max([cfg.theory.n_max] + ns)
    return {
        mu: validate_green_modes(
            ns, caps, capability_model(cfg, mu), cfg.theory.trials, cfg.seed, n_max=n_max,
            targets=cfg.theory.targets, estimator=cfg.theory.estimator, workers=cfg.workers,
        )
        for mu in mu_fracs
    }


def curve_file(mu: float) -> str:
    return f"theory/curve_mu{mu:g}.csv"


def verdict_entry(cfg: RunConfig, mu: float, validation: TheoryValidation) -> Dict[str, Any]:
    model = capability_model(cfg, mu)
    try:
        required: Optional[int] = min_sensors(model.capability, model)
    except CapabilityDomainError:
        required = None
    return {
        "mu_frac": mu,
        "passed": validation.passed,
        "min_sensors": required,
        "capability_target": model.capability,
        "crossings": validation.crossings,
        "points": validation.points,
    }


def write_theory(bundle: BundleManager, cfg: RunConfig, results: Dict[float, TheoryValidation]) -> Dict[str, Any]:
    verdicts = []
    for mu, validation in results.items():
        curve = validation.curve
        bundle.write_csv(curve_file(mu), pd.DataFrame({
            "n": curve.n_values,
            "analytic": curve.analytic,
            "mc_mean": curve.mc_mean,
            "mc_ci_low": curve.mc_ci_low,
            "mc_ci_high": curve.mc_ci_high,
        }))
        verdicts.append(verdict_entry(cfg, mu, validation))
    verdict = {
        "seed": cfg.seed,
        "estimator": cfg.theory.estimator.value,
        "trials": cfg.theory.trials,
        "passed": all(v["passed"] for v in verdicts),
        "curves": verdicts,
    }
    bundle.write_json("theory/verdict.json", verdict)
    return verdict


def build_summary(cfg: RunConfig, ds: LabeledDataset, manifest: Optional[Dict[str, Any]],
                  outcome: CommitteeOutcome, report: ModeReport, verdict: Dict[str, Any]) -> Dict[str, Any]:
    """确定性汇总，不含耗时和路径"""
    ranking = outcome.ranking
    K = ranking.rank_depth
    summary: Dict[str, Any] = {
        "seed": cfg.seed,
        "dataset": {"rows": ds.n_rows, "sensors": ds.n_sensors, "classes": len(ds.classes)},
        "scorecards": {k.value: card for k, card in outcome.mean_scorecards.items()},
        "admitted": [k.value for k in outcome.admitted],
        "selected": ranking.top(K),
        "ranking": ranking.selected,
        "weighted_scores": ranking.weighted_scores,
        "modes": [
            {
                "name": e.mode.name,
                "sensors": len(e.mode.active_sensors),
                "macro_f1": e.mean.macro_f1,
                "accuracy": e.mean.accuracy,
                "f1_reduction_vs_blue": e.f1_reduction_vs_blue,
                "energy_savings": e.energy_savings,
            }
            for e in report.entries
        ],
        "theory": {"passed": verdict["passed"], "curves": [
            {"mu_frac": c["mu_frac"], "passed": c["passed"], "min_sensors": c["min_sensors"]}
            for c in verdict["curves"]
        ]},
        "warnings": {k.value: list(m.warnings) for k, m in outcome.models.items() if m.warnings},
    }
    if manifest is not None:
        summary["planted"] = manifest["informative"]
    return summary


def cmd_pipeline(cfg: RunConfig) -> int:
    """
    完整流程：数据 → 委员会（训练/评估/准入/投票）→ 工作模式 → 理论验证

    Raises:
        StageError: 任一阶段失败，带阶段名
    """
    bundle = BundleManager(cfg.out)
    bundle.write_text("config.json", cfg.model_dump_json(indent=2) + "\n")
    timer = StageTimer()
    policy = cfg.committee.model_copy(update={"train_fraction": cfg.split.train_fraction})

    with trace_span("load", timer):
        ds, manifest = load_dataset(cfg, bundle)
        ds.check_stratifiable()
    with trace_span("committee", timer):
        outcome = CommitteeRunner(ds, policy, cfg.seed, cfg.models, cfg.workers).run()
    with trace_span("evaluation", timer):
        write_evaluation(bundle, outcome)
    with trace_span("vote", timer):
        write_committee(bundle, outcome)
    with trace_span("modes", timer):
        modes = build_modes(outcome.ranking, cfg.modes.sizes, cfg.modes.readout_kind)
        report = evaluate_modes(
            modes, ds, cfg.modes.repeats, cfg.seed, cfg.split.train_fraction,
            power=cfg.modes.power, overrides=cfg.models, workers=cfg.workers,
        )
        write_modes(bundle, report)
    with trace_span("theory", timer):
        verdict = write_theory(bundle, cfg, run_theory(cfg, [cfg.theory.mu_frac], report))

    summary = build_summary(cfg, ds, manifest, outcome, report, verdict)
    bundle.write_json("summary.json", summary)
    bundle.write_json("timings.json", timer.as_dict())
    render_pipeline(summary)
    return 0


def load_mode_report(bundle: BundleManager) -> Optional[ModeReport]:
    if not bundle.exists("modes/modes.json"):
        return None
    return ModeReport.model_validate(bundle.read_json("modes/modes.json"))


def cmd_theory(cfg: RunConfig) -> int:
    """
    对 cfg.theory.mu_fracs 中每个取值输出一条曲线 CSV 和总的 verdict.json

    输出包里已有 modes/modes.json 时，把绿色模式点叠加上去。
    """
    bundle = BundleManager(cfg.out)
    bundle.write_text("config.json", cfg.model_dump_json(indent=2) + "\n")
    with trace_span("theory"):
        results = run_theory(cfg, list(cfg.theory.mu_fracs), load_mode_report(bundle))
        verdict = write_theory(bundle, cfg, results)
    render_theory(to_jsonable(verdict))
    return 0
