"""
Blue / Green 工作模式

- blue：全部传感器工作
- green-k：只开委员会选出的前 k 个传感器

评估时只保留工作传感器的列，在投影后的数据上重新训练读出模型（默认 XGB）。
同一 repeat 下所有模式共用一次划分（种子 (seed, "mode", "split", r)），
训练种子为 (seed, "mode", name, r)。
"""

import logging
from typing import Any, Dict, List, Mapping, Optional, Sequence

from src.core.errors import ParameterError
from src.core.models import (
    ModeConfig,
    ModeEntry,
    ModelKind,
    ModelScorecard,
    ModeReport,
    SensorRanking,
    SplitSpec,
)
from src.core.parallel import run_parallel
from src.core.seeding import derive_seed
from src.data.dataset import LabeledDataset
from src.data.split import stratified_split
from src.evaluation.evaluator import evaluate
from src.models.factory import fit_with_overrides
from .energy import energy_savings, energy_savings_weighted, f1_reduction

logger = logging.getLogger(__name__)

BLUE = "blue"


def green_name(size: int) -> str:
    return f"green-{size}"


def build_modes(ranking: SensorRanking, sizes: Sequence[int],
                readout_kind: ModelKind = ModelKind.XGB) -> List[ModeConfig]:
    """
    一个 blue 模式 + 每个 size 一个 green 模式

    Raises:
        ParameterError: size 为 0、超过传感器数或重复
    """
    total = len(ranking.sensor_ids)
    seen = set()
    for size in sizes:
        if not 1 <= size <= total:
            raise ParameterError(f"mode size must lie in [1, {total}], got {size}")
        if size in seen:
            raise ParameterError(f"mode size {size} requested twice")
        seen.add(size)

    modes = [ModeConfig(name=BLUE, active_sensors=list(ranking.sensor_ids), readout_model_kind=readout_kind)]
    modes.extend(
        ModeConfig(name=green_name(size), active_sensors=ranking.top(size), readout_model_kind=readout_kind)
        for size in sizes
    )
    return modes


def _score_repeat(mode: ModeConfig, ds: LabeledDataset, repeat: int, seed: int, train_fraction: float,
                  overrides: Optional[Dict[str, Any]]) -> ModelScorecard:
    projected = ds.project(mode.active_sensors)
    spec = SplitSpec(train_fraction=train_fraction, seed=derive_seed(seed, "mode", "split", repeat))
    train, test = stratified_split(projected, spec)
    model = fit_with_overrides(
        mode.readout_model_kind, overrides, derive_seed(seed, "mode", mode.name, repeat), train
    )
    _, card = evaluate(model, test)
    return card


def _entry(mode: ModeConfig, cards: List[ModelScorecard]) -> ModeEntry:
    return ModeEntry(mode=mode, repeats=cards, mean=ModelScorecard.mean_of(cards), std=ModelScorecard.std_of(cards))


def evaluate_mode(mode: ModeConfig, ds: LabeledDataset, repeats: int, seed: int, train_fraction: float = 0.8,
                  overrides: Optional[Dict[str, Any]] = None, workers: int = 1) -> ModeEntry:
    """
    单个模式：repeats 次（划分 → 投影 → 重新训练 → 评估），报告均值和标准差

    返回的 entry 里 f1_reduction_vs_blue 和 energy_savings 为 0，由 evaluate_modes 填写。
    """
    if repeats < 1:
        raise ParameterError(f"repeats must be >= 1, got {repeats}")
    tasks = [(mode, ds, r, seed, train_fraction, overrides) for r in range(repeats)]
    cards = run_parallel(_score_repeat, tasks, workers)
    return _entry(mode, cards)


def evaluate_modes(modes: Sequence[ModeConfig], ds: LabeledDataset, repeats: int, seed: int,
                   train_fraction: float = 0.8, power: Optional[Mapping[str, float]] = None,
                   overrides: Optional[Mapping[ModelKind, Dict[str, Any]]] = None,
                   workers: int = 1) -> ModeReport:
    """
    全部模式，生成模式对比报告（F1 降幅与能耗节省相对 blue 计算）

    Raises:
        ParameterError: 缺少 blue 模式
    """
    if repeats < 1:
        raise ParameterError(f"repeats must be >= 1, got {repeats}")
    blue = next((m for m in modes if m.is_blue), None)
    if blue is None:
        raise ParameterError("mode list has no blue mode")
    overrides = {ModelKind(k): v for k, v in (overrides or {}).items()}

    tasks = [
        (mode, ds, r, seed, train_fraction, overrides.get(mode.readout_model_kind))
        for mode in modes for r in range(repeats)
    ]
    cards = run_parallel(_score_repeat, tasks, workers)

    total = ds.n_sensors
    entries = [_entry(mode, cards[i * repeats:(i + 1) * repeats]) for i, mode in enumerate(modes)]
    blue_f1 = next(e for e in entries if e.mode.is_blue).mean.macro_f1

    finished: List[ModeEntry] = []
    for e in entries:
        if power is not None:
            savings = energy_savings_weighted(e.mode.active_sensors, power)
        else:
            savings = energy_savings(len(e.mode.active_sensors), total)
        reduction = 0.0 if e.mode.is_blue else f1_reduction(blue_f1, e.mean.macro_f1)
        finished.append(e.model_copy(update={"f1_reduction_vs_blue": reduction, "energy_savings": savings}))
        logger.info(
            f"{e.mode.name}: {len(e.mode.active_sensors)} sensors, macro F1 {e.mean.macro_f1:.4f}, "
            f"reduction {reduction:+.4f}, savings {savings:.1%}"
        )
    return ModeReport(total_sensors=total, entries=finished)
