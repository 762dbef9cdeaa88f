"""
委员会流程

每一轮（shot）：分层划分 → 训练全部模型 → 测试集评估 → 提取重要性。
多轮结束后：
- 每种模型的重要性和七项指标分别按轮平均
- 按平均指标准入委员会
- 委员会成员按平均重要性排名，以平均宏 F1 为权重投票

随机种子：划分用 (seed, "split", shot)，训练用 (seed, "fit", shot, kind)。
所有 (shot, kind) 组合放进同一个 worker 池，结果与 worker 数无关。
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Tuple

import numpy as np
import pandas as pd

from src.core.errors import ParameterError
from src.core.models import (
    CommitteePolicy,
    ConfusionMatrix,
    ModelKind,
    ModelScorecard,
    SensorRanking,
    SplitSpec,
)
from src.core.parallel import run_parallel
from src.core.seeding import derive_seed
from src.data.dataset import LabeledDataset
from src.data.split import stratified_split
from src.evaluation.evaluator import evaluate
from src.evaluation.metrics import prediction_rows
from src.models.base import TrainedModel
from src.models.factory import fit_with_overrides
from .voting import admit, rank_by_importance, selection_diagnostics, weighted_vote

logger = logging.getLogger(__name__)


@dataclass
class ShotResult:
    """一轮中一种模型的结果"""
    shot: int
    kind: ModelKind
    model: TrainedModel
    confusion: ConfusionMatrix
    scorecard: ModelScorecard
    predictions: pd.DataFrame


@dataclass
class CommitteeOutcome:
    """委员会流程的全部产出"""
    ranking: SensorRanking
    admitted: List[ModelKind]
    mean_scorecards: Dict[ModelKind, ModelScorecard]
    shot_scorecards: Dict[ModelKind, List[ModelScorecard]]
    mean_importance: Dict[ModelKind, np.ndarray]
    confusions: Dict[ModelKind, ConfusionMatrix]
    predictions: Dict[ModelKind, pd.DataFrame]
    models: Dict[ModelKind, TrainedModel]
    diagnostics: Dict[str, Any] = field(default_factory=dict)


class CommitteeRunner:
    """
    委员会流程执行器

    Args:
        ds: 完整数据集
        policy: 准入与投票策略
        seed: master seed
        model_overrides: 每种模型的超参数覆盖项
        workers: worker 数
    """

    def __init__(self, ds: LabeledDataset, policy: CommitteePolicy, seed: int,
                 model_overrides: Optional[Mapping[ModelKind, Dict[str, Any]]] = None, workers: int = 1):
        if policy.rank_depth > ds.n_sensors:
            raise ParameterError(f"rank depth {policy.rank_depth} exceeds sensor count {ds.n_sensors}")
        if not policy.kinds:
            raise ParameterError("committee policy lists no model kinds")
        self.ds = ds
        self.policy = policy
        self.seed = seed
        self.model_overrides = {ModelKind(k): dict(v) for k, v in (model_overrides or {}).items()}
        self.workers = workers

    def _splits(self) -> List[Tuple[LabeledDataset, LabeledDataset]]:
        self.ds.check_stratifiable()
        return [
            stratified_split(self.ds, SplitSpec(
                train_fraction=self.policy.train_fraction,
                seed=derive_seed(self.seed, "split", shot),
            ))
            for shot in range(self.policy.repeats)
        ]

    def _run_shot(self, shot: int, kind: ModelKind, train: LabeledDataset, test: LabeledDataset) -> ShotResult:
        model = fit_with_overrides(
            kind, self.model_overrides.get(kind), derive_seed(self.seed, "fit", shot, kind.value), train
        )
        cm, card = evaluate(model, test)
        preds = prediction_rows(list(test.label_strings), model.predict_strings(test.features))
        logger.info(f"shot {shot} {kind.value}: macro F1 {card.macro_f1:.4f}, accuracy {card.accuracy:.4f}")
        return ShotResult(shot, kind, model, cm, card, preds)

    def run(self) -> CommitteeOutcome:
        splits = self._splits()
        kinds = list(self.policy.kinds)
        tasks = [(shot, kind, train, test) for shot, (train, test) in enumerate(splits) for kind in kinds]
        results: List[ShotResult] = run_parallel(self._run_shot, tasks, self.workers)

        by_kind: Dict[ModelKind, List[ShotResult]] = {k: [] for k in kinds}
        for r in results:
            by_kind[r.kind].append(r)

        shot_cards = {k: [r.scorecard for r in rs] for k, rs in by_kind.items()}
        mean_cards = {k: ModelScorecard.mean_of(cards) for k, cards in shot_cards.items()}
        mean_importance = {k: np.mean([r.model.importance for r in rs], axis=0) for k, rs in by_kind.items()}

        admitted = admit(mean_cards, self.policy)
        K = self.policy.rank_depth
        per_model_ranks = {k.value: rank_by_importance(mean_importance[k], self.ds.sensor_ids, K) for k in admitted}
        model_f1 = {k.value: mean_cards[k].macro_f1 for k in admitted}
        ranking = weighted_vote(per_model_ranks, model_f1, K, sensor_ids=self.ds.sensor_ids)
        logger.info(f"选出的传感器: {ranking.top(K)}")

        last = {k: rs[-1] for k, rs in by_kind.items()}
        return CommitteeOutcome(
            ranking=ranking,
            admitted=admitted,
            mean_scorecards=mean_cards,
            shot_scorecards=shot_cards,
            mean_importance=mean_importance,
            confusions={k: r.confusion for k, r in last.items()},
            predictions={k: r.predictions for k, r in last.items()},
            models={k: r.model for k, r in last.items()},
            diagnostics=selection_diagnostics(per_model_ranks, K, self.ds.sensor_ids),
        )


def run_committee(ds: LabeledDataset, policy: CommitteePolicy, seed: int,
                  model_overrides: Optional[Mapping[ModelKind, Dict[str, Any]]] = None,
                  workers: int = 1) -> SensorRanking:
    """完整委员会流程，只返回投票结果"""
    return CommitteeRunner(ds, policy, seed, model_overrides, workers).run().ranking
