"""
委员会准入与 F1 加权投票

加权投票：
    raw_i = Σ_j ((K + 1) - rank_ij) · F1_j      （传感器不在模型 j 的前 K 名时贡献 0）
    score_i = raw_i / Σ_i raw_i

K = 5 时分子就是 (6 - rank)。
"""

import logging
from typing import Dict, List, Mapping, Optional, Sequence, Union

import numpy as np

from src.core.errors import AdmissionError, DegenerateDataError, ParameterError, ShapeError
from src.core.models import CommitteePolicy, ModelKind, ModelScorecard, SensorRanking

logger = logging.getLogger(__name__)

KindKey = Union[str, ModelKind]


def _key(kind: KindKey) -> str:
    return kind.value if isinstance(kind, ModelKind) else str(kind)


def admit(scorecards: Mapping[KindKey, ModelScorecard], policy: CommitteePolicy) -> List[ModelKind]:
    """
    准入：门控指标 >= 阈值的模型进入委员会

    Returns:
        按输入顺序排列的入选种类
    Raises:
        AdmissionError: 没有模型通过（携带最好的模型和分数）
    """
    if not scorecards:
        raise ParameterError("no scorecards to admit from")
    gates = {ModelKind(_key(k)): card.gate(policy.metric) for k, card in scorecards.items()}
    admitted = [k for k, g in gates.items() if g >= policy.admission_threshold]
    if not admitted:
        best_kind = max(gates, key=lambda k: gates[k])
        raise AdmissionError(policy.admission_threshold, best_kind.value, gates[best_kind])
    logger.info(
        f"委员会: {[k.value for k in admitted]} "
        f"({policy.metric} >= {policy.admission_threshold})"
    )
    return admitted


def rank_by_importance(importance: Sequence[float], sensor_ids: Sequence[str], K: int) -> List[str]:
    """按重要性降序取前 K 个，重要性相同按列顺序"""
    values = np.asarray(importance, dtype=float)
    if values.shape != (len(sensor_ids),):
        raise ShapeError(f"importance has {values.size} entries for {len(sensor_ids)} sensors")
    if not 1 <= K <= len(sensor_ids):
        raise ParameterError(f"K must lie in [1, {len(sensor_ids)}], got {K}")
    order = sorted(range(len(sensor_ids)), key=lambda i: (-values[i], i))
    return [sensor_ids[i] for i in order[:K]]


def rank_sensors(model, K: int) -> List[str]:
    """单个模型的前 K 名传感器"""
    return rank_by_importance(model.importance, model.sensor_ids, K)


def _vote_totals(per_model_ranks: Mapping[str, Sequence[str]], model_f1: Mapping[str, float],
                 K: int) -> Dict[str, float]:
    raw: Dict[str, float] = {}
    for kind, ranks in per_model_ranks.items():
        weight = model_f1[kind]
        for position, sid in enumerate(ranks, start=1):
            raw[sid] = raw.get(sid, 0.0) + ((K + 1) - position) * weight
    return raw


def weighted_vote(per_model_ranks: Mapping[KindKey, Sequence[str]], model_f1: Mapping[KindKey, float],
                  K: int, sensor_ids: Optional[Sequence[str]] = None) -> SensorRanking:
    """
    F1 加权投票

    Args:
        per_model_ranks: 每个模型的前 K 名（按名次排列）
        model_f1: 每个模型的 F1 权重，[0, 1]
        K: 名次深度
        sensor_ids: 全部传感器（决定平票顺序），None 时按在名单中首次出现的顺序
    Returns:
        SensorRanking，selected 包含全部传感器
    Raises:
        DegenerateDataError: F1 权重全为 0
    """
    if K < 1:
        raise ParameterError(f"K must be >= 1, got {K}")
    ranks = {_key(k): list(v) for k, v in per_model_ranks.items()}
    weights = {_key(k): float(v) for k, v in model_f1.items()}
    if not ranks:
        raise ParameterError("no rank lists to vote on")
    missing = sorted(set(ranks) - set(weights))
    if missing:
        raise ShapeError(f"missing F1 weights for {missing}")
    for kind, lst in ranks.items():
        if len(lst) > K:
            raise ParameterError(f"{kind}: rank list has {len(lst)} entries, more than K={K}")
        if len(set(lst)) != len(lst):
            raise ParameterError(f"{kind}: rank list repeats a sensor")
    for kind in ranks:
        if not 0.0 <= weights[kind] <= 1.0:
            raise ParameterError(f"{kind}: F1 weight {weights[kind]} outside [0, 1]")
    if all(weights[k] == 0.0 for k in ranks):
        raise DegenerateDataError("all F1 weights are zero")

    if sensor_ids is None:
        ids: List[str] = []
        for lst in ranks.values():
            ids.extend(s for s in lst if s not in ids)
    else:
        ids = list(sensor_ids)
        unknown = sorted({s for lst in ranks.values() for s in lst} - set(ids))
        if unknown:
            raise ShapeError(f"rank lists name unknown sensors {unknown}")

    raw = _vote_totals(ranks, {k: weights[k] for k in ranks}, K)
    total = sum(raw.values())
    if total <= 0.0:
        raise DegenerateDataError("weighted vote total is zero")
    scores = {sid: raw.get(sid, 0.0) / total for sid in ids}
    column = {sid: i for i, sid in enumerate(ids)}
    selected = sorted(ids, key=lambda s: (-scores[s], column[s]))

    return SensorRanking(
        sensor_ids=ids,
        rank_depth=K,
        per_model_ranks=ranks,
        model_f1={k: weights[k] for k in ranks},
        weighted_scores=scores,
        selected=selected,
    )


def selection_diagnostics(per_model_ranks: Mapping[KindKey, Sequence[str]], K: int,
                          sensor_ids: Sequence[str]) -> Dict[str, Dict[str, object]]:
    """
    频次与名次计数（只作诊断输出，不参与选择）

    Returns:
        {"frequency": {sensor: 出现在多少个前 K 名单里},
         "rank_counts": {sensor: [名次 1..K 各出现几次]}}
    """
    frequency = {sid: 0 for sid in sensor_ids}
    rank_counts = {sid: [0] * K for sid in sensor_ids}
    for lst in per_model_ranks.values():
        for position, sid in enumerate(lst[:K]):
            frequency[sid] = frequency.get(sid, 0) + 1
            rank_counts.setdefault(sid, [0] * K)[position] += 1
    return {"frequency": frequency, "rank_counts": rank_counts}
