"""
Committee 模块 - 模型委员会准入与 F1 加权投票
"""

from .runner import CommitteeOutcome, CommitteeRunner, run_committee
from .voting import admit, rank_by_importance, rank_sensors, selection_diagnostics, weighted_vote

__all__ = [
    "CommitteeOutcome",
    "CommitteeRunner",
    "admit",
    "rank_by_importance",
    "rank_sensors",
    "run_committee",
    "selection_diagnostics",
    "weighted_vote",
]
