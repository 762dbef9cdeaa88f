"""
模型评估：predict → confusion → score
"""

import logging
from typing import TYPE_CHECKING, Tuple

from src.core.models import ConfusionMatrix, ModelScorecard
from src.data.dataset import LabeledDataset
from .metrics import confusion, score

if TYPE_CHECKING:
    from src.models.base import TrainedModel

logger = logging.getLogger(__name__)


def evaluate(model: "TrainedModel", test: LabeledDataset) -> Tuple[ConfusionMatrix, ModelScorecard]:
    """
    在测试集上评估

    Raises:
        ShapeError: 测试集为空或列数不匹配
    """
    pred = model.predict_strings(test.features)
    cm = confusion(list(test.label_strings), pred)
    card = score(cm)
    logger.debug(f"{model.kind.value}: accuracy={card.accuracy:.4f} macro_f1={card.macro_f1:.4f}")
    return cm, card
