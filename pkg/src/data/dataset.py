"""
带标签的传感器阵列数据集

读入公开 CSV（6 列浓度 + 若干列传感器响应），按浓度 > 0 推出混合物标签。
原始特征原样保存，标准化放到模型内部做（只用训练集统计量）。
"""

import logging
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field

from src.core.errors import DataParseError, SchemaError, ShapeError, StratificationError
from .labels import ANALYTE_ORDER, AnalyteCode, MixtureLabel

logger = logging.getLogger(__name__)

LABEL_COLUMN = "label"
PUBLISHED_ROW_COUNTS = (852, 853)


class CsvSchema(BaseModel):
    """CSV 列映射"""
    concentration_columns: Dict[AnalyteCode, str] = Field(
        default_factory=lambda: {code: code.value for code in ANALYTE_ORDER}
    )
    sensor_columns: Optional[List[str]] = None  # None = 除浓度列和 label 列以外的所有列
    label_column: str = LABEL_COLUMN


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """
    传感器读数矩阵（rows × n）+ 每行的混合物标签

    features 是只读数组，构造后不可修改。
    """
    sensor_ids: Tuple[str, ...]
    features: np.ndarray
    labels: Tuple[MixtureLabel, ...]
    concentrations: Optional[np.ndarray] = None
    source_rows: Optional[int] = None

    def __post_init__(self):
        features = np.array(self.features, dtype=float, copy=True)
        if features.ndim != 2:
            raise ShapeError(f"features must be 2-D, got shape {features.shape}")
        if features.shape[1] != len(self.sensor_ids):
            raise ShapeError(
                f"features have {features.shape[1]} columns but {len(self.sensor_ids)} sensor ids were given"
            )
        if features.shape[0] != len(self.labels):
            raise ShapeError(f"{features.shape[0]} rows but {len(self.labels)} labels")
        if not np.all(np.isfinite(features)):
            raise ShapeError("features contain non-finite values")
        if len(set(self.sensor_ids)) != len(self.sensor_ids):
            raise ShapeError("sensor ids must be unique")
        features.setflags(write=False)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "sensor_ids", tuple(self.sensor_ids))
        object.__setattr__(self, "labels", tuple(MixtureLabel.parse(lb) for lb in self.labels))
        if self.concentrations is not None:
            conc = np.array(self.concentrations, dtype=float, copy=True)
            if conc.shape != (features.shape[0], len(ANALYTE_ORDER)):
                raise ShapeError(f"concentrations must be rows x 6, got {conc.shape}")
            conc.setflags(write=False)
            object.__setattr__(self, "concentrations", conc)

    # ==================== 基本属性 ====================

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_sensors(self) -> int:
        return self.features.shape[1]

    @property
    def label_strings(self) -> np.ndarray:
        return np.array([lb.canonical for lb in self.labels], dtype=object)

    @property
    def classes(self) -> List[str]:
        return sorted(set(self.label_strings))

    def class_counts(self) -> Dict[str, int]:
        return dict(sorted(Counter(self.label_strings).items()))

    def check_stratifiable(self) -> None:
        """每个类别至少 2 行，否则抛 StratificationError"""
        small = [label for label, count in self.class_counts().items() if count < 2]
        if small:
            raise StratificationError(small)

    # ==================== 派生数据集 ====================

    def subset(self, rows: Sequence[int]) -> "LabeledDataset":
        idx = np.asarray(rows, dtype=int)
        return LabeledDataset(
            sensor_ids=self.sensor_ids,
            features=self.features[idx],
            labels=tuple(self.labels[i] for i in idx),
            concentrations=None if self.concentrations is None else self.concentrations[idx],
        )

    def sensor_indices(self, sensor_ids: Sequence[str]) -> List[int]:
        lookup = {sid: i for i, sid in enumerate(self.sensor_ids)}
        missing = [sid for sid in sensor_ids if sid not in lookup]
        if missing:
            raise ShapeError(f"unknown sensors: {missing}")
        return [lookup[sid] for sid in sensor_ids]

    def project(self, sensor_ids: Sequence[str]) -> "LabeledDataset":
        """只保留指定传感器列（按给定顺序）"""
        cols = self.sensor_indices(sensor_ids)
        return LabeledDataset(
            sensor_ids=tuple(sensor_ids),
            features=self.features[:, cols],
            labels=self.labels,
            concentrations=self.concentrations,
        )

    def with_features(self, features: np.ndarray) -> "LabeledDataset":
        return LabeledDataset(
            sensor_ids=self.sensor_ids,
            features=features,
            labels=self.labels,
            concentrations=self.concentrations,
        )

    def to_frame(self) -> pd.DataFrame:
        """导出格式：B,T,E,X,N,I + 传感器列 + label"""
        if self.concentrations is not None:
            conc = self.concentrations
        else:
            # 没有浓度信息时写存在性指示（1.0 / 0.0），重新读入得到同样的标签
            conc = np.array(
                [[1.0 if code in lb.present else 0.0 for code in ANALYTE_ORDER] for lb in self.labels]
            ).reshape(self.n_rows, len(ANALYTE_ORDER))
        frame = pd.DataFrame(conc, columns=[code.value for code in ANALYTE_ORDER])
        for j, sid in enumerate(self.sensor_ids):
            frame[sid] = self.features[:, j]
        frame[LABEL_COLUMN] = self.label_strings
        return frame


def label_from_concentrations(row: Sequence[float]) -> MixtureLabel:
    """浓度 > 0 的分析物构成标签，全 0 为 NONE"""
    return MixtureLabel(frozenset(code for code, value in zip(ANALYTE_ORDER, row) if value > 0))


def _numeric_column(frame: pd.DataFrame, column: str) -> np.ndarray:
    raw = frame[column]
    values = pd.to_numeric(raw, errors="coerce").to_numpy(dtype=float)
    bad = ~np.isfinite(values)
    if bad.any():
        row = int(np.flatnonzero(bad)[0])
        raise DataParseError(row=row, column=column, value=raw.iloc[row])
    return values


def load_csv(path: Union[str, Path], schema: Optional[CsvSchema] = None) -> LabeledDataset:
    """
    读取传感器阵列 CSV。

    Args:
        path: CSV 路径（UTF-8，逗号分隔，小数点为 .）
        schema: 列映射，默认浓度列名 B,T,E,X,N,I
    Returns:
        LabeledDataset，source_rows 记录原始行数
    Raises:
        SchemaError: 缺少列（错误信息带列名）
        DataParseError: 非数值单元格（错误信息带行号）
    """
    schema = schema or CsvSchema()
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"dataset not found: {path}")

    frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    frame.columns = [str(c).strip() for c in frame.columns]

    conc_cols = [schema.concentration_columns.get(code, code.value) for code in ANALYTE_ORDER]
    for col in conc_cols:
        if col not in frame.columns:
            raise SchemaError(col, str(path))

    if schema.sensor_columns is not None:
        sensor_cols = list(schema.sensor_columns)
        for col in sensor_cols:
            if col not in frame.columns:
                raise SchemaError(col, str(path))
    else:
        reserved = set(conc_cols) | {schema.label_column}
        sensor_cols = [c for c in frame.columns if c not in reserved]
    if not sensor_cols:
        raise SchemaError("<sensor columns>", str(path))

    concentrations = np.column_stack([_numeric_column(frame, c) for c in conc_cols]) if len(frame) else \
        np.zeros((0, len(ANALYTE_ORDER)))
    features = np.column_stack([_numeric_column(frame, c) for c in sensor_cols]) if len(frame) else \
        np.zeros((0, len(sensor_cols)))
    labels = tuple(label_from_concentrations(row) for row in concentrations)

    n = len(frame)
    if n in PUBLISHED_ROW_COUNTS:
        logger.info(f"载入 {n} 行（与公开数据集行数一致）")
    else:
        logger.info(f"载入 {n} 行, {len(sensor_cols)} 个传感器, {len(set(labels))} 个标签")

    return LabeledDataset(
        sensor_ids=tuple(sensor_cols),
        features=features,
        labels=labels,
        concentrations=concentrations,
        source_rows=n,
    )


def export_csv(ds: LabeledDataset, path: Union[str, Path]) -> Path:
    """按导出格式写 CSV（浓度列 + 传感器列 + label）"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    ds.to_frame().to_csv(path, index=False, lineterminator="\n")
    return path
