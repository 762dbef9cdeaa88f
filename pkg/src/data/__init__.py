"""
Data 模块 - 数据层

CSV 读写、混合物标签、分层划分、矩阵测量模型合成数据
"""

from .dataset import CsvSchema, LabeledDataset, export_csv, load_csv
from .labels import ANALYTE_ORDER, AnalyteCode, MixtureLabel
from .split import stratified_split
from .synthesis import (
    Measurement,
    SampleMatrix,
    SensitivityMatrix,
    array_capability,
    factorial_mixtures,
    perfect_measurement,
    planted_sensitivity,
    sensor_capability,
    synth_dataset,
    synth_measure,
    synth_sensitivity,
)

__all__ = [
    "ANALYTE_ORDER",
    "AnalyteCode",
    "CsvSchema",
    "LabeledDataset",
    "Measurement",
    "MixtureLabel",
    "SampleMatrix",
    "SensitivityMatrix",
    "array_capability",
    "export_csv",
    "factorial_mixtures",
    "load_csv",
    "perfect_measurement",
    "planted_sensitivity",
    "sensor_capability",
    "stratified_split",
    "synth_dataset",
    "synth_measure",
    "synth_sensitivity",
]
