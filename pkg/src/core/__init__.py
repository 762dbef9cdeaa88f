"""
Core 模块 - 核心基础设施

包含配置管理、输出包管理、数据模型、异常体系、种子派生
"""

from .bundle import BundleManager
from .config import Config, RunConfig, get_config, load_run_config
from .models import (
    CapabilityModel,
    CommitteePolicy,
    ConfusionMatrix,
    ModeConfig,
    ModeReport,
    ModelKind,
    ModelScorecard,
    SensorRanking,
    SplitSpec,
)
from .seeding import derive_seed, make_rng

__all__ = [
    "BundleManager",
    "Config",
    "RunConfig",
    "get_config",
    "load_run_config",
    "CapabilityModel",
    "CommitteePolicy",
    "ConfusionMatrix",
    "ModeConfig",
    "ModeReport",
    "ModelKind",
    "ModelScorecard",
    "SensorRanking",
    "SplitSpec",
    "derive_seed",
    "make_rng",
]
