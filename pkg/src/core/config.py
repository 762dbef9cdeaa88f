"""
配置管理模块

集中管理所有配置项，支持配置文件、环境变量和默认值

设计亮点：
1. 单例模式 - 环境级配置（日志级别、worker 数、输出目录）全局只有一份
2. Pydantic 模型 - RunConfig 整棵配置树带类型校验和取值范围
3. 分层覆盖 - 命令行参数 > 配置文件 > 环境变量 > 默认值

RunConfig 可以完整序列化，每次运行都会原样写进输出目录的 config.json，
拿这个文件重新跑就能复现结果。
"""

import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .models import CommitteePolicy, Estimator, ModelKind

logger = logging.getLogger(__name__)

# 加载 .env 文件
load_dotenv()


# 表 1 的浓度范围（µg/L）
DEFAULT_CONCENTRATION_RANGES: Dict[str, List[float]] = {
    "B": [44.0, 120.0],
    "T": [44.0, 110.0],
    "E": [44.0, 120.0],
    "X": [44.0, 110.0],
    "N": [44.0, 160.0],
    "I": [62.0, 113.0],
}


class SynthConfig(BaseModel):
    """合成数据配置"""
    model_config = ConfigDict(frozen=True)

    n_sensors: int = Field(default=17, ge=1)
    n_analytes: int = Field(default=6, ge=1, le=6)
    n_informative: Optional[int] = Field(default=5, ge=1)  # None = 全部传感器都有响应
    density: float = 0.62
    noise_sd: float = Field(default=0.01, ge=0.0)
    repeats: int = Field(default=12, ge=1)
    concentration_scale: float = Field(default=1e-3, gt=0.0)  # µg/L → 无量纲响应
    concentration_ranges: Dict[str, List[float]] = Field(
        default_factory=lambda: {k: list(v) for k, v in DEFAULT_CONCENTRATION_RANGES.items()}
    )
    include_empty: bool = True
    seed: Optional[int] = Field(default=None, ge=0)  # None = 用 RunConfig.seed

    # density 的范围检查交给 synth_sensitivity，错误信息里带上命令行参数名


class SplitConfig(BaseModel):
    """训练/测试划分配置"""
    model_config = ConfigDict(frozen=True)

    train_fraction: float = Field(default=0.8, gt=0.0, lt=1.0)


class ModesConfig(BaseModel):
    """Blue/Green 工作模式配置"""
    model_config = ConfigDict(frozen=True)

    sizes: List[int] = Field(default_factory=lambda: [5, 3, 1])
    repeats: int = Field(default=5, ge=1)
    readout_kind: ModelKind = ModelKind.XGB
    power: Optional[Dict[str, float]] = None  # 传感器功耗，None = 均匀功耗


class TheoryConfig(BaseModel):
    """理论验证配置"""
    model_config = ConfigDict(frozen=True)

    mu_frac: float = Field(default=0.62, gt=0.0, le=1.0)
    mu_fracs: List[float] = Field(default_factory=lambda: [0.4, 0.62, 0.8, 1.0])
    sigma_frac: float = Field(default=0.1, ge=0.0)
    m: int = Field(default=6, ge=1)
    epsilon: float = Field(default=0.05, gt=0.0, lt=1.0)
    trials: int = Field(default=500, ge=1)
    n_max: int = Field(default=20, ge=1)
    targets: List[float] = Field(default_factory=lambda: [0.5, 0.8, 0.9, 0.95])
    estimator: Estimator = Estimator.ALL_DETECTED

    @field_validator("mu_fracs")
    @classmethod
    def _fractions_in_range(cls, values: List[float]) -> List[float]:
        for v in values:
            if not 0.0 < v <= 1.0:
                raise ValueError(f"mu_frac must lie in (0, 1], got {v}")
        return values


class RunConfig(BaseModel):
    """
    一次运行的完整配置

    数据来源二选一：data（CSV 路径）或 synth（合成参数）。
    """
    model_config = ConfigDict(frozen=True)

    data: Optional[str] = None
    synth: SynthConfig = Field(default_factory=SynthConfig)
    split: SplitConfig = Field(default_factory=SplitConfig)
    models: Dict[ModelKind, Dict[str, Any]] = Field(default_factory=dict)
    committee: CommitteePolicy = Field(default_factory=CommitteePolicy)
    modes: ModesConfig = Field(default_factory=ModesConfig)
    theory: TheoryConfig = Field(default_factory=TheoryConfig)
    seed: int = Field(default=2024, ge=0)
    workers: int = Field(default=1, ge=1)
    out: str = "runs/latest"

    @property
    def synth_seed(self) -> int:
        return self.synth.seed if self.synth.seed is not None else self.seed

    def with_overrides(self, **dotted: Any) -> "RunConfig":
        """
        用点号路径覆盖字段，例如 with_overrides(**{"committee.admission_threshold": 0.5})。

        值为 None 的项会被忽略，方便直接传入 argparse 结果。
        """
        data = self.model_dump(mode="json")
        for path, value in dotted.items():
            if value is None:
                continue
            node = data
            parts = path.split(".")
            for part in parts[:-1]:
                node = node.setdefault(part, {})
            node[parts[-1]] = value
        return RunConfig.model_validate(data)


def load_run_config(path: Optional[str] = None) -> RunConfig:
    """
    读取 JSON 配置文件，文件不存在时抛 FileNotFoundError。

    Args:
        path: 配置文件路径，None 时用环境默认值构造
    Returns:
        RunConfig
    """
    env = get_config()
    base: Dict[str, Any] = {"seed": env.default_seed, "workers": env.workers, "out": str(env.output_dir)}
    if path:
        with open(path, "r", encoding="utf-8") as f:
            base.update(json.load(f))
    return RunConfig.model_validate(base)


class Config:
    """
    全局配置类

    使用单例模式，只管理环境级设置
    """

    _instance: Optional["Config"] = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
            cls._instance._initialize()
        return cls._instance

    def _initialize(self):
        """初始化配置"""
        self.log_level = os.getenv("CRS_LOG_LEVEL", "INFO").upper()
        self.output_dir = Path(os.getenv("CRS_OUTPUT_DIR", "runs/latest"))
        self.workers = self._int_env("CRS_WORKERS", 1)
        self.default_seed = self._int_env("CRS_DEFAULT_SEED", 2024)

    @staticmethod
    def _int_env(name: str, default: int) -> int:
        raw = os.getenv(name)
        if raw is None:
            return default
        try:
            return int(raw)
        except ValueError:
            logger.warning(f"⚠️  {name}={raw!r} 不是整数，使用默认值 {default}")
            return default

    @classmethod
    def get(cls) -> "Config":
        """获取配置单例"""
        return cls()

    @classmethod
    def reset(cls) -> None:
        """丢弃单例（测试里修改环境变量后使用）"""
        cls._instance = None

    def __repr__(self):
        return f"Config(log_level={self.log_level}, workers={self.workers}, output_dir={self.output_dir})"


# 便捷函数
def get_config() -> Config:
    """获取全局配置"""
    return Config.get()
