"""
测试公共 fixture

- blobs：三个类别、四个传感器、彼此分得很开的小数据集
- planted：植入 3 个信息传感器的 8 传感器合成数据（3 种分析物，8 个类别）
- array17：17 个传感器中植入 5 个信息传感器，与实际阵列同规模
- bundle_dir：临时输出目录
"""

import numpy as np
import pytest

from src.core.config import DEFAULT_CONCENTRATION_RANGES, Config
from src.data.dataset import LabeledDataset
from src.data.labels import MixtureLabel
from src.data.synthesis import factorial_mixtures, planted_sensitivity, synth_dataset

PLANTED_INFORMATIVE = [1, 4, 6]
ARRAY17_INFORMATIVE = [0, 3, 7, 11, 15]


def make_blobs(per_class: int = 20, spread: float = 0.1, seed: int = 0) -> LabeledDataset:
    rng = np.random.default_rng(seed)
    centers = np.array([
        [0.0, 0.0, 0.0, 0.0],
        [3.0, 0.0, 3.0, 0.0],
        [0.0, 3.0, 0.0, 3.0],
    ])
    names = ["NONE", "B", "T"]
    rows, labels = [], []
    for center, name in zip(centers, names):
        rows.append(center + rng.normal(0.0, spread, size=(per_class, centers.shape[1])))
        labels.extend([MixtureLabel.parse(name)] * per_class)
    return LabeledDataset(
        sensor_ids=("S1", "S2", "S3", "S4"),
        features=np.vstack(rows),
        labels=tuple(labels),
    )


@pytest.fixture(autouse=True)
def fresh_config(monkeypatch):
    """每个测试用例重新读取环境配置"""
    for name in ("CRS_LOG_LEVEL", "CRS_WORKERS", "CRS_OUTPUT_DIR", "CRS_DEFAULT_SEED"):
        monkeypatch.delenv(name, raising=False)
    Config.reset()
    yield
    Config.reset()


@pytest.fixture
def blobs() -> LabeledDataset:
    return make_blobs()


@pytest.fixture(scope="session")
def planted() -> LabeledDataset:
    D = planted_sensitivity(8, 3, PLANTED_INFORMATIVE, density=0.62, seed=3)
    mixtures = factorial_mixtures(3, DEFAULT_CONCENTRATION_RANGES, seed=3, scale=1e-2)
    return synth_dataset(D, mixtures, repeats=6, noise_sd=0.01, seed=3)


@pytest.fixture(scope="session")
def array17() -> LabeledDataset:
    D = planted_sensitivity(17, 3, ARRAY17_INFORMATIVE, density=0.62, seed=5)
    mixtures = factorial_mixtures(3, DEFAULT_CONCENTRATION_RANGES, seed=5, scale=1e-2)
    return synth_dataset(D, mixtures, repeats=6, noise_sd=0.01, seed=5)


@pytest.fixture
def bundle_dir(tmp_path):
    return tmp_path / "bundle"
