"""
输出包管理模块

负责一次运行所有产物的落盘：配置、汇总、评估、排名、模式报告、理论曲线

设计亮点：
1. 按阶段分目录 - evaluation/ committee/ modes/ theory/ 互不干扰
2. 只输出 CSV + JSON - 方便外部画图
3. 路径约束 - 所有写入都必须落在输出目录内部

目录结构：
<out>/
├── config.json          # 原样保存的 RunConfig
├── summary.json         # 确定性汇总（不含耗时）
├── timings.json         # 各阶段耗时
├── data/                # 合成数据集与 manifest
├── evaluation/          # 每个模型的 scorecard / 混淆矩阵 / 逐行预测
├── committee/           # 排名、加权得分、诊断统计
├── models/              # 持久化的模型 JSON
├── modes/               # 模式报告
└── theory/              # 理论曲线与判定
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd
from pydantic import BaseModel

logger = logging.getLogger(__name__)


def to_jsonable(obj: Any) -> Any:
    """pydantic 模型转成可 json.dump 的结构"""
    if isinstance(obj, BaseModel):
        return obj.model_dump(mode="json")
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    return obj


class BundleManager:
    """
    输出包管理器

    所有写入都通过 _resolve()，拒绝落在 root 之外的路径
    """

    def __init__(self, root: str | Path):
        """
        初始化输出包

        Args:
            root: 输出目录
        """
        self.root = Path(root).resolve()
        self.root.mkdir(parents=True, exist_ok=True)

    def _resolve(self, relative: str) -> Path:
        path = (self.root / relative).resolve()
        if self.root != path and self.root not in path.parents:
            raise ValueError(f"refusing to write outside the bundle: {relative}")
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    # ==================== 写入 ====================

    def write_json(self, relative: str, payload: Any) -> Path:
        """写 JSON，键顺序保持插入顺序，保证同样输入得到同样的字节"""
        path = self._resolve(relative)
        text = json.dumps(to_jsonable(payload), ensure_ascii=False, indent=2)
        path.write_text(text + "\n", encoding="utf-8")
        logger.debug(f"wrote {path}")
        return path

    def write_text(self, relative: str, text: str) -> Path:
        path = self._resolve(relative)
        path.write_text(text, encoding="utf-8")
        return path

    def write_csv(self, relative: str, rows: Sequence[Dict[str, Any]] | pd.DataFrame,
                  columns: Optional[List[str]] = None) -> Path:
        """写 CSV，rows 可以是 DataFrame 或字典列表"""
        path = self._resolve(relative)
        frame = rows if isinstance(rows, pd.DataFrame) else pd.DataFrame(list(rows), columns=columns)
        frame.to_csv(path, index=False, lineterminator="\n")
        logger.debug(f"wrote {path}")
        return path

    # ==================== 读取 ====================

    def read_json(self, relative: str) -> Any:
        path = self.root / relative
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)

    def exists(self, relative: str) -> bool:
        return (self.root / relative).exists()

    def path(self, relative: str) -> Path:
        return self._resolve(relative)
