"""
异常体系

所有领域错误都继承 CRSError，同时继承最接近的内置异常，
这样通用调用方（比如只 catch ValueError 的代码）也能正常处理。

CLI 根据异常类型决定退出码：
- CRSError / StageError → 1（阶段失败）
- pydantic ValidationError / 参数解析错误 → 2（用法错误）
"""

from typing import Iterable, Optional


class CRSError(Exception):
    """传感器阵列优化流水线的基础异常"""


class SchemaError(CRSError, ValueError):
    """CSV 缺少必需列"""

    def __init__(self, column: str, path: Optional[str] = None):
        self.column = column
        where = f" in {path}" if path else ""
        super().__init__(f"missing column '{column}'{where}")


class DataParseError(CRSError, ValueError):
    """单元格无法解析为有限数值"""

    def __init__(self, row: int, column: str, value: object):
        self.row = row
        self.column = column
        super().__init__(f"row {row}, column '{column}': cannot parse {value!r} as a finite number")


class StratificationError(CRSError, ValueError):
    """存在样本数不足 2 的类别，无法分层划分"""

    def __init__(self, classes: Iterable[str]):
        self.classes = sorted(classes)
        super().__init__(f"classes with fewer than 2 rows cannot be stratified: {self.classes}")


class ShapeError(CRSError, ValueError):
    """维度不匹配"""


class ParameterError(CRSError, ValueError):
    """参数取值非法"""


class DegenerateDataError(CRSError, ValueError):
    """数据或权重退化（单类别训练集、F1 权重全为 0 等）"""


class AdmissionError(CRSError, RuntimeError):
    """没有任何模型通过委员会准入阈值"""

    def __init__(self, threshold: float, best_kind: str, best_score: float):
        self.threshold = threshold
        self.best_kind = best_kind
        self.best_score = best_score
        super().__init__(
            f"no model reached the admission threshold {threshold:.3f}; "
            f"best was {best_kind} with {best_score:.4f}"
        )


class CapabilityDomainError(CRSError, ValueError):
    """最小传感器数公式中对数奇异"""


class StageError(CRSError, RuntimeError):
    """流水线某个阶段失败，携带阶段名"""

    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {cause}")
