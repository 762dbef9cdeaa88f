"""
Observability 模块 - 可观测层

阶段计时与失败阶段定位
"""

from .tracing import StageTimer, trace_span, trace_stage

__all__ = [
    "StageTimer",
    "trace_span",
    "trace_stage",
]
