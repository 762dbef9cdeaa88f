"""
阶段追踪模块

给流水线的每个阶段计时，并在阶段失败时把阶段名带进异常

技术要点：
1. trace_span 上下文管理器 - 记录开始/结束和耗时
2. trace_stage 装饰器 - 函数级别的同一套逻辑
3. 耗时只进 timings，不进 summary.json（summary 必须逐字节可复现）
"""

import functools
import logging
import time
from contextlib import contextmanager
from typing import Callable, Dict, Iterator, Optional

from src.core.errors import StageError

logger = logging.getLogger(__name__)


class StageTimer:
    """收集各阶段耗时"""

    def __init__(self):
        self.durations: Dict[str, float] = {}

    def record(self, name: str, seconds: float) -> None:
        self.durations[name] = self.durations.get(name, 0.0) + seconds

    def as_dict(self) -> Dict[str, float]:
        return {k: round(v, 4) for k, v in self.durations.items()}


@contextmanager
def trace_span(name: str, timer: Optional[StageTimer] = None) -> Iterator[None]:
    """
    上下文管理器形式的追踪

    Usage:
        with trace_span("committee", timer):
            ...

    阶段内抛出的异常统一包装成 StageError(name, cause)，
    已经是 StageError 的原样抛出（保留最内层阶段名）。
    """
    logger.info(f"▶ {name}")
    start = time.perf_counter()
    try:
        yield
    except StageError:
        raise
    except Exception as e:
        logger.error(f"✗ {name} failed: {e}")
        raise StageError(name, e) from e
    finally:
        elapsed = time.perf_counter() - start
        if timer is not None:
            timer.record(name, elapsed)
    logger.info(f"✓ {name} ({elapsed:.2f}s)")


def trace_stage(name: str) -> Callable:
    """
    阶段追踪装饰器

    Usage:
        @trace_stage("synth")
        def write_synthetic(...):
            ...
    """
    def decorator(func: Callable) -> Callable:
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            with trace_span(name):
                return func(*args, **kwargs)
        return wrapper
    return decorator
