"""
Worker 池

对 joblib 的薄封装。每个任务自带派生种子，结果按提交顺序返回，
所以输出与 worker 数无关。
"""

import logging
from typing import Any, Callable, List, Sequence

from joblib import Parallel, delayed

logger = logging.getLogger(__name__)


def run_parallel(fn: Callable[..., Any], tasks: Sequence[tuple], workers: int = 1) -> List[Any]:
    """
    并行执行 fn(*task)。

    Args:
        fn: 任务函数
        tasks: 参数元组列表
        workers: worker 数，<= 1 时顺序执行
    Returns:
        与 tasks 顺序一致的结果列表
    """
    if workers <= 1 or len(tasks) <= 1:
        return [fn(*task) for task in tasks]

    logger.debug(f"dispatching {len(tasks)} tasks to {workers} workers")
    return list(Parallel(n_jobs=workers, prefer="threads")(delayed(fn)(*task) for task in tasks))
