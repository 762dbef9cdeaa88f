"""
随机种子派生

所有随机性都来自一个 master seed，按路径派生子种子：

    master
    ├── ("split", shot)
    ├── ("fit", shot, kind) ── ("tree", i) / ("perm", repeat, feature)
    ├── ("mode", name, repeat)
    └── ("mc", n, trial)

同一路径永远得到同一个种子，与调度顺序和 worker 数无关。
"""

import hashlib
from typing import Union

import numpy as np

PathToken = Union[str, int]


def _token(part: PathToken) -> int:
    """字符串经 sha256 映射为 32 位整数，整数原样使用"""
    if isinstance(part, (bool, np.bool_)):
        return int(part)
    if isinstance(part, (int, np.integer)):
        if part < 0:
            raise ValueError(f"seed path tokens must be non-negative, got {part}")
        return int(part)
    digest = hashlib.sha256(str(part).encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "little")


def derive_seed(master: int, *path: PathToken) -> int:
    """按路径派生一个 32 位子种子"""
    seq = np.random.SeedSequence(entropy=int(master), spawn_key=tuple(_token(p) for p in path))
    return int(seq.generate_state(1, dtype=np.uint32)[0])


def make_rng(master: int, *path: PathToken) -> np.random.Generator:
    """按路径派生一个独立的 numpy Generator"""
    return np.random.default_rng(derive_seed(master, *path))
