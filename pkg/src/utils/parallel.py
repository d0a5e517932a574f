"""
并行任务池
workers == 1 时就地顺序执行, 结果始终按输入顺序返回
"""
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

import numpy as np
from tqdm import tqdm

from core.logger import progress_disabled

T = TypeVar('T')
R = TypeVar('R')


def parallel_map(func: Callable[[T], R], items: Iterable[T], workers: int = 1,
                 desc: Optional[str] = None) -> List[R]:
    """
    :param func: 模块级函数 (需可 pickle)
    :param items: 任务参数
    :param workers: 进程数
    :param desc: 进度条描述
    :return: 与输入同序的结果
    """
    items = list(items)
    disable = progress_disabled() or len(items) <= 1
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in tqdm(items, desc=desc, disable=disable)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(tqdm(pool.map(func, items), total=len(items), desc=desc, disable=disable))


def spawn_seeds(seed: Optional[int], count: int) -> List[np.random.SeedSequence]:
    """每个 worker 一条独立的随机流"""
    return np.random.SeedSequence(seed).spawn(count)


def split_samples(total: int, parts: int) -> List[int]:
    """把 total 个样本尽量平均地分给 parts 份"""
    parts = max(1, min(parts, total))
    base, extra = divmod(total, parts)
    return [base + (1 if k < extra else 0) for k in range(parts)]
