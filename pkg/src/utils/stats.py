"""
统计检验工具
Wilson 区间与均匀性卡方检验, 基于 scipy.stats
"""
import math
from typing import Sequence, Tuple

import numpy as np
from scipy import stats

from core.errors import PreconditionError


def wilson_interval(successes: int, trials: int, confidence: float = 0.99) -> Tuple[float, float]:
    """
    二项比例的 Wilson 置信区间

    :param successes: 成功次数
    :param trials: 试验次数
    :param confidence: 置信水平
    :return: (下界, 上界)
    """
    if trials <= 0:
        raise PreconditionError(f"试验次数必须为正: {trials}")
    if not 0 <= successes <= trials:
        raise PreconditionError(f"成功次数 {successes} 超出 [0, {trials}]")
    ci = stats.binomtest(int(successes), int(trials)).proportion_ci(confidence_level=confidence, method='wilson')
    return float(ci.low), float(ci.high)


def chi_square_uniform(counts: Sequence[int]) -> Tuple[float, float]:
    """
    计数对均匀分布的卡方检验

    :return: (统计量, p 值)
    """
    observed = np.asarray(counts, dtype=np.float64)
    if observed.size < 2 or observed.sum() <= 0:
        raise PreconditionError("卡方检验至少需要两个类别且总数为正")
    result = stats.chisquare(observed)
    return float(result.statistic), float(result.pvalue)


def within_sigmas(mean: float, p: float, samples: int, sigmas: float = 3.0) -> bool:
    """样本均值是否落在 p ± sigmas·sqrt(p(1-p)/samples) 内"""
    return abs(mean - p) <= sigmas * math.sqrt(p * (1 - p) / samples)
