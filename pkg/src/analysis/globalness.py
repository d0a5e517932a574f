"""
全局性分析
g-全局性认证、g-全局限制的提取、第 d 层不等式审计、尖锐阈值与全局交叉相交探针

所有限制测度来自一次三进制 zeta 变换 (每个坐标: 固定为 0 / 固定为 1 / 自由)
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from loguru import logger

from core.errors import PreconditionError, ResourceGuardError
from analysis.cube import (
    TOL, BiasedMeasure, CubeFamily, Restriction, is_monotone, measure, popcounts,
    require_exact, restrict,
)
from analysis.fourier import RealFunctionOnCube, level_weight, rho_upper_bound_check, transform

Number = Union[float, Fraction]

# 全部 3^n 个限制模式的上限
FULL_PATTERN_CAP = 14
# 精确有理数 (object 数组) 的上限
EXACT_TABLE_CAP = 10

MODE_FULL = 'full'
MODE_ONES = 'ones'


@dataclass(frozen=True, eq=False)
class RestrictionTable:
    """
    全部限制的测度表 μ(f_{S->x})

    full 模式下以三进制下标存放 (坐标 1 为最高位, 数字 0/1 为固定取值, 2 为自由);
    ones 模式下以子集掩码 S 存放 μ(f_{S->1})
    """
    dim: int
    mode: str
    values: np.ndarray
    sizes: np.ndarray

    @property
    def exact(self) -> bool:
        return self.values.dtype == object

    @property
    def base_index(self) -> int:
        """空限制 (全部自由) 的下标"""
        return len(self.values) - 1 if self.mode == MODE_FULL else 0

    def decode(self, index: int) -> Restriction:
        n = self.dim
        if self.mode == MODE_ONES:
            return Restriction.ones(i + 1 for i in range(n) if (index >> i) & 1)
        if n == 0:
            return Restriction()
        digits = np.unravel_index(int(index), (3,) * n)
        coords = [k + 1 for k in range(n) if digits[k] != 2]
        values = [int(digits[k]) for k in range(n) if digits[k] != 2]
        return Restriction(tuple(coords), tuple(values))


def _ternary_sizes(n: int) -> np.ndarray:
    sizes = np.zeros(1, dtype=np.int64)
    fixed = np.array([1, 1, 0], dtype=np.int64)
    for _ in range(n):
        sizes = (sizes[:, None] + fixed[None, :]).reshape(-1)
    return sizes


def restriction_measures(F: CubeFamily, m: BiasedMeasure) -> RestrictionTable:
    """
    计算全部限制的测度

    n <= 14 时枚举全部 3^n 个模式; 14 < n <= 24 时要求 F 单调, 只枚举置 1 的 2^n 个模式

    :param F: 族
    :param m: 偏置测度, 精确偏置且 n <= 10 时结果为 Fraction
    :return: 限制测度表
    """
    n = F.dim
    require_exact(n, '限制枚举')
    exact = m.exact and n <= EXACT_TABLE_CAP
    p = m.p if exact else float(m.p)
    q = 1 - p
    flags = F.to_indicator()
    if exact:
        indicator = np.array([Fraction(int(v)) for v in flags], dtype=object)
    else:
        indicator = flags.astype(np.float64)

    if n <= FULL_PATTERN_CAP:
        if n == 0:
            return RestrictionTable(0, MODE_FULL, indicator.copy(), np.zeros(1, dtype=np.int64))
        arr = indicator.reshape((2,) * n).transpose(tuple(range(n - 1, -1, -1)))
        for k in range(n):
            v0 = np.take(arr, 0, axis=k)
            v1 = np.take(arr, 1, axis=k)
            arr = np.stack([v0, v1, q * v0 + p * v1], axis=k)
        return RestrictionTable(n, MODE_FULL, np.ascontiguousarray(arr).reshape(-1), _ternary_sizes(n))

    if not is_monotone(F):
        raise ResourceGuardError(f"n = {n} > {FULL_PATTERN_CAP} 时只支持单调族 (只枚举置 1 的限制)")
    logger.debug(f"n = {n}: 单调族, 只枚举 2^{n} 个置 1 限制")
    arr = indicator.copy()
    for i in range(n):
        view = arr.reshape(1 << (n - i - 1), 2, 1 << i)
        v0 = view[:, 0, :].copy()
        v1 = view[:, 1, :].copy()
        view[:, 0, :] = q * v0 + p * v1
        view[:, 1, :] = v1
    return RestrictionTable(n, MODE_ONES, arr, np.asarray(popcounts(n), dtype=np.int64))


def _pick(table: RestrictionTable, candidates: np.ndarray) -> int:
    # 固定的平局规则: |S| 最小, 其次 S 字典序, 其次 x 字典序
    sizes = table.sizes[candidates]
    candidates = candidates[sizes == sizes.min()]

    def tie_key(index) -> tuple:
        r = table.decode(int(index))
        return r.coords, r.values

    return int(min(candidates, key=tie_key))


def _require_nonempty(F: CubeFamily, name: str = 'F'):
    if not F.members:
        raise PreconditionError(f"{name} 为空族, 全局性无定义")


@dataclass(frozen=True)
class GlobalnessCertificate:
    """g_min: 使族为 g-全局的最小 g; witness: 取到约束的限制; ratios: |S| -> 最坏密度比"""
    g_min: float
    witness: Restriction
    ratios: Dict[int, float] = field(default_factory=dict)
    mode: str = MODE_FULL


def certify_globalness(F: CubeFamily, m: BiasedMeasure) -> GlobalnessCertificate:
    """
    穷举全部限制, 求 g_min = max(1, max_{S,x} (μ(f_{S->x})/μ(f))^{1/|S|})

    :param F: 非空族
    :param m: 偏置测度
    :return: 全局性证书
    """
    _require_nonempty(F)
    table = restriction_measures(F, m)
    values = table.values.astype(np.float64)
    base = values[table.base_index]
    ratio = values / base
    sizes = table.sizes

    score = np.ones_like(ratio)
    nonzero = sizes > 0
    score[nonzero] = ratio[nonzero] ** (1.0 / sizes[nonzero])
    best = float(score.max())
    g_min = max(1.0, best)
    candidates = np.flatnonzero(score >= g_min - TOL * g_min)
    witness = table.decode(_pick(table, candidates))

    worst = np.zeros(F.dim + 1)
    np.maximum.at(worst, sizes, ratio)
    ratios = {int(s): float(worst[s]) for s in range(F.dim + 1)}
    logger.debug(f"g_min = {g_min:.6g}, 见证限制 {witness}")
    return GlobalnessCertificate(g_min, witness, ratios, table.mode)


def is_g_global(F: CubeFamily, m: BiasedMeasure, g: Number) -> bool:
    """μ(f_{S->x}) <= g^{|S|} μ(f) 对全部限制成立"""
    return certify_globalness(F, m).g_min <= float(g) * (1 + TOL)


def extract_global_restriction(F: CubeFamily, g: Number, m: BiasedMeasure) -> Tuple[Restriction, CubeFamily]:
    """
    取 μ(f_{S->x}) / g^{|S|} 最大的限制, 所得 F' = F_{S->x} 是 g-全局的,
    且 μ(F') >= g^{|S|} μ(F)

    :param F: 非空族
    :param g: 全局性参数, 必须 > 1
    :param m: 偏置测度
    :return: (限制, 限制后的族)
    """
    _require_nonempty(F)
    if not g > 1:
        raise PreconditionError(f"全局性参数 g 必须大于 1: {g}")
    table = restriction_measures(F, m)
    sizes = table.sizes

    if table.exact and isinstance(g, (int, Fraction)):
        g_exact = Fraction(g)
        powers = np.array([g_exact ** k for k in range(F.dim + 1)], dtype=object)
        score = table.values / powers[sizes]
        best = max(score)
        candidates = np.flatnonzero(np.array([s == best for s in score]))
    else:
        values = table.values.astype(np.float64)
        score = values / float(g) ** sizes
        best = float(score.max())
        candidates = np.flatnonzero(score >= best - TOL * best)

    r = table.decode(_pick(table, candidates))
    restricted = restrict(F, r)
    logger.debug(f"g = {g}: 提取限制 {r}, |F'| = {len(restricted)}")
    return r, restricted


@dataclass(frozen=True)
class LevelDAuditRow:
    d: int
    lhs: float
    frame: float
    implied_c2: float
    within_c1_range: Optional[bool] = None


def level_d_audit(F: CubeFamily, m: BiasedMeasure, g: Number, d_max: int,
                  c1: Optional[Number] = None) -> List[LevelDAuditRow]:
    """
    第 d 层权重与框架 μ^2 g^{2d} ln^d(1/μ) / d^d 的比较, 报告隐含常数 (lhs/frame)^{1/d}

    不给出通过/失败结论

    :param F: 族, 要求 0 < μ < 1
    :param m: 偏置测度
    :param g: 全局性参数
    :param d_max: 最高层数
    :param c1: 可选, 标记 d <= c1 ln(1/μ)
    """
    mu = float(measure(F, m))
    if mu <= 0 or mu >= 1:
        raise PreconditionError(f"level-d 审计要求 0 < μ < 1, 实际 μ = {mu}")
    if not 1 <= d_max <= F.dim:
        raise PreconditionError(f"d_max 必须在 [1, {F.dim}] 内: {d_max}")
    gf = float(g)
    if gf <= 0:
        raise PreconditionError(f"全局性参数 g 必须为正: {g}")

    coeffs = transform(RealFunctionOnCube.indicator(F), m)
    log_inv = math.log(1 / mu)
    rows = []
    for d in range(1, d_max + 1):
        lhs = level_weight(coeffs, d)
        frame = mu ** 2 * gf ** (2 * d) * log_inv ** d / d ** d
        implied = (lhs / frame) ** (1.0 / d)
        within = None if c1 is None else bool(d <= float(c1) * log_inv)
        rows.append(LevelDAuditRow(d, lhs, frame, implied, within))
    return rows


@dataclass(frozen=True)
class SharpThresholdProbe:
    mu_p: Number
    mu_third: Number
    lemma_rhs: float
    rho: float
    rho_bound: float
    rho_check: bool


def sharp_threshold_probe(F: CubeFamily, p: Number, t: int) -> SharpThresholdProbe:
    """
    报告 μ_p(F)、μ_{1/3}(F) 与 0.99^t, 不下结论

    :param F: 单调族
    :param p: 偏置, 建议 p <= 1/3
    :param t: 相交参数
    """
    if not is_monotone(F):
        raise PreconditionError("F 不是单调族")
    m = BiasedMeasure(p)
    if m.p > Fraction(1, 3):
        logger.warning(f"p = {p} > 1/3, 超出尖锐阈值探针的适用范围")
    third = BiasedMeasure(Fraction(1, 3) if m.exact else 1 / 3)
    rho, bound, check = rho_upper_bound_check(p)
    return SharpThresholdProbe(measure(F, m), measure(F, third), 0.99 ** t, rho, bound, check)


@dataclass(frozen=True)
class GlobalCrossProbe:
    min_measure: Number
    rhs: float
    mu_a: Number
    mu_b: Number
    g_a: float
    g_b: float


def global_cross_probe(A: CubeFamily, B: CubeFamily, p: Number, g: Number, t: int,
                       c3: Number) -> GlobalCrossProbe:
    """
    全局、单调、交叉 t-相交的一对族: 报告 min(μ_p(A), μ_p(B)) 与 e^{-c3 t / (p g^2)}

    任一前提不满足时报错并指出是哪一个

    :param c3: 探索性常数
    """
    from combinatorics.families import is_cross_t_intersecting_cube

    m = BiasedMeasure(p)
    for name, fam in (('A', A), ('B', B)):
        if not fam.members:
            raise PreconditionError(f"{name} 为空族, 探针无意义")
        if not is_monotone(fam):
            raise PreconditionError(f"{name} 不是单调族")
    cert_a = certify_globalness(A, m)
    cert_b = certify_globalness(B, m)
    for name, cert in (('A', cert_a), ('B', cert_b)):
        if cert.g_min > float(g) * (1 + TOL):
            raise PreconditionError(f"{name} 不是 {g}-全局的 (g_min = {cert.g_min:.6g}, 见证 {cert.witness})")
    if not is_cross_t_intersecting_cube(A, B, t):
        raise PreconditionError(f"A, B 不是交叉 {t}-相交的")

    mu_a, mu_b = measure(A, m), measure(B, m)
    rhs = math.exp(-float(c3) * t / (float(p) * float(g) ** 2))
    return GlobalCrossProbe(min(mu_a, mu_b), rhs, mu_a, mu_b, cert_a.g_min, cert_b.g_min)
