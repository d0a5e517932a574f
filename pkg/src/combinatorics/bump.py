"""
密度凸起与证明常数审计
字典族中的密度凸起检测、限制链自举、以及归纳证明中各条显式不等式的数值实例化
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
from loguru import logger

from core.errors import PreconditionError, ResourceGuardError
from combinatorics.families import (
    FILTER_CAP, PermFamily, UmvirateSpec, all_permutations, derangement_count, is_cross_t_intersecting,
)

Number = Union[int, float, Fraction]

# 证明所在的区间 n >= 500t
REGIME_FACTOR = 500
# 默认的密度常数 c
DEFAULT_DENSITY = Fraction(2, 3)


# ---------------------------------------------------------------------------
# 审计记录
# ---------------------------------------------------------------------------

@dataclass
class Check:
    """一条不等式: 名称、关系式、两侧取值与是否成立"""
    name: str
    relation: str
    lhs: Any
    rhs: Any
    holds: bool

    def to_dict(self) -> Dict[str, Any]:
        return {'name': self.name, 'relation': self.relation, 'lhs': self.lhs, 'rhs': self.rhs, 'holds': self.holds}


@dataclass
class ConstantAudit:
    inputs: Dict[str, Any]
    checks: List[Check] = field(default_factory=list)
    bounds: Dict[str, Any] = field(default_factory=dict)

    @property
    def all_hold(self) -> bool:
        return all(c.holds for c in self.checks)

    def failed(self) -> List[str]:
        return [c.name for c in self.checks if not c.holds]

    def add(self, name: str, relation: str, lhs, rhs, holds: bool):
        self.checks.append(Check(name, relation, _readable(lhs), _readable(rhs), bool(holds)))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'inputs': dict(self.inputs),
            'checks': [c.to_dict() for c in self.checks],
            'bounds': dict(self.bounds),
            'all_hold': self.all_hold,
        }


def _readable(value):
    # 有理数只在最后一步转成浮点, 大整数原样保留
    if isinstance(value, Fraction):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    return value


def _exact(value: Number, name: str) -> Fraction:
    try:
        return Fraction(value)
    except (TypeError, ValueError) as e:
        raise PreconditionError(f"{name} 不是有效的数: {value!r}") from e


def _sqrt_exceeds(delta: Fraction, bound: Fraction) -> bool:
    """sqrt(delta) > bound, 平方后精确比较"""
    if delta < 0:
        return False
    return bound < 0 or delta > bound * bound


# ---------------------------------------------------------------------------
# 密度凸起
# ---------------------------------------------------------------------------

def _pair_counts(images: np.ndarray, n: int) -> np.ndarray:
    """counts[i-1, j-1] = #{σ : σ(i) = j}"""
    counts = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        counts[i] = np.bincount(images[:, i].astype(np.int64) - 1, minlength=n)
    return counts


@dataclass
class BumpReport:
    best_i: int
    best_j: int
    ratio: float
    ratio_exact: Fraction
    table: np.ndarray
    counts: np.ndarray


def density_bump(F: PermFamily) -> BumpReport:
    """
    找出相对密度最大的字典族 (S_n)_{i->j}

    table[i-1, j-1] = |F_{i->j}|·n/|F|, 最大值取按行优先的第一个

    :param F: 非空置换族
    """
    if len(F) == 0:
        raise PreconditionError("空族没有密度凸起")
    n, size = F.n, len(F)
    counts = _pair_counts(F.images, n)
    flat = int(np.argmax(counts))
    i, j = divmod(flat, n)
    table = counts.astype(np.float64) * n / size
    ratio_exact = Fraction(int(counts[i, j]) * n, size)
    logger.debug(f"密度凸起 {i + 1}->{j + 1}: {float(ratio_exact):.4f}")
    return BumpReport(i + 1, j + 1, float(ratio_exact), ratio_exact, table, counts)


# ---------------------------------------------------------------------------
# 限制链
# ---------------------------------------------------------------------------

@dataclass
class ChainStep:
    i: int
    j: int
    retained_a: float
    retained_b: float
    kept_a: int
    kept_b: int


@dataclass
class ChainReport:
    steps: List[ChainStep]
    final_containment: bool
    spec: UmvirateSpec
    cross_intersecting: bool


def _prefix_mask(images: np.ndarray, pairs: List[Tuple[int, int]]) -> np.ndarray:
    mask = np.ones(len(images), dtype=bool)
    for i, j in pairs:
        mask &= images[:, i - 1] == j
    return mask


def restriction_chain(A: PermFamily, B: PermFamily, t: int) -> ChainReport:
    """
    逐步把 A, B 限制到同一个字典族上, 共 t 步

    每一步在未使用的起点与终点中选 (i, j) 使 min(|A_prefix|/|A|, |B_prefix|/|B|) 最大,
    平局取按行优先的第一个. 保留比例每步都从原始族重新计数

    :param A: 非空置换族
    :param B: 非空置换族
    :param t: 步数
    :return: final_containment 为真表示 A, B 都落在找到的 t-独裁族中
    """
    A._same_n(B)
    if len(A) == 0 or len(B) == 0:
        raise PreconditionError("限制链要求 A, B 非空")
    n = A.n
    if not 0 <= t <= n:
        raise PreconditionError(f"t 必须在 [0, {n}] 内: {t}")

    cross = is_cross_t_intersecting(A, B, t)
    if not cross:
        logger.warning(f"A 与 B 不是交叉 {t}-相交的, 限制链仅作诊断")

    size_a, size_b = len(A), len(B)
    pairs: List[Tuple[int, int]] = []
    steps: List[ChainStep] = []
    for _ in range(t):
        counts_a = _pair_counts(A.images[_prefix_mask(A.images, pairs)], n)
        counts_b = _pair_counts(B.images[_prefix_mask(B.images, pairs)], n)
        # 交叉相乘比较两个比例, 保持整数
        score = np.minimum(counts_a * size_b, counts_b * size_a)
        score[[i - 1 for i, _ in pairs], :] = -1
        score[:, [j - 1 for _, j in pairs]] = -1
        i, j = divmod(int(np.argmax(score)), n)
        pairs.append((i + 1, j + 1))
        kept_a, kept_b = int(counts_a[i, j]), int(counts_b[i, j])
        steps.append(ChainStep(i + 1, j + 1, kept_a / size_a, kept_b / size_b, kept_a, kept_b))
        logger.debug(f"限制链第 {len(steps)} 步 {i + 1}->{j + 1}: A 保留 {kept_a}/{size_a}, B 保留 {kept_b}/{size_b}")

    final = not steps or (steps[-1].kept_a == size_a and steps[-1].kept_b == size_b)
    return ChainReport(steps, final, UmvirateSpec(tuple(pairs)), cross)


# ---------------------------------------------------------------------------
# 集中度论证的算术
# ---------------------------------------------------------------------------

def _check_regime(audit: ConstantAudit, n: int, t: int):
    holds = n >= REGIME_FACTOR * t
    audit.add('regime', 'n >= 500t', n, REGIME_FACTOR * t, holds)
    if not holds:
        logger.warning(f"(n, t) = ({n}, {t}) 不在 n >= 500t 的区间内, 结果仅供参考")


def _validate_nt(n: int, t: int):
    if t < 1 or n <= t:
        raise PreconditionError(f"要求 1 <= t < n: n = {n}, t = {t}")


def audit_claim52(n: int, t: int, a: Optional[Number] = None, c: Number = DEFAULT_DENSITY) -> ConstantAudit:
    """
    字典族集中度论证的算术

    判别式 Δ(c) = 1 - 16(n-1)/(c(n-t)^2) (c = 2/3 时为 1 - 24(n-1)/(n-t)^2),
    根区间 (n/2)(1 ± sqrt(Δ)), 以及 (4/c)·n(n-1)/((n-50)(n-t)^2) <= 7/n 的链条;
    全部用有理数精确比较, 只在记录时转成浮点

    :param n: 置换规模
    :param t: 相交参数
    :param a: 密度凸起因子 |A_{1->i}| = a|A|/n, 缺省取 n
    :param c: 乘积下界中的常数
    """
    _validate_nt(n, t)
    if n <= 50:
        raise PreconditionError(f"集中度论证要求 n > 50: {n}")
    c = _exact(c, 'c')
    if not 0 < c <= 1:
        raise PreconditionError(f"常数 c 必须满足 0 < c <= 1: {c}")
    a = Fraction(n) if a is None else _exact(a, 'a')
    if a <= 0:
        raise PreconditionError(f"a 必须为正: {a}")

    audit = ConstantAudit(inputs={'n': n, 't': t, 'a': _readable(a), 'c': str(c)})
    _check_regime(audit, n, t)

    m = n - t
    delta = 1 - Fraction(16 * (n - 1)) / (c * m * m)
    sqrt_delta = math.sqrt(delta) if delta >= 0 else float('nan')
    audit.add('delta_positive', 'Δ > 0', delta, 0, delta > 0)

    shrunk = Fraction(499 * n, 500)
    delta_floor = 1 - (16 / c) * n / (shrunk * shrunk)
    audit.add('delta_lower_bound', 'Δ >= 1 - (16/c)·n/(499n/500)^2', delta, delta_floor, delta >= delta_floor)
    frame = 1 - Fraction(25, n)
    audit.add('delta_frame', '1 - (16/c)·n/(499n/500)^2 >= 1 - 25/n', delta_floor, frame, delta_floor >= frame)
    edge = 1 - Fraction(100, n)
    audit.add('frame_square', '1 - 25/n > (1 - 100/n)^2', frame, edge * edge, frame > edge * edge)

    root_ok = _sqrt_exceeds(delta, edge)
    audit.add('sqrt_delta', 'sqrt(Δ) > 1 - 100/n', sqrt_delta, edge, root_ok)
    audit.add('lower_root', '(n/2)(1 - sqrt(Δ)) < 50', n / 2 * (1 - sqrt_delta), 50, root_ok)
    audit.add('upper_root', '(n/2)(1 + sqrt(Δ)) > n - 50', n / 2 * (1 + sqrt_delta), n - 50, root_ok)

    # a/n 必须满足 x^2 - x + (1-Δ)/4 >= 0, 即落在两根之外
    x = a / n
    quadratic = x * x - x + (1 - delta) / 4
    audit.add('bump_hypothesis', 'a > 50', a, 50, a > 50)
    audit.add('quadratic_at_a', '(a/n)^2 - a/n + (1-Δ)/4 >= 0', quadratic, 0, quadratic >= 0)
    audit.add('concentration', 'a >= n - 50', a, n - 50, a >= n - 50)

    retention = (4 / c) * Fraction(n * (n - 1), (n - 50) * m * m)
    retention_frame = (4 / c) * Fraction(n * n) / (Fraction(9 * n, 10) * shrunk * shrunk)
    seven = Fraction(7, n)
    audit.add('retention_chain', '(4/c)·n(n-1)/((n-50)(n-t)^2) <= (4/c)·n^2/((9n/10)(499n/500)^2)',
              retention, retention_frame, retention <= retention_frame)
    audit.add('retention_bound', '(4/c)·n^2/((9n/10)(499n/500)^2) <= 7/n',
              retention_frame, seven, retention_frame <= seven)
    audit.bounds.update({
        'delta': float(delta),
        'lower_root': n / 2 * (1 - sqrt_delta),
        'upper_root': n / 2 * (1 + sqrt_delta),
        'retention': float(retention),
    })
    return audit


def floor_factorial_over_e(m: int) -> int:
    """
    floor(m!/e)

    m!·Σ_{k<=m} (-1)^k/k! = D(m), 余项符号为 (-1)^(m+1) 且绝对值小于 1,
    所以 m 为偶数时向下取到 D(m) - 1
    """
    if m < 0:
        raise PreconditionError(f"m 必须非负: {m}")
    return derangement_count(m) - (1 if m % 2 == 0 else 0)


def audit_bootstrap(n: int, t: int) -> ConstantAudit:
    """
    自举步骤的常数: 每步保留 1 - 7/n, t 步后的乘积, 以及 (1 - 1/e) 因子与阶乘的精确比较

    :param n: 置换规模
    :param t: 相交参数
    """
    _validate_nt(n, t)
    if n <= 7:
        raise PreconditionError(f"自举审计要求 n > 7: {n}")
    audit = ConstantAudit(inputs={'n': n, 't': t})
    _check_regime(audit, n, t)

    step = 1 - Fraction(7, n)
    both = step ** (2 * t)
    audit.add('retention_power', '(1 - 7/n)^(2t) >= 0.94', both, 0.94, both >= Fraction(94, 100))
    exp_floor = math.exp(-28 / 500)
    audit.add('exp_floor', 'e^(-28/500) > 0.94', exp_floor, 0.94, exp_floor > 0.94)
    audit.add('exp_chain', '0.94 > 2/3', 0.94, Fraction(2, 3), Fraction(94, 100) > Fraction(2, 3))

    linear = 1 - Fraction(7 * t, n)
    audit.add('bernoulli', '(1 - 7/n)^t >= 1 - 7t/n', step ** t, linear, step ** t >= linear)
    audit.add('single_retention', '1 - 7t/n >= 0.98', linear, 0.98, linear >= Fraction(98, 100))

    scale = Fraction(100, 98) ** 2
    factor = float(scale) * (1 - math.exp(-1))
    audit.add('stability_factor', '(100/98)^2·(1 - 1/e) < 2/3', factor, Fraction(2, 3), factor < 2 / 3)

    m = n - t
    m_fact = math.factorial(m)
    floor_e = floor_factorial_over_e(m)
    ceil_part = m_fact - floor_e
    audit.add('derangement_floor', 'D(n-t) >= floor((n-t)!/e)',
              derangement_count(m), floor_e, derangement_count(m) >= floor_e)
    # (100/98)^2·(n-t)!·⌈(1-1/e)(n-t)!⌉ < (n-t)!^2, 约去一个 (n-t)!
    product_ok = 100 * 100 * ceil_part < 98 * 98 * m_fact
    audit.add('stability_product', '(100/98)^2·(n-t)!·ceil((1-1/e)(n-t)!) < (n-t)!^2',
              float(scale) * (ceil_part / m_fact), 1, product_ok)

    audit.add('second_assertion', '0.94·(3/4) > 2/3', Fraction(94, 100) * Fraction(3, 4), Fraction(2, 3),
              Fraction(94, 100) * Fraction(3, 4) > Fraction(2, 3))
    # A = B: (100/98)^2·⌈(1-1/e)(n-t)!⌉^2 < (3/4)^2·(n-t)!^2, 两边开方后为 400·⌈·⌉ < 294·(n-t)!
    same_ok = 400 * ceil_part < 294 * m_fact
    audit.add('single_family_product', '(100/98)^2·ceil((1-1/e)(n-t)!)^2 < (3/4)^2·(n-t)!^2',
              float(scale) * (ceil_part / m_fact) ** 2, Fraction(9, 16), same_ok)
    audit.bounds['ceil_ratio'] = ceil_part / m_fact
    return audit


# ---------------------------------------------------------------------------
# 按 t 的大小分情形的不等式
# ---------------------------------------------------------------------------

def _log_binomial(n: int, t: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(t + 1) - math.lgamma(n - t + 1)


def audit_prop41_cases(n: int, t: int, k: int, c: Number, g: Number,
                       g_prime: Optional[Number] = None, p: Optional[Number] = None,
                       s: Optional[int] = None) -> ConstantAudit:
    """
    密度凸起论证三种情形的数值骨架

    情形边界 2n/ln n, n/(ln n)^2, n/(10k) 只报告不裁决; 各情形中 |S| 的上界在给定参数下实例化

    :param n: 置换规模
    :param t: 相交参数
    :param k: 凸起因子
    :param c: 乘积下界常数
    :param g: 全局性参数
    :param g_prime: 第二次全局限制的参数, 缺省同 g
    :param p: 嵌入后的偏置, 缺省 10 ln n / n
    :param s: 若给出, 检查 |S| = s 是否落在各上界内
    """
    if n < 2 or t < 1 or k < 1:
        raise PreconditionError(f"要求 n >= 2, t >= 1, k >= 1: n = {n}, t = {t}, k = {k}")
    c, g = float(c), float(g)
    g_prime = g if g_prime is None else float(g_prime)
    if not 0 < c < 1:
        raise PreconditionError(f"常数 c 必须满足 0 < c < 1: {c}")
    if g <= 1 or g_prime <= 1:
        raise PreconditionError(f"全局性参数必须大于 1: g = {g}, g' = {g_prime}")
    ln_n = math.log(n)
    p = min(1.0, 10 * ln_n / n) if p is None else float(p)
    if not 0 < p <= 1:
        raise PreconditionError(f"偏置 p 必须满足 0 < p <= 1: {p}")

    audit = ConstantAudit(inputs={'n': n, 't': t, 'k': k, 'c': c, 'g': g, 'g_prime': g_prime, 'p': p, 's': s})
    medium_bound = n / (2 * k)
    small_bound = 1 / (p * 2 * g)
    audit.bounds.update({
        'large_t_boundary': 2 * n / ln_n,
        'small_t_boundary': n / ln_n ** 2,
        'hypothesis_boundary': n / (10 * k),
        'medium_bound': medium_bound,
        'small_bound': small_bound,
    })

    # 情形一
    audit.add('hypothesis', 't <= n/(10k)', t, n / (10 * k), t <= n / (10 * k))
    large_lhs = (math.log(1 / c) / n + 2 + 2 * t * ln_n / n) / (0.5 * ln_n)
    audit.add('large_t_restriction', '(ln(1/c)/n + 2 + 2t·ln n/n)/((1/2)·ln n) <= 1/(2k)',
              large_lhs, 1 / (2 * k), large_lhs <= 1 / (2 * k))
    log_binom = _log_binomial(n, t)
    audit.add('binomial_step', 'ln C(n,t) <= n·ln 2', log_binom, n * math.log(2), log_binom <= n * math.log(2))
    audit.add('power_balance', 'n·ln 2 >= (t/2)·ln n', n * math.log(2), t / 2 * ln_n, n * math.log(2) >= t / 2 * ln_n)
    audit.add('large_t_boundary', 't < 2n/ln n', t, 2 * n / ln_n, t < 2 * n / ln_n)

    # 情形二
    medium_s = (math.log(1 / c) + 4 * n + 2 * t * ln_n) / math.log(g)
    audit.add('medium_restriction', '(ln(1/c) + 4n + 2t·ln n)/ln g <= n/(2k)',
              medium_s, medium_bound, medium_s <= medium_bound)
    medium_s2 = (math.log(2 / c) + 4 * n + 2 * t * ln_n) / math.log(g_prime)
    audit.add('medium_second_restriction', "(ln(2/c) + 4n + 2t·ln n)/ln g' <= n/(2g)",
              medium_s2, n / (2 * g), medium_s2 <= n / (2 * g))

    # 情形三
    small_s = (math.log(8 / c) + 2 * t * ln_n) / math.log(g_prime)
    audit.add('small_restriction', "(ln(8/c) + 2t·ln n)/ln g' <= 1/(2pg)",
              small_s, small_bound, small_s <= small_bound)
    audit.add('small_t_boundary', 't <= n/(ln n)^2', t, n / ln_n ** 2, t <= n / ln_n ** 2)

    if s is not None:
        audit.add('bump_union_bound', '1 - (k/n)·|S| >= 1/2', 1 - k / n * s, 0.5, 1 - k / n * s >= 0.5)
        audit.add('global_union_bound', '1 - g·p·|S| >= 1/2', 1 - g * p * s, 0.5, 1 - g * p * s >= 0.5)
    return audit


# ---------------------------------------------------------------------------
# 归纳基础与 r(n, t)
# ---------------------------------------------------------------------------

@dataclass
class BasisBound:
    exact_count: int
    binom_bound: int
    two_n_bound: int
    enumerated: Optional[int] = None

    @property
    def chain_holds(self) -> bool:
        return self.exact_count <= self.binom_bound <= self.two_n_bound


def induction_basis_bound(n: int, t: int, enumerate_check: Optional[bool] = None) -> BasisBound:
    """
    与恒等置换至少 t 处一致的置换个数, 及其上界 C(n,t)(n-t)! <= 2^n(n-t)!

    精确值用 Σ_{j>=t} C(n,j)·D(n-j); n <= 8 时再枚举 S_n 核对

    :param enumerate_check: 是否枚举核对, 缺省 n <= 8 时核对
    """
    if n < 1 or not 0 <= t <= n:
        raise PreconditionError(f"要求 n >= 1 且 0 <= t <= n: n = {n}, t = {t}")
    if enumerate_check is None:
        enumerate_check = n <= FILTER_CAP
    if enumerate_check and n > FILTER_CAP:
        raise ResourceGuardError(f"枚举核对要求 n <= {FILTER_CAP}, 实际 n = {n}")

    exact = sum(math.comb(n, j) * derangement_count(n - j) for j in range(t, n + 1))
    tail = math.factorial(n - t)
    result = BasisBound(exact, math.comb(n, t) * tail, 2 ** n * tail)
    if enumerate_check:
        images = all_permutations(n).images
        fixed = np.count_nonzero(images == np.arange(1, n + 1, dtype=np.int16), axis=1)
        result.enumerated = int(np.count_nonzero(fixed >= t))
        if result.enumerated != exact:
            logger.error(f"枚举结果 {result.enumerated} 与闭式 {exact} 不一致")
    return result


def _floor_c0t(t: int, c0: Number) -> int:
    return math.floor(_exact(c0, 'c0') * t)


def r_of(n: int, t: int, c0: Number) -> int:
    """r(n, t) = max(4^(2⌊c0·t⌋ - n), 1)"""
    base = _floor_c0t(t, c0)
    if n < base:
        raise PreconditionError(f"要求 n >= ⌊c0·t⌋ = {base}: n = {n}")
    exponent = 2 * base - n
    return 4 ** exponent if exponent > 0 else 1


def r_monotonicity(n: int, t: int, c0: Number) -> ConstantAudit:
    """
    归纳中用到的两条单调关系: r(n-1, t) <= 4·r(n, t), r(n-1, t-1) <= r(n, t)

    要求 n - 1 >= ⌊c0·t⌋ 且 t >= 1
    """
    if t < 1:
        raise PreconditionError(f"t 必须 >= 1: {t}")
    if n - 1 < _floor_c0t(t, c0):
        raise PreconditionError(f"要求 n - 1 >= ⌊c0·t⌋: n = {n}, t = {t}, c0 = {c0}")
    audit = ConstantAudit(inputs={'n': n, 't': t, 'c0': _readable(_exact(c0, 'c0'))})
    current = r_of(n, t, c0)
    shorter = r_of(n - 1, t, c0)
    fewer = r_of(n - 1, t - 1, c0)
    # r 是 4 的幂, 记录指数, 比较仍用整数
    audit.add('shrink_n', 'r(n-1, t) <= 4·r(n, t)', _log4(shorter), 1 + _log4(current), shorter <= 4 * current)
    audit.add('shrink_both', 'r(n-1, t-1) <= r(n, t)', _log4(fewer), _log4(current), fewer <= current)
    audit.bounds['log4_r'] = _log4(current)
    return audit


def _log4(value: int) -> int:
    return (value.bit_length() - 1) // 2
