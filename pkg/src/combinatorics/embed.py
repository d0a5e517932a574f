"""
嵌入与耦合
S_n -> [n]^n -> {0,1}^{n^2} 的嵌入、上闭包提升、x 之下均匀取 σ 的耦合,
以及 μ_p(U) 的 Hall 条件界
"""
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from core.errors import PreconditionError, ResourceGuardError, StructuralError
from analysis.cube import BiasedMeasure, CubeFamily, measure, up_closure
from combinatorics.families import PermFamily, Permutation, all_permutations
from utils.parallel import parallel_map, spawn_seeds, split_samples
from utils.stats import chi_square_uniform, wilson_interval

Number = Union[float, Fraction]

# 精确均匀采样 (按匹配计数) 的上限
EXACT_SAMPLER_CAP = 8
# 预计算全部 2^{n^2} 个矩阵的上限
PROSPECT_TABLE_CAP = 4
# 精确 μ_p(U) 的上限
HALL_EXACT_CAP = 4
HALL_EXACT_AUTO = 3
LIFT_CAP = 4


@dataclass(frozen=True, slots=True)
class BitMatrix:
    """
    {0,1}^{n^2} 中的点, 按行排列: 第 i 行第 j 列为第 (i-1)n + j 个坐标 (掩码第 (i-1)n + j - 1 位)
    """
    n: int
    mask: int

    def __post_init__(self):
        if self.n <= 0:
            raise StructuralError(f"矩阵规模必须为正: {self.n}")
        if not 0 <= self.mask < 1 << (self.n * self.n):
            raise StructuralError(f"掩码超出 {self.n}x{self.n} 矩阵")

    @classmethod
    def from_rows(cls, rows: Sequence[str]) -> 'BitMatrix':
        n = len(rows)
        mask = 0
        for i, row in enumerate(rows):
            if len(row) != n or set(row) - {'0', '1'}:
                raise StructuralError(f"第 {i + 1} 行应为 {n} 个 0/1 字符: {row!r}")
            for j, ch in enumerate(row):
                if ch == '1':
                    mask |= 1 << (i * n + j)
        return cls(n, mask)

    @classmethod
    def from_array(cls, bits: np.ndarray) -> 'BitMatrix':
        bits = np.asarray(bits, dtype=bool)
        n = bits.shape[0]
        if bits.shape != (n, n):
            raise StructuralError(f"矩阵必须是方阵: {bits.shape}")
        flat = np.flatnonzero(bits.reshape(-1))
        return cls(n, sum(1 << int(k) for k in flat))

    def has(self, i: int, j: int) -> bool:
        return bool((self.mask >> ((i - 1) * self.n + j - 1)) & 1)

    def row_columns(self, i: int) -> List[int]:
        """第 i 行为 1 的列 (1-indexed)"""
        block = (self.mask >> ((i - 1) * self.n)) & ((1 << self.n) - 1)
        return [j + 1 for j in range(self.n) if (block >> j) & 1]

    def rows(self) -> List[str]:
        return [''.join('1' if self.has(i, j) else '0' for j in range(1, self.n + 1))
                for i in range(1, self.n + 1)]

    def to_array(self) -> np.ndarray:
        return np.array([[self.has(i, j) for j in range(1, self.n + 1)] for i in range(1, self.n + 1)])

    @property
    def weight(self) -> int:
        return self.mask.bit_count()

    def __le__(self, other: 'BitMatrix') -> bool:
        return self.n == other.n and self.mask & ~other.mask == 0

    def __str__(self) -> str:
        return ''.join(self.rows())


@dataclass(frozen=True, slots=True)
class WordPoint:
    """U_n = [n]^n 中的词"""
    letters: Tuple[int, ...]

    def __post_init__(self):
        letters = tuple(int(v) for v in self.letters)
        n = len(letters)
        if n == 0 or any(not 1 <= v <= n for v in letters):
            raise StructuralError(f"词的每个字母必须在 [1, {n}] 内: {letters}")
        object.__setattr__(self, 'letters', letters)

    @property
    def n(self) -> int:
        return len(self.letters)


def _embed_letters(letters: Sequence[int]) -> int:
    n = len(letters)
    mask = 0
    for i, j in enumerate(letters):
        mask |= 1 << (i * n + j - 1)
    return mask


def embed_perm(sigma: Permutation) -> BitMatrix:
    """第 i 行只在 σ(i) 列为 1"""
    return BitMatrix(sigma.n, _embed_letters(sigma.image))


def embed_word(w: WordPoint) -> BitMatrix:
    """第 i 行只在 w_i 列为 1, 各行可以重复列"""
    return BitMatrix(w.n, _embed_letters(w.letters))


def common_ones(x: BitMatrix, y: BitMatrix) -> int:
    """|x ∧ y|"""
    if x.n != y.n:
        raise StructuralError(f"矩阵规模不一致: {x.n} vs {y.n}")
    return (x.mask & y.mask).bit_count()


def embed_family(F: PermFamily) -> CubeFamily:
    """E(F) ⊂ {0,1}^{n^2}"""
    return CubeFamily(F.n * F.n, frozenset(_embed_letters(row) for row in F.as_tuples()))


def embed_word_family(words: Iterable[WordPoint]) -> CubeFamily:
    words = list(words)
    if not words:
        raise PreconditionError("词族不能为空")
    n = words[0].n
    if any(w.n != n for w in words):
        raise StructuralError("词族中词的长度不一致")
    return CubeFamily(n * n, frozenset(_embed_letters(w.letters) for w in words))


def word_agreement(w: WordPoint, v: WordPoint) -> int:
    if w.n != v.n:
        raise StructuralError(f"词的长度不一致: {w.n} vs {v.n}")
    return sum(1 for a, b in zip(w.letters, v.letters) if a == b)


def is_cross_t_intersecting_words(W: Sequence[WordPoint], V: Sequence[WordPoint], t: int) -> bool:
    return all(word_agreement(w, v) >= t for w in W for v in V)


def is_t_intersecting_words(W: Sequence[WordPoint], t: int) -> bool:
    return is_cross_t_intersecting_words(W, W, t)


@dataclass(frozen=True)
class EmbeddingFactor:
    point_mass_ratio: float
    bound: float
    holds: bool


def embedding_measure_factor(n: int, p: Number) -> EmbeddingFactor:
    """
    嵌入点的 μ_p 测度与 [n]^n 上均匀测度之比 n^n p^n (1-p)^{n^2-n}, 与 e^{-n} 比较

    p = 1/n 时比值不小于 e^{-n}
    """
    BiasedMeasure(p)
    pf = float(p)
    log_ratio = n * math.log(n) + n * math.log(pf) + (n * n - n) * math.log1p(-pf)
    ratio = math.exp(log_ratio)
    bound = math.exp(-n)
    return EmbeddingFactor(ratio, bound, log_ratio >= -n - 1e-12)


# ---------------------------------------------------------------------------
# Hall 条件
# ---------------------------------------------------------------------------

def _augment(u: int, graph: List[List[int]], visit: List[bool], match: List[Optional[int]]) -> bool:
    for v in graph[u]:
        if not visit[v]:
            visit[v] = True
            if match[v] is None or _augment(match[v], graph, visit, match):
                match[v] = u
                return True
    return False


def _row_graph(x: BitMatrix) -> List[List[int]]:
    return [[j - 1 for j in x.row_columns(i)] for i in range(1, x.n + 1)]


def perfect_matching(x: BitMatrix, graph: Optional[List[List[int]]] = None) -> Optional[Permutation]:
    """
    增广路求 G_x 的完美匹配, O(V·E)

    :return: 匹配对应的置换 (行 i -> 列 σ(i)), 不存在时为 None
    """
    graph = graph if graph is not None else _row_graph(x)
    n = x.n
    match: List[Optional[int]] = [None] * n
    for u in range(n):
        if not _augment(u, graph, [False] * n, match):
            return None
    image = [0] * n
    for col, row in enumerate(match):
        image[row] = col + 1
    return Permutation(tuple(image))


def hall_membership(x: BitMatrix) -> bool:
    """x ∈ U (E(S_n) 的上闭包) 当且仅当 G_x 有完美匹配"""
    return perfect_matching(x) is not None


def _has_perfect_matching_scipy(bits: np.ndarray) -> bool:
    graph = csr_matrix(bits.astype(np.int8))
    matching = maximum_bipartite_matching(graph, perm_type='column')
    return bool(np.all(matching >= 0))


# ---------------------------------------------------------------------------
# 耦合
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CouplingSample:
    x: BitMatrix
    sigma: Permutation
    dominated: bool
    prospects: Optional[int]
    exact_uniform: bool


def _count_matchings(rows: List[int], n: int):
    # rows[i] 为第 i 行的列位集; 返回按 (行, 已用列) 计数的函数
    @lru_cache(maxsize=None)
    def count(i: int, used: int) -> int:
        if i == n:
            return 1
        total = 0
        free = rows[i] & ~used
        while free:
            low = free & -free
            total += count(i + 1, used | low)
            free ^= low
        return total
    return count


def _sample_exact(rows: List[int], n: int, rng: np.random.Generator) -> Tuple[Optional[Permutation], int]:
    count = _count_matchings(rows, n)
    total = count(0, 0)
    if total == 0:
        return None, 0
    image, used = [], 0
    for i in range(n):
        options, weights = [], []
        free = rows[i] & ~used
        while free:
            low = free & -free
            options.append(low)
            weights.append(count(i + 1, used | low))
            free ^= low
        pick = int(rng.integers(sum(weights)))
        for low, w in zip(options, weights):
            if pick < w:
                break
            pick -= w
        used |= low
        image.append(low.bit_length())
    return Permutation(tuple(image)), total


def _sample_randomized(x: BitMatrix, rng: np.random.Generator) -> Optional[Permutation]:
    # 随机打乱邻接顺序的增广路匹配, 不保证在全部匹配上均匀
    graph = _row_graph(x)
    for adj in graph:
        rng.shuffle(adj)
    return perfect_matching(x, graph)


def _draw_matrix(n: int, p: float, rng: np.random.Generator) -> BitMatrix:
    return BitMatrix.from_array(rng.random((n, n)) < p)


def coupling_sample(n: int, p: Number, seed=None) -> CouplingSample:
    """
    x ~ μ_p, 再在 {σ : E(σ) <= x} 中均匀取 σ; 没有候选时在 S_n 中均匀取

    n <= 8 时按匹配计数精确均匀; 更大的 n 用随机增广路, exact_uniform = False

    :param n: 置换规模
    :param p: 偏置, 0 < p <= 1
    :param seed: 随机种子或 Generator
    """
    BiasedMeasure(p, allow_one=True)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    x = _draw_matrix(n, float(p), rng)

    if n <= EXACT_SAMPLER_CAP:
        rows = [sum(1 << (j - 1) for j in x.row_columns(i)) for i in range(1, n + 1)]
        sigma, prospects = _sample_exact(rows, n, rng)
        exact = True
    else:
        logger.warning(f"n = {n} > {EXACT_SAMPLER_CAP}: 随机增广路采样, σ 不保证均匀")
        sigma, prospects, exact = _sample_randomized(x, rng), None, False

    if sigma is None:
        sigma = Permutation(tuple(int(v) + 1 for v in rng.permutation(n)))
        return CouplingSample(x, sigma, False, prospects, exact)
    return CouplingSample(x, sigma, embed_perm(sigma) <= x, prospects, exact)


@lru_cache(maxsize=None)
def _prospect_table(n: int) -> Tuple[np.ndarray, np.ndarray]:
    # 每个 x ∈ {0,1}^{n^2} 下的候选 σ (按 S_n 字典序编号)
    perms = all_permutations(n)
    perm_masks = np.array([_embed_letters(row) for row in perms.as_tuples()], dtype=np.int64)
    xs = np.arange(1 << (n * n), dtype=np.int64)
    dominated = (perm_masks[None, :] & ~xs[:, None]) == 0
    return dominated, perm_masks


@dataclass
class CouplingMarginalReport:
    n: int
    p: float
    samples: int
    counts: List[int]
    chi2: float
    p_value: float
    dominated_fraction: float
    exact_uniform: bool


def _marginal_chunk(args) -> Tuple[np.ndarray, int]:
    n, p, size, seed_seq = args
    rng = np.random.default_rng(seed_seq)
    factorial = math.factorial(n)
    counts = np.zeros(factorial, dtype=np.int64)
    dominated_total = 0
    if n <= PROSPECT_TABLE_CAP:
        table, _ = _prospect_table(n)
        weights = 1 << np.arange(n * n, dtype=np.int64)
        xs = (rng.random((size, n * n)) < p).astype(np.int64) @ weights
        for x in xs:
            options = np.flatnonzero(table[x])
            if len(options):
                counts[options[rng.integers(len(options))]] += 1
                dominated_total += 1
            else:
                counts[rng.integers(factorial)] += 1
        return counts, dominated_total

    index = {row: k for k, row in enumerate(all_permutations(n).as_tuples())}
    for _ in range(size):
        sample = coupling_sample(n, p, rng)
        counts[index[sample.sigma.image]] += 1
        dominated_total += int(sample.dominated)
    return counts, dominated_total


def coupling_marginal_test(n: int, p: Number, samples: int, seed=None, workers: int = 1) -> CouplingMarginalReport:
    """
    σ 的边缘分布计数、均匀性卡方 p 值与被支配比例

    :param n: 置换规模 (需要枚举 S_n)
    """
    BiasedMeasure(p, allow_one=True)
    if samples <= 0:
        raise PreconditionError(f"样本数必须为正: {samples}")
    if n > EXACT_SAMPLER_CAP:
        raise ResourceGuardError(f"边缘分布检验要求 n <= {EXACT_SAMPLER_CAP}, 实际 n = {n}")
    shares = split_samples(samples, workers)
    seeds = spawn_seeds(seed, len(shares))
    parts = parallel_map(_marginal_chunk, [(n, float(p), s, q) for s, q in zip(shares, seeds)],
                         workers=workers, desc='耦合采样')
    counts = sum(c for c, _ in parts)
    dominated = sum(d for _, d in parts)
    chi2, p_value = chi_square_uniform(counts)
    logger.info(f"耦合边缘检验 n={n}, p={p}: 卡方 p 值 {p_value:.4g}, 被支配比例 {dominated / samples:.4f}")
    return CouplingMarginalReport(n, float(p), samples, [int(c) for c in counts], chi2, p_value,
                                  dominated / samples, True)


# ---------------------------------------------------------------------------
# μ_p(U) 的界
# ---------------------------------------------------------------------------

def hall_threshold(n: int) -> Tuple[float, bool]:
    """
    p = min(1, 10 ln n / n), 以及 10 ln n / n >= 1 时的空洞区间标记

    :return: (p, vacuous)
    """
    if n < 2:
        raise PreconditionError(f"n 必须至少为 2: {n}")
    raw = 10 * math.log(n) / n
    return min(1.0, raw), raw >= 1


def union_bound_residual(n: int, p: Number) -> float:
    """
    Σ_{k=1}^{n} C(n,k) C(n,k-1) (1-p)^{k(n-k+1)}, 以有理数精确求和后转为浮点
    """
    q = 1 - Fraction(p)
    total = sum((math.comb(n, k) * math.comb(n, k - 1) * q ** (k * (n - k + 1)) for k in range(1, n + 1)),
                Fraction(0))
    return float(total)


@dataclass
class HallBound:
    n: int
    p: Number
    mu_u: Number
    exact: bool
    ci_low: float
    ci_high: float
    successes: Optional[int]
    samples: Optional[int]
    union_bound_residual: float
    threshold: float
    vacuous: bool


def _exact_mu_u(n: int, p: Number) -> Number:
    m = BiasedMeasure(p, allow_one=True)
    size = n * n
    total = Fraction(0) if m.exact else 0.0
    for mask in range(1 << size):
        if hall_membership(BitMatrix(n, mask)):
            k = mask.bit_count()
            total += m.p ** k * (1 - m.p) ** (size - k)
    return total


def _hall_chunk(args) -> int:
    n, p, size, seed_seq = args
    rng = np.random.default_rng(seed_seq)
    hits = 0
    for _ in range(size):
        if _has_perfect_matching_scipy(rng.random((n, n)) < p):
            hits += 1
    return hits


def hall_bound(n: int, p: Number, samples: int = 10000, seed=None, mode: str = 'auto',
               workers: int = 1, confidence: float = 0.99) -> HallBound:
    """
    μ_p(U): n <= 3 (或 mode='exact', n <= 4) 时精确枚举, 否则蒙特卡洛加 Wilson 区间;
    同时给出联合界余项

    :param n: 矩阵规模
    :param p: 偏置, 0 < p <= 1
    :param samples: 蒙特卡洛样本数
    :param mode: auto / exact / mc
    """
    BiasedMeasure(p, allow_one=True)
    if samples <= 0:
        raise PreconditionError(f"样本数必须为正: {samples}")
    if mode not in ('auto', 'exact', 'mc'):
        raise PreconditionError(f"未知模式: {mode}")
    threshold, vacuous = hall_threshold(n) if n >= 2 else (1.0, True)
    if vacuous:
        logger.warning(f"n = {n}: 10 ln n / n >= 1, p 被截断为 1, 该区间是空洞的")
    residual = union_bound_residual(n, p)

    use_exact = mode == 'exact' or (mode == 'auto' and n <= HALL_EXACT_AUTO)
    if use_exact:
        if n > HALL_EXACT_CAP:
            raise ResourceGuardError(f"精确 μ_p(U) 要求 n <= {HALL_EXACT_CAP}, 实际 n = {n}")
        mu = _exact_mu_u(n, p)
        return HallBound(n, p, mu, True, float(mu), float(mu), None, None, residual, threshold, vacuous)

    shares = split_samples(samples, workers)
    seeds = spawn_seeds(seed, len(shares))
    hits = sum(parallel_map(_hall_chunk, [(n, float(p), s, q) for s, q in zip(shares, seeds)],
                            workers=workers, desc='Hall 蒙特卡洛'))
    low, high = wilson_interval(hits, samples, confidence)
    logger.info(f"μ_p(U) 估计 n={n}, p={float(p):.4f}: {hits}/{samples}, Wilson [{low:.4f}, {high:.4f}]")
    return HallBound(n, p, hits / samples, False, low, high, hits, samples, residual, threshold, vacuous)


@dataclass(frozen=True)
class LiftedMeasure:
    mu_lifted: Number
    mu_uniform: Fraction
    half_bound_holds: bool


def lifted_measure(A: PermFamily, p: Number) -> LiftedMeasure:
    """
    μ_p^{n^2}(E(A) 的上闭包) 与 S_n 上均匀测度 |A|/n! 的比较, 检查前者不小于后者的一半

    :param A: 置换族, n <= 4
    """
    if A.n > LIFT_CAP:
        raise ResourceGuardError(f"提升测度要求 n <= {LIFT_CAP}, 实际 n = {A.n}")
    lifted = up_closure(embed_family(A))
    mu_lifted = measure(lifted, BiasedMeasure(p))
    mu_uniform = Fraction(len(A), math.factorial(A.n))
    return LiftedMeasure(mu_lifted, mu_uniform, bool(mu_lifted >= mu_uniform / 2))
