"""
置换族与集合族的相交性
相交谓词、独裁族与 t-独裁族、精确极大族搜索、反例族与稳定性例子、
偏置 Ahlswede-Khachatrian 族
"""
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np
from loguru import logger
from tqdm import tqdm

from core.errors import PreconditionError, ResourceGuardError, StructuralError
from core.logger import progress_disabled
from analysis.cube import BiasedMeasure, CubeFamily, measure, monotone_families, require_exact

Number = Union[float, Fraction]

# 精确置换搜索的上限
SEARCH_CAP = 7
# 交叉模式: n <= 4 枚举全部闭集, n = 5 只看最大团的闭包
CROSS_FULL_CAP = 4
CROSS_SCOPED_CAP = 5
# 默认枚举全部最大见证的上限
ENUMERATE_ALL_CAP = 4
# 一次性生成的置换表 m! 的上限
TABLE_CAP = 10
# 通过 S_n 过滤构造的上限
FILTER_CAP = 8
# 比较块的元素数上限
_CHUNK_ELEMENTS = 1 << 24


# ---------------------------------------------------------------------------
# 置换与置换族
# ---------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Permutation:
    """[n] 上的置换, 一行记法, 1-indexed"""
    image: Tuple[int, ...]

    def __post_init__(self):
        image = tuple(int(v) for v in self.image)
        if sorted(image) != list(range(1, len(image) + 1)):
            raise StructuralError(f"不是 [{len(image)}] 上的双射: {image}")
        object.__setattr__(self, 'image', image)

    @classmethod
    def identity(cls, n: int) -> 'Permutation':
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def transposition(cls, n: int, a: int, b: int) -> 'Permutation':
        image = list(range(1, n + 1))
        image[a - 1], image[b - 1] = b, a
        return cls(tuple(image))

    @property
    def n(self) -> int:
        return len(self.image)

    def __call__(self, i: int) -> int:
        return self.image[i - 1]

    def compose(self, other: 'Permutation') -> 'Permutation':
        """self ∘ other"""
        if self.n != other.n:
            raise StructuralError(f"置换规模不一致: {self.n} vs {other.n}")
        return Permutation(tuple(self.image[j - 1] for j in other.image))

    def inverse(self) -> 'Permutation':
        inv = [0] * self.n
        for i, j in enumerate(self.image, start=1):
            inv[j - 1] = i
        return Permutation(tuple(inv))

    def fixed_points(self) -> List[int]:
        return [i for i, j in enumerate(self.image, start=1) if i == j]

    def __str__(self) -> str:
        return ' '.join(map(str, self.image))


def agreement(sigma: Permutation, tau: Permutation) -> int:
    """|{i : σ(i) = τ(i)}|"""
    if sigma.n != tau.n:
        raise StructuralError(f"置换规模不一致: {sigma.n} vs {tau.n}")
    return sum(1 for a, b in zip(sigma.image, tau.image) if a == b)


def _validate_images(n: int, images: np.ndarray) -> np.ndarray:
    images = np.asarray(images, dtype=np.int16)
    if images.size == 0:
        return np.zeros((0, n), dtype=np.int16)
    if images.ndim != 2 or images.shape[1] != n:
        raise StructuralError(f"置换表形状应为 (k, {n}), 实际 {images.shape}")
    if not np.array_equal(np.sort(images, axis=1), np.broadcast_to(np.arange(1, n + 1), images.shape)):
        raise StructuralError(f"置换表中存在不是 [{n}] 上双射的行")
    return np.unique(images, axis=0)


@dataclass(frozen=True, eq=False)
class PermFamily:
    """
    S_n 的子集

    images 为 (k, n) 的 int16 数组, 行互不相同并按字典序排列
    """
    n: int
    images: np.ndarray

    def __post_init__(self):
        if self.n <= 0:
            raise StructuralError(f"置换规模必须为正: {self.n}")
        images = _validate_images(self.n, self.images)
        images.setflags(write=False)
        object.__setattr__(self, 'images', images)

    @classmethod
    def from_permutations(cls, n: int, perms: Iterable[Permutation]) -> 'PermFamily':
        rows = []
        for perm in perms:
            if perm.n != n:
                raise StructuralError(f"置换规模 {perm.n} 与族的规模 {n} 不一致")
            rows.append(perm.image)
        return cls(n, np.array(rows, dtype=np.int16).reshape(len(rows), n))

    @classmethod
    def empty(cls, n: int) -> 'PermFamily':
        return cls(n, np.zeros((0, n), dtype=np.int16))

    @cached_property
    def members(self) -> frozenset:
        return frozenset(Permutation(tuple(int(v) for v in row)) for row in self.images)

    def __len__(self) -> int:
        return int(self.images.shape[0])

    def __iter__(self) -> Iterator[Permutation]:
        for row in self.images:
            yield Permutation(tuple(int(v) for v in row))

    def __contains__(self, perm: Permutation) -> bool:
        return perm in self.members

    def __eq__(self, other) -> bool:
        if not isinstance(other, PermFamily):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.images, other.images)

    def __hash__(self) -> int:
        return hash((self.n, self.images.tobytes()))

    def _same_n(self, other: 'PermFamily'):
        if self.n != other.n:
            raise StructuralError(f"置换族规模不一致: {self.n} vs {other.n}")

    def __or__(self, other: 'PermFamily') -> 'PermFamily':
        self._same_n(other)
        return PermFamily(self.n, np.concatenate([self.images, other.images]))

    def issubset(self, other: 'PermFamily') -> bool:
        self._same_n(other)
        return self.members <= other.members

    def where(self, mask: np.ndarray) -> 'PermFamily':
        """按布尔掩码取子族"""
        return PermFamily(self.n, self.images[np.asarray(mask, dtype=bool)])

    def as_tuples(self) -> List[Tuple[int, ...]]:
        return [tuple(int(v) for v in row) for row in self.images]


@dataclass(frozen=True)
class UmvirateSpec:
    """t 个约束 i_k -> j_k, i 互不相同, j 互不相同"""
    pairs: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        pairs = tuple((int(i), int(j)) for i, j in self.pairs)
        sources = [i for i, _ in pairs]
        targets = [j for _, j in pairs]
        if len(set(sources)) != len(sources):
            raise PreconditionError(f"t-独裁约束的起点重复: {pairs}")
        if len(set(targets)) != len(targets):
            raise PreconditionError(f"t-独裁约束的终点重复: {pairs}")
        object.__setattr__(self, 'pairs', pairs)

    @classmethod
    def fixing(cls, points: Iterable[int]) -> 'UmvirateSpec':
        """{i -> i : i ∈ points}"""
        return cls(tuple((i, i) for i in points))

    @property
    def t(self) -> int:
        return len(self.pairs)

    def validate_for(self, n: int):
        if self.t > n:
            raise PreconditionError(f"约束个数 t = {self.t} 超过 n = {n}")
        for i, j in self.pairs:
            if not (1 <= i <= n and 1 <= j <= n):
                raise StructuralError(f"约束 {i}->{j} 超出 [1, {n}]")

    def __str__(self) -> str:
        return ','.join(f"{i}->{j}" for i, j in self.pairs) or '∅'


@lru_cache(maxsize=None)
def _index_permutations(m: int) -> np.ndarray:
    # range(m) 的全部置换, 字典序
    if m > TABLE_CAP:
        raise ResourceGuardError(f"置换表要求 m <= {TABLE_CAP}, 实际 m = {m}")
    table = np.array(list(itertools.permutations(range(m))), dtype=np.int16).reshape(-1, m)
    table.setflags(write=False)
    return table


def umvirate(spec: UmvirateSpec, n: int) -> PermFamily:
    """
    t-独裁族 (S_n)_{i1->j1,...,it->jt}, 规模 (n-t)!

    :param spec: 约束
    :param n: 置换规模
    """
    spec.validate_for(n)
    sources = {i for i, _ in spec.pairs}
    targets = {j for _, j in spec.pairs}
    free_pos = np.array([i for i in range(1, n + 1) if i not in sources], dtype=np.int64) - 1
    free_val = np.array([j for j in range(1, n + 1) if j not in targets], dtype=np.int16)
    index = _index_permutations(len(free_pos))

    images = np.zeros((index.shape[0], n), dtype=np.int16)
    for i, j in spec.pairs:
        images[:, i - 1] = j
    if len(free_pos):
        images[:, free_pos] = free_val[index]
    return PermFamily(n, images)


def all_permutations(n: int) -> PermFamily:
    """S_n 全体"""
    return umvirate(UmvirateSpec(), n)


def common_pairs(F: PermFamily) -> List[Tuple[int, int]]:
    """F 中每个置换都满足的 (i, σ(i))"""
    if len(F) == 0:
        raise PreconditionError("空族没有公共约束")
    first = F.images[0]
    constant = np.all(F.images == first, axis=0)
    return [(i + 1, int(first[i])) for i in np.flatnonzero(constant)]


# ---------------------------------------------------------------------------
# 相交谓词
# ---------------------------------------------------------------------------

def agreement_counts(images: np.ndarray, perm: np.ndarray) -> np.ndarray:
    """每一行与给定置换的一致位置数"""
    return np.count_nonzero(images == np.asarray(perm, dtype=np.int16)[None, :], axis=1)


def _covered_by(images: np.ndarray, pairs: Sequence[Tuple[int, int]], t: int) -> np.ndarray:
    # 满足 pairs 中至少 t 个约束的行, 与任何满足全部 pairs 的置换一致至少 t 处
    if not pairs or len(images) == 0:
        return np.zeros(len(images), dtype=bool)
    hits = np.zeros(len(images), dtype=np.int64)
    for i, j in pairs:
        hits += images[:, i - 1] == j
    return hits >= t


def _all_pairs_agree(left: np.ndarray, right: np.ndarray, t: int) -> bool:
    if len(left) == 0 or len(right) == 0:
        return True
    n = left.shape[1]
    chunk = max(1, _CHUNK_ELEMENTS // max(1, len(right) * n))
    for start in range(0, len(left), chunk):
        block = left[start:start + chunk]
        counts = np.count_nonzero(block[:, None, :] == right[None, :, :], axis=2)
        if counts.min() < t:
            return False
    return True


def is_cross_t_intersecting(A: PermFamily, B: PermFamily, t: int) -> bool:
    """
    任意 σ ∈ A, τ ∈ B 至少在 t 个位置一致

    先用对方族的公共约束排除必然满足的行, 剩余部分分块比较
    """
    if t < 0:
        raise PreconditionError(f"t 必须非负: {t}")
    A._same_n(B)
    if len(A) == 0 or len(B) == 0 or t == 0:
        return True
    rest_a = A.images[~_covered_by(A.images, common_pairs(B), t)]
    rest_b = B.images[~_covered_by(B.images, common_pairs(A), t)]
    if len(rest_a) * len(B) <= len(A) * len(rest_b):
        return _all_pairs_agree(rest_a, B.images, t)
    return _all_pairs_agree(A.images, rest_b, t)


def is_t_intersecting(F: PermFamily, t: int) -> bool:
    """F 中任意两个置换 (含 σ = τ) 至少在 t 个位置一致"""
    return is_cross_t_intersecting(F, F, t)


_M1, _M2, _M4 = np.uint64(0x5555555555555555), np.uint64(0x3333333333333333), np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)


def _popcount64(x: np.ndarray) -> np.ndarray:
    x = x - ((x >> np.uint64(1)) & _M1)
    x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
    x = (x + (x >> np.uint64(4))) & _M4
    return (x * _H01) >> np.uint64(56)


def is_cross_t_intersecting_cube(A: CubeFamily, B: CubeFamily, t: int) -> bool:
    """任意 a ∈ A, b ∈ B 满足 |a ∩ b| >= t"""
    A._same_dim(B)
    if not A.members or not B.members or t <= 0:
        return True
    if A.dim > 63:
        return all((a & b).bit_count() >= t for a in A.members for b in B.members)
    left = np.fromiter(A.members, dtype=np.uint64, count=len(A))
    right = np.fromiter(B.members, dtype=np.uint64, count=len(B))
    chunk = max(1, _CHUNK_ELEMENTS // len(right))
    for start in range(0, len(left), chunk):
        counts = _popcount64(left[start:start + chunk, None] & right[None, :])
        if counts.min() < t:
            return False
    return True


def is_t_intersecting_cube(F: CubeFamily, t: int) -> bool:
    """含 a = b, 故每个成员至少含 t 个元素"""
    return is_cross_t_intersecting_cube(F, F, t)


# ---------------------------------------------------------------------------
# 精确极大族搜索
# ---------------------------------------------------------------------------

@dataclass
class SearchResult:
    """
    max_size: 单族模式下为最大族规模, 交叉模式下为最大 |A||B|
    witness_scope: 'all' 为全部最大见证, 'first' 为找到的第一个, 交叉模式 n = 5 为 'closures-of-maximum-cliques'
    """
    max_size: int
    witnesses: list
    witness_count: int
    all_umvirates: bool
    witness_scope: str
    mode: str = 'single'
    umvirate_size: int = 0


def _row_bits(row: np.ndarray) -> int:
    # 第 v 位对应第 v 个顶点
    return int.from_bytes(np.packbits(row, bitorder='little').tobytes(), 'little')


class _AgreementGraph:
    """S_n 上 '一致 >= t' 图, 顶点按度降序重新编号, 邻接为整数位集"""

    def __init__(self, n: int, t: int):
        self.n = n
        self.t = t
        perms = all_permutations(n).images
        size = len(perms)
        adjacency = np.zeros((size, size), dtype=bool)
        for v in range(size):
            adjacency[v] = agreement_counts(perms, perms[v]) >= t
        # 闭邻域 (含自身) 供交叉模式使用
        self.closed = adjacency.copy()
        np.fill_diagonal(adjacency, False)

        degree = adjacency.sum(axis=1)
        order = np.argsort(-degree, kind='stable')
        self.perms = perms[order]
        adjacency = adjacency[np.ix_(order, order)]
        self.closed = self.closed[np.ix_(order, order)]
        self.adj = [_row_bits(row) for row in adjacency]
        self.closed_adj = [_row_bits(row) for row in self.closed]
        self.size = size
        self.full = (1 << size) - 1

    def family(self, bits: int) -> PermFamily:
        vertices = [v for v in range(self.size) if (bits >> v) & 1]
        return PermFamily(self.n, self.perms[vertices])

    def common_neighbours(self, bits: int) -> int:
        """N(A): 与 A 中每个置换都一致 >= t 的置换"""
        result = self.full
        while bits:
            low = bits & -bits
            result &= self.closed_adj[low.bit_length() - 1]
            bits ^= low
        return result

    def closure(self, bits: int) -> int:
        return self.common_neighbours(self.common_neighbours(bits))


def _colour_sort(adj: List[int], candidates: int) -> Tuple[List[int], List[int]]:
    # 贪心着色, 返回按颜色升序的顶点与对应的颜色上界
    order, bounds = [], []
    colour = 0
    uncoloured = candidates
    while uncoloured:
        colour += 1
        available = uncoloured
        while available:
            low = available & -available
            v = low.bit_length() - 1
            available &= ~adj[v] & ~low
            uncoloured &= ~low
            order.append(v)
            bounds.append(colour)
    return order, bounds


def _max_cliques(graph: _AgreementGraph, enumerate_all: bool) -> Tuple[int, List[int]]:
    """分支定界求最大团; enumerate_all 时用严格剪枝保留全部最大团"""
    adj = graph.adj
    best = [0]
    found: List[int] = []

    def expand(clique: int, size: int, candidates: int, top: bool = False):
        order, bounds = _colour_sort(adj, candidates)
        steps = range(len(order) - 1, -1, -1)
        if top:
            steps = tqdm(steps, desc=f"团搜索 S_{graph.n}", disable=progress_disabled())
        for k in steps:
            v, bound = order[k], bounds[k]
            if size + bound < best[0] or (not enumerate_all and size + bound <= best[0]):
                return
            bit = 1 << v
            grown = clique | bit
            rest = candidates & adj[v]
            if rest:
                expand(grown, size + 1, rest)
            elif size + 1 > best[0]:
                best[0] = size + 1
                found.clear()
                found.append(grown)
            elif size + 1 == best[0] and enumerate_all:
                found.append(grown)
            candidates &= ~bit

    if graph.size:
        expand(0, 0, graph.full, top=True)
    return best[0], found


def _is_umvirate(F: PermFamily, t: int) -> bool:
    return len(F) == math.factorial(F.n - t) and len(common_pairs(F)) >= t


def _sorted_families(families: List[PermFamily]) -> List[PermFamily]:
    return sorted(families, key=lambda f: f.images.tobytes())


def max_t_intersecting(n: int, t: int, mode: str = 'single',
                       enumerate_all: Optional[bool] = None) -> SearchResult:
    """
    S_n 中最大 t-相交族 (或交叉 t-相交对的最大 |A||B|) 的精确搜索

    :param n: 置换规模, 不超过 7
    :param t: 相交参数
    :param mode: 'single' 或 'cross'
    :param enumerate_all: 是否枚举全部最大见证, 缺省在 n <= 4 时枚举
    """
    if n > SEARCH_CAP:
        raise ResourceGuardError(f"精确置换搜索要求 n <= {SEARCH_CAP}, 实际 n = {n}")
    if n <= 0 or t < 0:
        raise PreconditionError(f"参数非法: n = {n}, t = {t}")
    if mode not in ('single', 'cross'):
        raise PreconditionError(f"未知的搜索模式: {mode}")
    target = math.factorial(n - t) if t <= n else 0

    if t > n:
        return SearchResult(0, [], 0, False, 'all', mode, target)
    if mode == 'cross':
        return _max_cross(n, t, target)

    if enumerate_all is None:
        enumerate_all = n <= ENUMERATE_ALL_CAP
    if t == 0:
        everything = all_permutations(n)
        return SearchResult(len(everything), [everything], 1, True, 'all', mode, target)

    logger.info(f"搜索 S_{n} 中最大 {t}-相交族 ...")
    graph = _AgreementGraph(n, t)
    size, cliques = _max_cliques(graph, enumerate_all)
    witnesses = _sorted_families([graph.family(c) for c in cliques])
    all_umv = bool(witnesses) and all(_is_umvirate(w, t) for w in witnesses)
    scope = 'all' if enumerate_all else 'first'
    if not enumerate_all:
        witnesses = witnesses[:1]
    logger.info(f"S_{n}, t={t}: 最大规模 {size}, (n-t)! = {target}, 见证 {len(cliques)} 个 ({scope})")
    return SearchResult(size, witnesses, len(cliques) if enumerate_all else len(witnesses),
                        all_umv, scope, mode, target)


def _max_cross(n: int, t: int, target: int) -> SearchResult:
    """交叉模式: 最优对必为闭对 (A = N(B), B = N(A))"""
    if n > CROSS_SCOPED_CAP:
        raise ResourceGuardError(f"交叉模式搜索要求 n <= {CROSS_SCOPED_CAP}, 实际 n = {n}")
    graph = _AgreementGraph(n, t)

    if n <= CROSS_FULL_CAP:
        scope = 'all'
        closed_sets = list(_next_closure(graph))
    else:
        scope = 'closures-of-maximum-cliques'
        _, cliques = _max_cliques(graph, enumerate_all=True)
        closed_sets = sorted({graph.closure(c) for c in cliques})

    best, pairs = 0, []
    for bits in closed_sets:
        partner = graph.common_neighbours(bits)
        product = bits.bit_count() * partner.bit_count()
        if product > best:
            best, pairs = product, [(bits, partner)]
        elif product == best:
            pairs.append((bits, partner))

    witnesses = sorted(((graph.family(a), graph.family(b)) for a, b in pairs),
                       key=lambda ab: (ab[0].images.tobytes(), ab[1].images.tobytes()))
    all_umv = bool(witnesses) and all(
        _is_umvirate(a, t) and _is_umvirate(b, t) and a == b for a, b in witnesses)
    logger.info(f"S_{n}, t={t}, 交叉模式: 最大 |A||B| = {best}, (n-t)!^2 = {target ** 2} ({scope})")
    return SearchResult(best, witnesses, len(witnesses), all_umv, scope, 'cross', target)


def _next_closure(graph: _AgreementGraph) -> Iterator[int]:
    # Ganter 的 NextClosure, 按 lectic 序给出全部闭集
    size = graph.size
    current = graph.closure(0)
    yield current
    while current != graph.full:
        for i in range(size - 1, -1, -1):
            bit = 1 << i
            if current & bit:
                current &= ~bit
                continue
            candidate = graph.closure(current | bit)
            low = bit - 1
            if candidate & low == current & low:
                current = candidate
                yield current
                break
        else:
            return


def maximal_cliques_oracle(n: int, t: int) -> Tuple[int, List[PermFamily]]:
    """
    独立校验: networkx 枚举全部极大团, 返回最大规模与全部最大团

    :param n: 不超过 4
    """
    if n > ENUMERATE_ALL_CAP:
        raise ResourceGuardError(f"团枚举校验要求 n <= {ENUMERATE_ALL_CAP}, 实际 n = {n}")
    perms = all_permutations(n).images
    graph = nx.Graph()
    graph.add_nodes_from(range(len(perms)))
    for v in range(len(perms)):
        counts = agreement_counts(perms, perms[v])
        graph.add_edges_from((v, int(u)) for u in np.flatnonzero(counts >= t) if u > v)
    cliques = list(nx.find_cliques(graph))
    size = max(len(c) for c in cliques)
    best = [PermFamily(n, perms[sorted(c)]) for c in cliques if len(c) == size]
    return size, _sorted_families(best)


# ---------------------------------------------------------------------------
# 命名族
# ---------------------------------------------------------------------------

def counterexample_formula(n: int, t: int) -> int:
    """(t+2)(n-t-1)! - (t+1)(n-t-2)!"""
    return (t + 2) * math.factorial(n - t - 1) - (t + 1) * math.factorial(n - t - 2)


@dataclass
class CounterexampleResult:
    family: PermFamily
    size: int
    formula: int
    umvirate_size: int
    exceeds_umvirate: bool
    t_intersecting: bool
    filter_agrees: Optional[bool] = None


def counterexample_family(n: int, t: int) -> CounterexampleResult:
    """
    [t+2] 中至少有 t+1 个不动点的置换

    直接构造为 t+2 个 t+1-独裁族的并; n <= 8 时再用 S_n 过滤交叉核对

    :param n: 置换规模
    :param t: 相交参数, t+2 <= n
    """
    if t < 0 or t + 2 > n:
        raise PreconditionError(f"反例族要求 0 <= t 且 t+2 <= n: n = {n}, t = {t}")
    head = list(range(1, t + 3))
    parts = [umvirate(UmvirateSpec.fixing(p for p in head if p != k), n).images for k in head]
    family = PermFamily(n, np.concatenate(parts))

    filter_agrees = None
    if n <= FILTER_CAP:
        everything = all_permutations(n).images
        fixed = np.count_nonzero(everything[:, :t + 2] == np.arange(1, t + 3, dtype=np.int16), axis=1)
        filtered = PermFamily(n, everything[fixed >= t + 1])
        filter_agrees = filtered == family

    formula = counterexample_formula(n, t)
    umv = math.factorial(n - t)
    result = CounterexampleResult(family, len(family), formula, umv, len(family) > umv,
                                  is_t_intersecting(family, t), filter_agrees)
    if result.size != formula:
        logger.error(f"反例族规模 {result.size} 与公式 {formula} 不一致")
    return result


@dataclass
class StabilityResult:
    A: PermFamily
    B: PermFamily
    sigma: Permutation
    ratio: float
    ratio_exact: Fraction
    cross_intersecting: bool
    single_family: PermFamily
    single_intersecting: bool
    single_ratio: float


def stability_family(n: int, t: int) -> StabilityResult:
    """
    A = (S_n)_{1->1,...,t->t} ∪ {σ}, σ 交换 1 与 n;
    B = {τ ∈ (S_n)_{1->1,...,t->t} : τ 与 σ 一致 >= t}

    同时报告单族版本 B ∪ {σ}
    """
    if t < 0 or t >= n - 1:
        raise PreconditionError(f"稳定性例子要求 0 <= t < n-1: n = {n}, t = {t}")
    sigma = Permutation.transposition(n, 1, n)
    base = umvirate(UmvirateSpec.fixing(range(1, t + 1)), n)
    sigma_row = PermFamily.from_permutations(n, [sigma])
    A = base | sigma_row
    B = base.where(agreement_counts(base.images, sigma.image) >= t)
    umv = math.factorial(n - t)
    single = B | sigma_row
    # B ∪ {σ} 拆成 B 自身与 σ 对 B 两部分检查
    single_ok = is_t_intersecting(B, t) and is_cross_t_intersecting(sigma_row, B, t)
    return StabilityResult(
        A=A, B=B, sigma=sigma,
        ratio=len(B) / umv, ratio_exact=Fraction(len(B), umv),
        cross_intersecting=is_cross_t_intersecting(A, B, t),
        single_family=single,
        single_intersecting=single_ok,
        single_ratio=len(single) / umv,
    )


def containing_umvirate(A: PermFamily, B: PermFamily, t: int) -> Optional[UmvirateSpec]:
    """同时包含 A 与 B 的 t-独裁族 (取公共约束的前 t 个), 不存在时返回 None"""
    pairs = common_pairs(A | B)
    if len(pairs) < t:
        return None
    return UmvirateSpec(tuple(pairs[:t]))


@dataclass
class StabilityReport:
    ratio: float
    reaches_threshold: bool
    threshold: float
    cross_intersecting: bool
    container: Optional[UmvirateSpec]


def stability_check(A: PermFamily, B: PermFamily, t: int, threshold: Number = Fraction(3, 4)) -> StabilityReport:
    """
    |A||B| / (n-t)!^2 (A 与 B 相同时为 |A| / (n-t)!) 是否达到阈值, 以及 A, B 是否落在同一个 t-独裁族中
    """
    A._same_n(B)
    umv = math.factorial(A.n - t)
    ratio = Fraction(len(A), umv) if A == B else Fraction(len(A) * len(B), umv * umv)
    spec = containing_umvirate(A, B, t)
    return StabilityReport(float(ratio), ratio >= threshold, float(threshold),
                           is_cross_t_intersecting(A, B, t), spec)


@lru_cache(maxsize=256)
def derangement_count(m: int) -> int:
    """D(m): 无不动点的置换个数"""
    if m < 0:
        raise PreconditionError(f"m 必须非负: {m}")
    # D(k) = k·D(k-1) + (-1)^k, 只保留当前值
    value = 1
    for k in range(1, m + 1):
        value = k * value + (1 if k % 2 == 0 else -1)
    return value


# ---------------------------------------------------------------------------
# 偏置 AK 族
# ---------------------------------------------------------------------------

def _ak_params(t: int, r: int):
    if t < 1 or r < 0:
        raise PreconditionError(f"AK 族要求 t >= 1, r >= 0: t = {t}, r = {r}")


def ak_family(t: int, r: int, n: int) -> CubeFamily:
    """F_{t,r} = {x : |x ∩ [t+2r]| >= t+r}"""
    _ak_params(t, r)
    if t + 2 * r > n:
        raise PreconditionError(f"AK 族要求 t+2r <= n: t = {t}, r = {r}, n = {n}")
    require_exact(n, 'AK 族')
    head = (1 << (t + 2 * r)) - 1
    members = frozenset(x for x in range(1 << n) if (x & head).bit_count() >= t + r)
    family = CubeFamily(n, members)
    if len(family) <= 4096 and not is_t_intersecting_cube(family, t):
        raise StructuralError(f"F_{{{t},{r}}} 不是 {t}-相交的")
    return family


def ak_measure(t: int, r: int, p: Number) -> Number:
    """μ_p(F_{t,r}) 的二项尾和, p 为 Fraction 时精确"""
    _ak_params(t, r)
    m = BiasedMeasure(p)
    size = t + 2 * r
    return sum((math.comb(size, k) * m.mass(k, size) for k in range(t + r, size + 1)),
               Fraction(0) if m.exact else 0.0)


def ak_regime(t: int, r: int) -> Tuple[Fraction, Fraction]:
    """r/(t+2r-1) < p < (r+1)/(t+2r+1), r = 0 时下界取 0"""
    lower = Fraction(0) if r == 0 else Fraction(r, t + 2 * r - 1)
    return lower, Fraction(r + 1, t + 2 * r + 1)


def ak_bound_check(t: int, r: int, p: Number) -> Tuple[Number, bool]:
    """(μ_p(F_{t,r}), p 是否在 F_{t,r} 最优的区间内)"""
    lower, upper = ak_regime(t, r)
    pp = Fraction(p) if isinstance(p, (int, Fraction)) else p
    return ak_measure(t, r, p), bool(lower < pp < upper)


@dataclass
class AKSweepRow:
    t: int
    best_r: int
    best_measure: Number
    bound: float
    holds: bool
    admissible_r: List[int] = field(default_factory=list)


def ak_sweep(t_max: int, r_max: int, p: Number, bound_base: float = 0.85) -> List[AKSweepRow]:
    """
    对每个 t <= t_max 取 max_{r <= r_max} μ_p(F_{t,r}), 与 bound_base^t 比较

    p 恰在区间端点时 (如 1/3) 没有整数 r 严格落在区间内, 故取全部 r 的最大值
    """
    rows = []
    for t in range(1, t_max + 1):
        measures = [ak_measure(t, r, p) for r in range(r_max + 1)]
        best_r = max(range(r_max + 1), key=lambda r: (measures[r], -r))
        admissible = [r for r in range(r_max + 1) if ak_bound_check(t, r, p)[1]]
        bound = bound_base ** t
        rows.append(AKSweepRow(t, best_r, measures[best_r], bound, bool(measures[best_r] <= bound), admissible))
    return rows


# ---------------------------------------------------------------------------
# {0,1}^n 上的极大 t-相交族
# ---------------------------------------------------------------------------

CUBE_SEARCH_CAP = 4


def max_t_intersecting_cube(n: int, t: int, p: Number) -> Tuple[Number, CubeFamily]:
    """
    {0,1}^n 中 t-相交族的最大 μ_p: 在 '交 >= t' 图上的加权最大团

    :param n: 不超过 4
    :return: (最大测度, 取到最大值的族)
    """
    require_exact(n, '立方体极大相交族搜索', cap=CUBE_SEARCH_CAP)
    m = BiasedMeasure(p)
    points = [x for x in range(1 << n) if x.bit_count() >= max(t, 0)]
    weight = {x: m.mass(x.bit_count(), n) for x in points}
    points.sort(key=lambda x: (-weight[x], x))
    zero = Fraction(0) if m.exact else 0.0

    best = [zero, []]

    def expand(chosen: List[int], total, candidates: List[int]):
        if total > best[0]:
            best[0], best[1] = total, list(chosen)
        remaining = sum((weight[x] for x in candidates), zero)
        for k, x in enumerate(candidates):
            if total + remaining <= best[0]:
                return
            rest = [y for y in candidates[k + 1:] if (x & y).bit_count() >= t]
            chosen.append(x)
            expand(chosen, total + weight[x], rest)
            chosen.pop()
            remaining -= weight[x]

    expand([], zero, points)
    return best[0], CubeFamily(n, frozenset(best[1]))


def max_t_intersecting_cube_monotone(n: int, t: int, p: Number) -> Number:
    """校验路线: 最优族可取为单调族, 在全部单调族中取 t-相交者的最大测度"""
    m = BiasedMeasure(p)
    best = Fraction(0) if m.exact else 0.0
    for family in monotone_families(n):
        if is_t_intersecting_cube(family, t):
            best = max(best, measure(family, m))
    return best
