"""
布尔立方体上的族
{0,1}^n 的子集、偏置测度、限制、单调性、上闭包与 FKG 相关性检查

点编码为无符号整数, 坐标 1 位于最低位
"""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from core.errors import PreconditionError, ResourceGuardError, StructuralError

# 精确模式 (需要枚举 2^n 个点) 的维数上限
EXACT_CAP = 24
# 测度比较的绝对容差
TOL = 1e-12

Bias = Union[float, Fraction]


def require_exact(n: int, what: str = '精确枚举', cap: int = EXACT_CAP):
    """
    维数守卫

    :param n: 维数
    :param what: 操作名, 用于报错
    :param cap: 上限
    """
    if n > cap:
        raise ResourceGuardError(f"{what}要求 n <= {cap}, 实际 n = {n}")


@lru_cache(maxsize=None)
def popcounts(n: int) -> np.ndarray:
    """
    0..2^n-1 每个掩码的 1 的个数

    :param n: 维数
    :return: 长度 2^n 的 int64 数组 (只读)
    """
    require_exact(n, 'popcount 表')
    table = np.zeros(1, dtype=np.int64)
    for _ in range(n):
        table = np.concatenate([table, table + 1])
    table.setflags(write=False)
    return table


@dataclass(frozen=True, slots=True)
class CubePoint:
    """{0,1}^n 中的一个点"""
    dim: int
    mask: int

    def __post_init__(self):
        if self.dim <= 0:
            raise StructuralError(f"维数必须为正: {self.dim}")
        if not 0 <= self.mask < (1 << self.dim):
            raise StructuralError(f"点 {self.mask:#x} 超出 {self.dim} 维立方体")

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> 'CubePoint':
        """按坐标 1..n 的 0/1 序列构造"""
        mask = 0
        for i, b in enumerate(bits):
            if b not in (0, 1):
                raise StructuralError(f"坐标 {i + 1} 的取值必须是 0/1: {b}")
            mask |= b << i
        return cls(len(bits), mask)

    @property
    def bits(self) -> Tuple[int, ...]:
        return tuple((self.mask >> i) & 1 for i in range(self.dim))

    @property
    def weight(self) -> int:
        return self.mask.bit_count()

    def __le__(self, other: 'CubePoint') -> bool:
        return self.dim == other.dim and self.mask & ~other.mask == 0


@dataclass(frozen=True, slots=True)
class BiasedMeasure:
    """
    偏置乘积测度 μ_p

    Fraction 类型的 p 给出精确有理数测度; allow_one 仅供退化采样使用
    """
    p: Bias
    allow_one: bool = False

    def __post_init__(self):
        p = self.p
        if isinstance(p, bool) or not isinstance(p, (int, float, Fraction)):
            raise PreconditionError(f"偏置 p 必须是数值: {p!r}")
        if isinstance(p, int):
            object.__setattr__(self, 'p', Fraction(p))
            p = self.p
        upper_ok = p <= 1 if self.allow_one else p < 1
        if not (0 < p and upper_ok):
            bound = '0 < p <= 1' if self.allow_one else '0 < p < 1'
            raise PreconditionError(f"偏置 p 必须满足 {bound}: {p}")

    @property
    def exact(self) -> bool:
        return isinstance(self.p, Fraction)

    def mass(self, k: int, n: int) -> Bias:
        """一个重量为 k 的点在 n 维下的测度 p^k (1-p)^(n-k)"""
        return self.p ** k * (1 - self.p) ** (n - k)

    def point_masses(self, n: int) -> np.ndarray:
        """
        所有 2^n 个点的测度

        :param n: 维数
        :return: 精确模式下为 object 数组 (Fraction), 否则为 float64
        """
        by_weight = [self.mass(k, n) for k in range(n + 1)]
        if self.exact:
            return np.array(by_weight, dtype=object)[popcounts(n)]
        return np.asarray(by_weight, dtype=np.float64)[popcounts(n)]


@dataclass(frozen=True, slots=True)
class CubeFamily:
    """
    {0,1}^n 的子集族

    members 为点掩码的 frozenset; 维数可以很大 (嵌入 {0,1}^{n^2}),
    只有需要枚举整个立方体的操作受 EXACT_CAP 限制
    """
    dim: int
    members: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.dim < 0:
            raise StructuralError(f"维数不能为负: {self.dim}")
        members = frozenset(int(m) for m in self.members)
        limit = 1 << self.dim
        for m in members:
            if not 0 <= m < limit:
                raise StructuralError(f"成员 {m:#x} 超出 {self.dim} 维立方体")
        object.__setattr__(self, 'members', members)

    @classmethod
    def from_points(cls, dim: int, points: Iterable[Union[int, CubePoint]]) -> 'CubeFamily':
        masks = []
        for point in points:
            if isinstance(point, CubePoint):
                if point.dim != dim:
                    raise StructuralError(f"点的维数 {point.dim} 与族的维数 {dim} 不一致")
                masks.append(point.mask)
            else:
                masks.append(point)
        return cls(dim, frozenset(masks))

    @classmethod
    def from_indicator(cls, dim: int, indicator: np.ndarray) -> 'CubeFamily':
        """由长度 2^n 的布尔数组构造"""
        indicator = np.asarray(indicator, dtype=bool)
        if indicator.shape != (1 << dim,):
            raise StructuralError(f"指示数组长度应为 2^{dim}, 实际 {indicator.shape}")
        return cls(dim, frozenset(int(m) for m in np.flatnonzero(indicator)))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self.members))

    def __contains__(self, item) -> bool:
        if isinstance(item, CubePoint):
            return item.dim == self.dim and item.mask in self.members
        return item in self.members

    def _same_dim(self, other: 'CubeFamily'):
        if self.dim != other.dim:
            raise StructuralError(f"族的维数不一致: {self.dim} vs {other.dim}")

    def __and__(self, other: 'CubeFamily') -> 'CubeFamily':
        self._same_dim(other)
        return CubeFamily(self.dim, self.members & other.members)

    def __or__(self, other: 'CubeFamily') -> 'CubeFamily':
        self._same_dim(other)
        return CubeFamily(self.dim, self.members | other.members)

    def points(self) -> List[CubePoint]:
        return [CubePoint(self.dim, m) for m in self]

    def to_indicator(self) -> np.ndarray:
        """长度 2^n 的布尔指示数组"""
        require_exact(self.dim, '指示数组')
        arr = np.zeros(1 << self.dim, dtype=bool)
        if self.members:
            arr[np.fromiter(self.members, dtype=np.int64, count=len(self.members))] = True
        return arr


@dataclass(frozen=True, slots=True)
class Restriction:
    """
    限制 S -> x: 把坐标集 S 固定为 x

    coords 按升序存放, values 随之重排
    """
    coords: Tuple[int, ...] = ()
    values: Tuple[int, ...] = ()

    def __post_init__(self):
        coords, values = tuple(self.coords), tuple(self.values)
        if len(coords) != len(values):
            raise StructuralError(f"限制的坐标数 {len(coords)} 与取值数 {len(values)} 不一致")
        if len(set(coords)) != len(coords):
            raise StructuralError(f"限制的坐标重复: {coords}")
        for v in values:
            if v not in (0, 1):
                raise StructuralError(f"限制的取值必须是 0/1: {values}")
        pairs = sorted(zip(coords, values))
        object.__setattr__(self, 'coords', tuple(c for c, _ in pairs))
        object.__setattr__(self, 'values', tuple(v for _, v in pairs))

    @classmethod
    def ones(cls, coords: Iterable[int]) -> 'Restriction':
        coords = tuple(coords)
        return cls(coords, (1,) * len(coords))

    def __len__(self) -> int:
        return len(self.coords)

    @property
    def masks(self) -> Tuple[int, int]:
        """(坐标掩码, 取值掩码)"""
        coord_mask = value_mask = 0
        for c, v in zip(self.coords, self.values):
            coord_mask |= 1 << (c - 1)
            value_mask |= v << (c - 1)
        return coord_mask, value_mask

    def __str__(self) -> str:
        if not self.coords:
            return '∅'
        return '{' + ','.join(map(str, self.coords)) + '}->(' + ','.join(map(str, self.values)) + ')'


# ---------------------------------------------------------------------------
# 构造
# ---------------------------------------------------------------------------

def full_cube(n: int) -> CubeFamily:
    require_exact(n, '全立方体')
    return CubeFamily(n, frozenset(range(1 << n)))


def subcube(n: int, coords: Iterable[int]) -> CubeFamily:
    """
    {x : x_i = 1 对所有 i ∈ coords}, 即 t-独裁立方体族

    :param n: 维数
    :param coords: 要求为 1 的坐标 (1-indexed)
    """
    require_exact(n, '子立方体')
    smask = 0
    for c in coords:
        if not 1 <= c <= n:
            raise StructuralError(f"坐标 {c} 超出 [1, {n}]")
        smask |= 1 << (c - 1)
    all_points = np.arange(1 << n, dtype=np.int64)
    return CubeFamily(n, frozenset(int(m) for m in all_points[(all_points & smask) == smask]))


def dictatorship(n: int, i: int) -> CubeFamily:
    """{x : x_i = 1}"""
    return subcube(n, [i])


def from_predicate(n: int, predicate: Callable[[int], bool]) -> CubeFamily:
    """满足谓词的所有点 (谓词作用于掩码)"""
    require_exact(n, '谓词族')
    return CubeFamily(n, frozenset(m for m in range(1 << n) if predicate(m)))


# ---------------------------------------------------------------------------
# 测度与限制
# ---------------------------------------------------------------------------

def measure(F: CubeFamily, m: BiasedMeasure, n: Optional[int] = None) -> Bias:
    """
    偏置测度 μ_p(F) = Σ_{x∈F} p^{|x|}(1-p)^{n-|x|}

    :param F: 族
    :param m: 偏置测度, p 为 Fraction 时结果精确
    :param n: 期望的维数, 给出时必须与 F.dim 一致
    :return: [0, 1] 内的测度
    """
    if n is not None and n != F.dim:
        raise StructuralError(f"族的维数 {F.dim} 与要求的维数 {n} 不一致")
    dim = F.dim
    counts = np.bincount([x.bit_count() for x in F.members], minlength=dim + 1) \
        if F.members else np.zeros(dim + 1, dtype=np.int64)
    if m.exact:
        return sum((int(counts[k]) * m.mass(k, dim) for k in range(dim + 1) if counts[k]), Fraction(0))
    p = float(m.p)
    total = 0.0
    for k in np.flatnonzero(counts):
        total += float(counts[k]) * p ** int(k) * (1.0 - p) ** (dim - int(k))
    return total


def _compress(mask: int, keep: Sequence[int]) -> int:
    out = 0
    for j, pos in enumerate(keep):
        out |= ((mask >> pos) & 1) << j
    return out


def restrict(F: CubeFamily, r: Restriction) -> CubeFamily:
    """
    限制 F_{S->x}, 剩余坐标按原顺序重新编号为 1..n-|S|

    :param F: 族
    :param r: 限制
    :return: [n]\\S 上的族
    """
    n = F.dim
    for c in r.coords:
        if not 1 <= c <= n:
            raise StructuralError(f"限制坐标 {c} 超出 [1, {n}]")
    coord_mask, value_mask = r.masks
    keep = [i for i in range(n) if not (coord_mask >> i) & 1]
    members = frozenset(_compress(x, keep) for x in F.members if x & coord_mask == value_mask)
    return CubeFamily(n - len(r), members)


# ---------------------------------------------------------------------------
# 单调性
# ---------------------------------------------------------------------------

def up_closure(F: CubeFamily) -> CubeFamily:
    """
    上闭包 {x : 存在 y ∈ F, y <= x}

    每个坐标做一次 OR 扫描, O(n 2^n)
    """
    n = F.dim
    arr = F.to_indicator()
    for i in range(n):
        view = arr.reshape(1 << (n - i - 1), 2, 1 << i)
        view[:, 1, :] |= view[:, 0, :]
    return CubeFamily.from_indicator(n, arr)


def is_monotone(F: CubeFamily) -> bool:
    """F 是否对坐标序向上封闭"""
    members = F.members
    for x in members:
        for i in range(F.dim):
            bit = 1 << i
            if not x & bit and x | bit not in members:
                return False
    return True


class FKGResult(NamedTuple):
    lhs: Bias
    rhs: Bias
    holds: bool


def fkg_check(F: CubeFamily, G: CubeFamily, m: BiasedMeasure) -> FKGResult:
    """
    FKG 不等式 μ(F∩G) >= μ(F)μ(G), 只对单调族成立

    :param F: 单调族
    :param G: 单调族
    :param m: 偏置测度
    :return: (lhs, rhs, holds)
    """
    F._same_dim(G)
    if not is_monotone(F):
        raise PreconditionError("F 不是单调族, FKG 只适用于单调族")
    if not is_monotone(G):
        raise PreconditionError("G 不是单调族, FKG 只适用于单调族")
    lhs = measure(F & G, m)
    rhs = measure(F, m) * measure(G, m)
    return FKGResult(lhs, rhs, bool(lhs >= rhs - TOL))


# ---------------------------------------------------------------------------
# 单调族枚举与随机生成
# ---------------------------------------------------------------------------

MONOTONE_ENUM_CAP = 5


@lru_cache(maxsize=None)
def _monotone_bitsets(n: int) -> Tuple[int, ...]:
    # 族的位集: 第 x 位为 1 表示 x ∈ F; F = F0 ∪ (F1 上移), 单调当且仅当 F0 ⊆ F1 且两者单调
    if n == 0:
        return (0, 1)
    half = 1 << (n - 1)
    lower = _monotone_bitsets(n - 1)
    out = []
    for f1 in lower:
        for f0 in lower:
            if f0 & ~f1 == 0:
                out.append(f0 | (f1 << half))
    return tuple(sorted(out))


def family_from_bitset(n: int, bits: int) -> CubeFamily:
    members = []
    x = 0
    while bits:
        if bits & 1:
            members.append(x)
        bits >>= 1
        x += 1
    return CubeFamily(n, frozenset(members))


def monotone_families(n: int) -> List[CubeFamily]:
    """
    n 维上全部单调族 (Dedekind 数: 3, 6, 20, 168, 7581)

    :param n: 维数, 不超过 5
    """
    require_exact(n, '单调族枚举', cap=MONOTONE_ENUM_CAP)
    if n <= 0:
        raise PreconditionError(f"维数必须为正: {n}")
    return [family_from_bitset(n, b) for b in _monotone_bitsets(n)]


def random_monotone_family(n: int, rng: np.random.Generator, generators: Optional[int] = None) -> CubeFamily:
    """
    随机单调族: 随机点的上闭包

    :param n: 维数
    :param rng: numpy 随机数发生器
    :param generators: 生成点个数, 缺省随机取 1..3
    """
    require_exact(n, '随机单调族')
    if generators is None:
        generators = int(rng.integers(1, 4))
    points = []
    for _ in range(generators):
        density = rng.uniform(0.2, 0.8)
        bits = rng.random(n) < density
        points.append(int(np.dot(bits.astype(np.int64), 1 << np.arange(n, dtype=np.int64))))
    return up_closure(CubeFamily(n, frozenset(points)))
