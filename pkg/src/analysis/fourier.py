"""
偏置傅里叶分析
μ_p 下的傅里叶变换、逐层权重、单侧噪声算子 (傅里叶形式与耦合形式)

系数以子集掩码为下标稠密存放
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Tuple, Union

import numpy as np

from core.errors import OrderingError, PreconditionError, StructuralError
from analysis.cube import BiasedMeasure, CubeFamily, CubePoint, popcounts, require_exact

Bias = Union[float, Fraction]

CHARACTER_TABLE_CAP = 12


def _frozen(values: np.ndarray) -> np.ndarray:
    values = np.array(values, dtype=np.float64)
    values.setflags(write=False)
    return values


@dataclass(frozen=True, eq=False)
class RealFunctionOnCube:
    """f: {0,1}^n -> R, values[x] 为点 x 处的值"""
    dim: int
    values: np.ndarray

    def __post_init__(self):
        require_exact(self.dim, '立方体上的函数')
        values = _frozen(self.values)
        if values.shape != (1 << self.dim,):
            raise StructuralError(f"函数值个数应为 2^{self.dim}, 实际 {values.shape}")
        if not np.all(np.isfinite(values)):
            raise PreconditionError("函数值必须有限")
        object.__setattr__(self, 'values', values)

    @classmethod
    def indicator(cls, F: CubeFamily) -> 'RealFunctionOnCube':
        return cls(F.dim, F.to_indicator().astype(np.float64))

    @classmethod
    def constant(cls, n: int, value: float = 1.0) -> 'RealFunctionOnCube':
        return cls(n, np.full(1 << n, float(value)))

    def __call__(self, x: Union[int, CubePoint]) -> float:
        mask = x.mask if isinstance(x, CubePoint) else x
        return float(self.values[mask])


@dataclass(frozen=True, eq=False)
class FourierCoeffs:
    """f 的傅里叶系数, coeffs[S] 对应子集掩码 S, 未出现即为 0"""
    dim: int
    bias: Bias
    coeffs: np.ndarray

    def __post_init__(self):
        BiasedMeasure(self.bias)
        coeffs = _frozen(self.coeffs)
        if coeffs.shape != (1 << self.dim,):
            raise StructuralError(f"系数个数应为 2^{self.dim}, 实际 {coeffs.shape}")
        object.__setattr__(self, 'coeffs', coeffs)

    def __getitem__(self, subset: Union[int, Iterable[int]]) -> float:
        if isinstance(subset, (int, np.integer)):
            return float(self.coeffs[subset])
        mask = 0
        for c in subset:
            if not 1 <= c <= self.dim:
                raise StructuralError(f"坐标 {c} 超出 [1, {self.dim}]")
            mask |= 1 << (c - 1)
        return float(self.coeffs[mask])

    def as_dict(self) -> dict:
        """{子集掩码: 系数}, 不做截断"""
        return {int(s): float(v) for s, v in enumerate(self.coeffs) if v != 0.0}


@dataclass(frozen=True)
class NoiseRho:
    q: float
    p: float
    rho: float


def noise_rho(q: Bias, p: Bias) -> NoiseRho:
    """
    T_{q->p} 的乘子 ρ = sqrt(q(1-p) / (p(1-q)))

    :param q: 源偏置
    :param p: 目标偏置, 必须 q < p
    """
    BiasedMeasure(q)
    BiasedMeasure(p)
    if q >= p:
        raise OrderingError(f"单侧噪声算子只对 q < p 定义: q={q}, p={p}")
    qf, pf = float(q), float(p)
    return NoiseRho(qf, pf, float(np.sqrt(qf * (1 - pf) / (pf * (1 - qf)))))


def _butterfly(values: np.ndarray, n: int, step) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    for i in range(n):
        view = arr.reshape(1 << (n - i - 1), 2, 1 << i)
        lo, hi = step(view[:, 0, :].copy(), view[:, 1, :].copy())
        view[:, 0, :] = lo
        view[:, 1, :] = hi
    return arr


def transform(f: RealFunctionOnCube, m: BiasedMeasure) -> FourierCoeffs:
    """
    偏置傅里叶变换, 每个坐标一次蝶形运算, O(n 2^n)

    字符在 x_i=1 处取 sqrt((1-p)/p), 在 x_i=0 处取 -sqrt(p/(1-p))

    :param f: 函数
    :param m: 偏置测度
    :return: 傅里叶系数
    """
    n = f.dim
    require_exact(n, '傅里叶变换')
    p = float(m.p)
    scale = np.sqrt(p * (1 - p))
    coeffs = _butterfly(f.values, n, lambda v0, v1: ((1 - p) * v0 + p * v1, scale * (v1 - v0)))
    return FourierCoeffs(n, m.p, coeffs)


def inverse_transform(c: FourierCoeffs) -> RealFunctionOnCube:
    """transform 的逆: f = Σ_S f̂(S) χ_S"""
    p = float(c.bias)
    low, high = np.sqrt(p / (1 - p)), np.sqrt((1 - p) / p)
    values = _butterfly(c.coeffs, c.dim, lambda c0, c1: (c0 - low * c1, c0 + high * c1))
    return RealFunctionOnCube(c.dim, values)


def level_weight(c: FourierCoeffs, d: int) -> float:
    """第 d 层权重 Σ_{|S|=d} f̂(S)^2"""
    if not 0 <= d <= c.dim:
        raise PreconditionError(f"层数 d 必须在 [0, {c.dim}] 内: {d}")
    mask = popcounts(c.dim) == d
    return float(np.sum(c.coeffs[mask] ** 2))


def level_weights(c: FourierCoeffs) -> np.ndarray:
    """全部层的权重, 下标为 d"""
    return np.bincount(popcounts(c.dim), weights=c.coeffs ** 2, minlength=c.dim + 1)


def expectation(f: RealFunctionOnCube, m: BiasedMeasure) -> float:
    """E_{μ_p}[f]"""
    weights = BiasedMeasure(float(m.p)).point_masses(f.dim)
    return float(np.dot(weights, f.values))


def one_sided_noise(c: FourierCoeffs, p: Bias) -> FourierCoeffs:
    """
    T_{q->p} 的傅里叶形式: S 上的系数乘以 ρ^{|S|}, 偏置从 q 变为 p

    :param c: 偏置 q 下的系数
    :param p: 目标偏置
    """
    rho = noise_rho(c.bias, p).rho
    return FourierCoeffs(c.dim, p, c.coeffs * rho ** popcounts(c.dim))


def coupling_expectation(f: RealFunctionOnCube, q: Bias, p: Bias) -> RealFunctionOnCube:
    """
    T_{q->p} f(y) = E[f(x)], (x, y) ~ D(q, p)

    逐坐标条件律: y_i=1 时 x_i=1 的概率为 q/p, y_i=0 时 x_i=0
    """
    noise_rho(q, p)
    ratio = float(q) / float(p)
    values = _butterfly(f.values, f.dim, lambda v0, v1: (v0, ratio * v1 + (1 - ratio) * v0))
    return RealFunctionOnCube(f.dim, values)


def _bits_to_masks(bits: np.ndarray) -> np.ndarray:
    weights = 1 << np.arange(bits.shape[-1], dtype=np.int64)
    return bits.astype(np.int64) @ weights


def sample_coupled_pairs(n: int, q: Bias, p: Bias, size: int, seed=None) -> Tuple[np.ndarray, np.ndarray]:
    """
    批量采样 (x, y) ~ D(q, p)

    :return: 形状 (size, n) 的两个布尔数组, x <= y 逐坐标成立
    """
    noise_rho(q, p)
    if size <= 0:
        raise PreconditionError(f"样本数必须为正: {size}")
    rng = np.random.default_rng(seed)
    y = rng.random((size, n)) < float(p)
    x = y & (rng.random((size, n)) < float(q) / float(p))
    return x, y


def sample_coupled_pair(n: int, q: Bias, p: Bias, seed=None) -> Tuple[CubePoint, CubePoint]:
    """单个耦合样本 (x, y)"""
    if n > 62:
        raise PreconditionError(f"单点采样要求 n <= 62: {n}")
    x, y = sample_coupled_pairs(n, q, p, 1, seed)
    return CubePoint(n, int(_bits_to_masks(x)[0])), CubePoint(n, int(_bits_to_masks(y)[0]))


def character_table(n: int, p: Bias) -> np.ndarray:
    """
    字符表 M[x, S] = χ_S(x)

    :param n: 维数, 不超过 12
    :param p: 偏置
    """
    require_exact(n, '字符表', cap=CHARACTER_TABLE_CAP)
    BiasedMeasure(p)
    pf = float(p)
    factor = np.array([[1.0, -np.sqrt(pf / (1 - pf))],
                       [1.0, np.sqrt((1 - pf) / pf)]])
    table = np.ones((1, 1))
    for _ in range(n):
        table = np.kron(factor, table)
    return table


def orthonormality_error(n: int, p: Bias) -> float:
    """max |<χ_S, χ_T>_{μ_p} - δ_{S,T}|"""
    table = character_table(n, p)
    weights = BiasedMeasure(float(p)).point_masses(n)
    gram = table.T @ (weights[:, None] * table)
    return float(np.max(np.abs(gram - np.eye(1 << n))))


def rho_upper_bound_check(p: Bias) -> Tuple[float, float, bool]:
    """
    T_{p->1/3} 的乘子 ρ = sqrt(2p/(1-p)) 与上界 2 sqrt(p) 的比较 (p <= 1/2 时成立)

    :return: (rho, bound, holds)
    """
    pf = float(p)
    if not 0 < pf < 1:
        raise PreconditionError(f"偏置 p 必须满足 0 < p < 1: {p}")
    rho = float(np.sqrt(2 * pf / (1 - pf)))
    bound = float(2 * np.sqrt(pf))
    return rho, bound, rho <= bound + 1e-15
