"""
族的命令行描述
立方族: full, empty, dictator:i, and:1,2, umvirate:t, ak:t,r, random-monotone[:k], 或 cube 文件路径
置换族: all, umvirate[:1->1,2->2], dictator:i,j, counterexample, stability-a, stability-b, 或 perm 文件路径
"""
import itertools
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from core.errors import PreconditionError, StructuralError
from analysis.cube import CubeFamily, dictatorship, full_cube, random_monotone_family, subcube
from combinatorics.families import (
    PermFamily, UmvirateSpec, all_permutations, ak_family, counterexample_family, stability_family, umvirate,
)
from utils.formats import load_cube_family, load_perm_family

CUBE_KINDS = ('full', 'empty', 'dictator', 'and', 'umvirate', 'ak', 'random-monotone')
PERM_KINDS = ('all', 'umvirate', 'dictator', 'counterexample', 'stability-a', 'stability-b')


def _ints(arg: str, spec: str) -> List[int]:
    try:
        return [int(v) for v in arg.split(',') if v.strip()]
    except ValueError as e:
        raise PreconditionError(f"族描述 '{spec}' 的参数应为逗号分隔的整数") from e


def _need(value: Optional[int], name: str, spec: str) -> int:
    if value is None:
        raise PreconditionError(f"族描述 '{spec}' 需要参数 {name}")
    return value


def cube_family(spec: str, n: Optional[int], rng: Optional[np.random.Generator] = None) -> CubeFamily:
    """
    按描述构造立方族

    :param spec: 族描述
    :param n: 维数, 内置族必需, 文件族可选 (给出时必须一致)
    :param rng: random-monotone 使用的随机数发生器
    """
    kind, _, arg = spec.strip().partition(':')
    if kind not in CUBE_KINDS:
        F = load_cube_family(spec)
        if n is not None and F.dim != n:
            raise StructuralError(f"{spec} 的维数 {F.dim} 与参数 n = {n} 不一致")
        return F

    n = _need(n, 'n', spec)
    if kind == 'full':
        return full_cube(n)
    if kind == 'empty':
        return CubeFamily(n, frozenset())
    if kind == 'dictator':
        (i,) = _exactly(_ints(arg, spec), 1, spec)
        return dictatorship(n, i)
    if kind == 'and':
        return subcube(n, _ints(arg, spec))
    if kind == 'umvirate':
        (t,) = _exactly(_ints(arg, spec), 1, spec)
        return subcube(n, range(1, t + 1))
    if kind == 'ak':
        t, r = _exactly(_ints(arg, spec), 2, spec)
        return ak_family(t, r, n)
    generators = _ints(arg, spec)[0] if arg else None
    return random_monotone_family(n, rng if rng is not None else np.random.default_rng(0), generators)


def _exactly(values: List[int], count: int, spec: str) -> List[int]:
    if len(values) != count:
        raise PreconditionError(f"族描述 '{spec}' 需要 {count} 个整数参数")
    return values


def parse_umvirate_pairs(text: str) -> UmvirateSpec:
    """'1->1,2->3' 形式的约束"""
    pairs = []
    for part in text.split(','):
        part = part.strip()
        if not part:
            continue
        source, sep, target = part.partition('->')
        if not sep:
            raise PreconditionError(f"约束应为 i->j 形式: '{part}'")
        try:
            pairs.append((int(source), int(target)))
        except ValueError as e:
            raise PreconditionError(f"约束应为 i->j 形式: '{part}'") from e
    return UmvirateSpec(tuple(pairs))


def perm_family(spec: str, n: Optional[int], t: Optional[int] = None) -> PermFamily:
    """
    按描述构造置换族

    :param spec: 族描述
    :param n: 置换规模, 内置族必需
    :param t: 相交参数, umvirate / counterexample / stability-* 使用
    """
    kind, _, arg = spec.strip().partition(':')
    if kind not in PERM_KINDS:
        F = load_perm_family(spec)
        if n is not None and F.n != n:
            raise StructuralError(f"{spec} 的规模 {F.n} 与参数 n = {n} 不一致")
        return F

    n = _need(n, 'n', spec)
    if kind == 'all':
        return all_permutations(n)
    if kind == 'dictator':
        i, j = _exactly(_ints(arg, spec), 2, spec)
        return umvirate(UmvirateSpec(((i, j),)), n)
    if kind == 'umvirate':
        if arg:
            return umvirate(parse_umvirate_pairs(arg), n)
        return umvirate(UmvirateSpec.fixing(range(1, _need(t, 't', spec) + 1)), n)
    t = _need(t, 't', spec)
    if kind == 'counterexample':
        return counterexample_family(n, t).family
    example = stability_family(n, t)
    return example.A if kind == 'stability-a' else example.B


def grid_points(grid: Dict[str, List[int]], axes: Tuple[str, ...]) -> Iterator[Dict[str, int]]:
    """
    网格的笛卡尔积, 按 axes 的顺序展开

    :param grid: parse_grid 的结果
    :param axes: 允许的轴, 每个都必须出现
    """
    unknown = sorted(set(grid) - set(axes))
    if unknown:
        raise PreconditionError(f"网格中有未知的轴: {', '.join(unknown)}")
    missing = [a for a in axes if a not in grid]
    if missing:
        raise PreconditionError(f"网格缺少轴: {', '.join(missing)}")
    for combo in itertools.product(*(grid[a] for a in axes)):
        yield dict(zip(axes, combo))
