"""
文件格式
立方族 (cube)、置换族 (perm)、比特矩阵 (bitmat) 的文本格式, 以及傅里叶系数 CSV
"""
import io
import re
from pathlib import Path
from typing import Iterable, List, Tuple, Union

import numpy as np
import pandas as pd
from loguru import logger

from core.config import parse_number
from core.errors import StructuralError
from analysis.cube import CubeFamily
from analysis.fourier import FourierCoeffs
from combinatorics.embed import BitMatrix
from combinatorics.families import PermFamily

PathLike = Union[str, Path]

_HEADER = re.compile(r'^(?P<kind>\w+)\s+n\s*=\s*(?P<n>\d+)$')


def _body(text: str, kind: str, source: str) -> Tuple[int, List[Tuple[int, str]]]:
    """
    拆出头部的 n 与有效行

    :return: (n, [(行号, 内容), ...])
    """
    rows = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if line:
            rows.append((number, line))
    if not rows:
        raise StructuralError(f"{source}: 缺少 '{kind} n=<n>' 头部")
    number, header = rows[0]
    match = _HEADER.match(header)
    if not match or match.group('kind') != kind:
        raise StructuralError(f"{source}:{number}: 头部应为 '{kind} n=<n>', 实际 '{header}'")
    return int(match.group('n')), rows[1:]


def _write(path: PathLike, lines: Iterable[str]):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text('\n'.join(lines) + '\n', encoding='utf-8')


# ---------------------------------------------------------------------------
# cube n=<dim>
# ---------------------------------------------------------------------------

def parse_cube_family(text: str, source: str = '<text>') -> CubeFamily:
    n, rows = _body(text, 'cube', source)
    masks = []
    for number, line in rows:
        try:
            masks.append(int(line, 16))
        except ValueError as e:
            raise StructuralError(f"{source}:{number}: 不是十六进制掩码: '{line}'") from e
    try:
        return CubeFamily.from_points(n, masks)
    except StructuralError as e:
        raise StructuralError(f"{source}: {e}") from e


def render_cube_family(F: CubeFamily) -> List[str]:
    return [f"cube n={F.dim}"] + [format(mask, 'x') for mask in F]


def load_cube_family(path: PathLike) -> CubeFamily:
    F = parse_cube_family(Path(path).read_text(encoding='utf-8'), str(path))
    logger.debug(f"读取立方族 {path}: n = {F.dim}, {len(F)} 个点")
    return F


def dump_cube_family(F: CubeFamily, path: PathLike):
    _write(path, render_cube_family(F))


# ---------------------------------------------------------------------------
# perm n=<n>
# ---------------------------------------------------------------------------

def parse_perm_family(text: str, source: str = '<text>') -> PermFamily:
    n, rows = _body(text, 'perm', source)
    images = []
    for number, line in rows:
        parts = line.split()
        if len(parts) != n or not all(p.isdigit() for p in parts):
            raise StructuralError(f"{source}:{number}: 应为 {n} 个以空格分隔的正整数: '{line}'")
        images.append([int(p) for p in parts])
    try:
        return PermFamily(n, np.array(images, dtype=np.int16).reshape(len(images), n))
    except StructuralError as e:
        raise StructuralError(f"{source}: {e}") from e


def render_perm_family(F: PermFamily) -> List[str]:
    return [f"perm n={F.n}"] + [' '.join(map(str, row)) for row in F.as_tuples()]


def load_perm_family(path: PathLike) -> PermFamily:
    F = parse_perm_family(Path(path).read_text(encoding='utf-8'), str(path))
    logger.debug(f"读取置换族 {path}: n = {F.n}, {len(F)} 个置换")
    return F


def dump_perm_family(F: PermFamily, path: PathLike):
    _write(path, render_perm_family(F))


# ---------------------------------------------------------------------------
# bitmat n=<n>
# ---------------------------------------------------------------------------

def parse_bit_matrix(text: str, source: str = '<text>') -> BitMatrix:
    n, rows = _body(text, 'bitmat', source)
    if len(rows) != n:
        raise StructuralError(f"{source}: 应有 {n} 行, 实际 {len(rows)} 行")
    for number, line in rows:
        if len(line) != n or set(line) - {'0', '1'}:
            raise StructuralError(f"{source}:{number}: 应为 {n} 个 0/1 字符: '{line}'")
    return BitMatrix.from_rows([line for _, line in rows])


def load_bit_matrix(path: PathLike) -> BitMatrix:
    return parse_bit_matrix(Path(path).read_text(encoding='utf-8'), str(path))


def dump_bit_matrix(x: BitMatrix, path: PathLike):
    _write(path, [f"bitmat n={x.n}"] + x.rows())


# ---------------------------------------------------------------------------
# 傅里叶系数 CSV
# ---------------------------------------------------------------------------

def coeffs_frame(c: FourierCoeffs) -> pd.DataFrame:
    """非零系数表: subset 为十六进制掩码"""
    nonzero = np.flatnonzero(c.coeffs)
    return pd.DataFrame({
        'subset': [format(int(s), 'x') for s in nonzero],
        'coefficient': c.coeffs[nonzero],
    })


def dump_coeffs(c: FourierCoeffs, path: PathLike):
    """首行注释记录 n 与 p, 其余为 subset,coefficient 两列"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as f:
        f.write(f"# n={c.dim} p={c.bias}\n")
        coeffs_frame(c).to_csv(f, index=False, float_format='%.17g')


def load_coeffs(path: PathLike) -> FourierCoeffs:
    text = Path(path).read_text(encoding='utf-8')
    first, _, rest = text.partition('\n')
    match = re.match(r'^#\s*n=(\d+)\s+p=(\S+)\s*$', first)
    if not match:
        raise StructuralError(f"{path}: 首行应为 '# n=<n> p=<p>', 实际 '{first}'")
    n = int(match.group(1))
    p = parse_number(match.group(2), 'p')
    frame = pd.read_csv(io.StringIO(rest), dtype={'subset': str})
    if list(frame.columns) != ['subset', 'coefficient']:
        raise StructuralError(f"{path}: 列应为 subset,coefficient, 实际 {list(frame.columns)}")
    coeffs = np.zeros(1 << n, dtype=np.float64)
    for subset, value in zip(frame['subset'], frame['coefficient']):
        mask = int(subset, 16)
        if mask >> n:
            raise StructuralError(f"{path}: 子集掩码 {subset} 超出 n = {n}")
        coeffs[mask] = float(value)
    return FourierCoeffs(n, p, coeffs)
