"""
文件格式与报告输出测试
"""
import json
from fractions import Fraction

import numpy as np
import pytest

from core.errors import StructuralError
from analysis.cube import BiasedMeasure, dictatorship, subcube
from analysis.fourier import RealFunctionOnCube, transform
from combinatorics.embed import BitMatrix
from combinatorics.families import UmvirateSpec, umvirate
from utils.formats import (
    coeffs_frame, dump_bit_matrix, dump_coeffs, dump_cube_family, dump_perm_family, load_bit_matrix, load_coeffs,
    load_cube_family, load_perm_family, parse_bit_matrix, parse_cube_family, parse_perm_family,
)
from utils.report import Report, to_jsonable


def test_cube_file(tmp_path):
    F = subcube(5, [2, 4])
    path = tmp_path / 'families' / 'sub.cube'
    dump_cube_family(F, path)
    assert path.read_text(encoding='utf-8').splitlines()[0] == 'cube n=5'
    assert load_cube_family(path) == F


def test_cube_parse_with_comments():
    F = parse_cube_family('# 独裁族\ncube n=2\n2\n3  # 11\n')
    assert F == dictatorship(2, 2)


@pytest.mark.parametrize('text', ['', 'perm n=2\n', 'cube n=2\nzz\n', 'cube n=2\n10\n'])
def test_cube_parse_errors(text):
    with pytest.raises(StructuralError):
        parse_cube_family(text)


def test_perm_file(tmp_path):
    F = umvirate(UmvirateSpec.fixing([1]), 4)
    path = tmp_path / 'star.perm'
    dump_perm_family(F, path)
    assert load_perm_family(path) == F


@pytest.mark.parametrize('text', ['perm n=3\n1 2\n', 'perm n=3\n1 1 2\n', 'perm n=3\n1 2 x\n'])
def test_perm_parse_errors(text):
    with pytest.raises(StructuralError):
        parse_perm_family(text)


def test_bit_matrix_file(tmp_path):
    x = BitMatrix.from_rows(['110', '011', '101'])
    path = tmp_path / 'x.bitmat'
    dump_bit_matrix(x, path)
    assert load_bit_matrix(path) == x
    with pytest.raises(StructuralError):
        parse_bit_matrix('bitmat n=2\n10\n')


def test_coefficient_file(tmp_path):
    m = BiasedMeasure(Fraction(1, 4))
    c = transform(RealFunctionOnCube.indicator(dictatorship(3, 2)), m)
    frame = coeffs_frame(c)
    assert list(frame['subset']) == ['0', '2']
    path = tmp_path / 'coeffs.csv'
    dump_coeffs(c, path)
    loaded = load_coeffs(path)
    assert loaded.dim == 3
    assert loaded.bias == Fraction(1, 4)
    assert np.array_equal(loaded.coeffs, c.coeffs)


def test_coefficient_file_header(tmp_path):
    path = tmp_path / 'bad.csv'
    path.write_text('subset,coefficient\n0,1.0\n', encoding='utf-8')
    with pytest.raises(StructuralError):
        load_coeffs(path)


def test_to_jsonable():
    payload = {'mu': Fraction(7, 27), 'one': Fraction(2, 1), 'arr': np.arange(3), 'flag': np.bool_(True),
               'pairs': {(1, 1)}, 'x': np.float64(0.5)}
    assert to_jsonable(payload) == {'mu': '7/27', 'one': 2, 'arr': [0, 1, 2], 'flag': True,
                                    'pairs': [[1, 1]], 'x': 0.5}


def _report(checks, errors=None):
    results = {'value': Fraction(1, 3)}
    if errors:
        results['errors'] = errors
    return Report('demo', {'params': {'n': 3}}, results, checks, None, 0.25)


def test_report_passed():
    assert _report([{'name': 'a', 'holds': True}]).passed
    assert not _report([{'name': 'a', 'holds': False}]).passed
    assert not _report([], errors=['boom']).passed


def test_report_json(tmp_path):
    report = _report([{'name': 'a', 'relation': 'x <= y', 'lhs': 1, 'rhs': 2, 'holds': True}])
    path = tmp_path / 'out' / 'report.json'
    report.write(str(path), 'json')
    data = json.loads(path.read_text(encoding='utf-8'))
    assert data['tool'] == 'globalcube'
    assert data['campaign'] == 'demo'
    assert data['results']['value'] == '1/3'
    assert data['checks'][0]['holds'] is True


def test_report_csv_prefers_table():
    report = Report('demo', {}, {'k': 1}, [{'name': 'a', 'holds': True}],
                    [{'n': 500, 't': 1, 'holds': True}, {'n': 1000, 't': 2, 'holds': True}])
    lines = report.render('csv').splitlines()
    assert lines[0] == 'n,t,holds'
    assert len(lines) == 3
