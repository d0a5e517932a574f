"""
全局性测试: 证书、全局限制提取、level-d 审计与两个探针
"""
import math
from fractions import Fraction

import pytest

from core.errors import PreconditionError
from analysis.cube import (
    BiasedMeasure, CubeFamily, Restriction, dictatorship, full_cube, measure, random_monotone_family, subcube,
)
from analysis.globalness import (
    certify_globalness, extract_global_restriction, global_cross_probe, is_g_global, level_d_audit,
    restriction_measures, sharp_threshold_probe,
)


def test_full_cube_is_one_global():
    cert = certify_globalness(full_cube(4), BiasedMeasure(Fraction(1, 2)))
    assert cert.g_min == 1.0


def test_dictator_certificate():
    cert = certify_globalness(dictatorship(3, 1), BiasedMeasure(Fraction(1, 2)))
    assert cert.g_min == pytest.approx(2.0)
    assert cert.witness == Restriction.ones([1])
    assert cert.ratios[1] == pytest.approx(2.0)
    assert is_g_global(dictatorship(3, 1), BiasedMeasure(Fraction(1, 2)), 2)
    assert not is_g_global(dictatorship(3, 1), BiasedMeasure(Fraction(1, 2)), Fraction(3, 2))


def test_restriction_table_exact():
    table = restriction_measures(subcube(3, [1, 2]), BiasedMeasure(Fraction(1, 3)))
    assert table.exact
    assert table.values[table.base_index] == Fraction(1, 9)


def test_empty_family_rejected():
    with pytest.raises(PreconditionError):
        certify_globalness(CubeFamily(3), BiasedMeasure(0.5))


def test_extract_requires_g_above_one():
    with pytest.raises(PreconditionError):
        extract_global_restriction(full_cube(3), 1, BiasedMeasure(0.5))


def test_extract_global_restriction_on_random_families(rng):
    m = BiasedMeasure(Fraction(1, 2))
    g = Fraction(3, 2)
    for _ in range(200):
        F = random_monotone_family(6, rng)
        r, restricted = extract_global_restriction(F, g, m)
        assert measure(restricted, m) >= g ** len(r) * measure(F, m)
        if restricted.dim > 0:
            assert is_g_global(restricted, m, g)


def test_extract_on_subcube_fixes_its_coordinates():
    m = BiasedMeasure(Fraction(1, 2))
    r, restricted = extract_global_restriction(subcube(4, [1, 2]), Fraction(3, 2), m)
    assert r == Restriction.ones([1, 2])
    assert restricted == full_cube(2)


def test_level_d_audit_rows():
    F = subcube(6, [1, 2])
    rows = level_d_audit(F, BiasedMeasure(0.5), 2, 3, c1=1)
    assert [row.d for row in rows] == [1, 2, 3]
    assert all(row.lhs >= 0 and row.frame > 0 for row in rows)
    assert rows[0].within_c1_range == (1 <= math.log(4))


def test_level_d_audit_requires_proper_measure():
    with pytest.raises(PreconditionError):
        level_d_audit(full_cube(3), BiasedMeasure(0.5), 2, 1)


def test_sharp_threshold_probe():
    probe = sharp_threshold_probe(dictatorship(3, 1), Fraction(1, 10), 5)
    assert probe.mu_p == Fraction(1, 10)
    assert probe.mu_third == Fraction(1, 3)
    assert probe.lemma_rhs == pytest.approx(0.99 ** 5)
    assert probe.rho_check


def test_sharp_threshold_probe_rejects_non_monotone():
    with pytest.raises(PreconditionError):
        sharp_threshold_probe(CubeFamily(2, frozenset({0})), 0.1, 1)


def test_global_cross_probe():
    A = dictatorship(3, 1)
    probe = global_cross_probe(A, A, Fraction(1, 2), 2, 1, 1)
    assert probe.min_measure == Fraction(1, 2)
    assert probe.rhs == pytest.approx(math.exp(-1 / (0.5 * 4)))


def test_global_cross_probe_names_failed_precondition():
    with pytest.raises(PreconditionError, match='全局'):
        global_cross_probe(subcube(3, [1, 2]), subcube(3, [1, 2]), Fraction(1, 2), Fraction(3, 2), 1, 1)
    with pytest.raises(PreconditionError, match='交叉'):
        global_cross_probe(dictatorship(3, 1), dictatorship(3, 2), Fraction(1, 2), 2, 1, 1)
