"""
立方体族测试: 测度、限制、上闭包、单调族枚举与 FKG
"""
import itertools
from fractions import Fraction

import pytest

from core.errors import PreconditionError, ResourceGuardError, StructuralError
from analysis.cube import (
    BiasedMeasure, CubeFamily, CubePoint, Restriction, dictatorship, fkg_check, from_predicate, full_cube,
    is_monotone, measure, monotone_families, random_monotone_family, restrict, subcube, up_closure,
)


def test_measure_of_constructors_is_exact():
    m = BiasedMeasure(Fraction(1, 3))
    assert measure(full_cube(4), m) == 1
    assert measure(CubeFamily(4), m) == 0
    assert measure(dictatorship(4, 2), m) == Fraction(1, 3)
    assert measure(subcube(5, [1, 3, 5]), m) == Fraction(1, 27)


def test_measure_float_matches_exact():
    F = from_predicate(6, lambda x: x.bit_count() >= 4)
    exact = measure(F, BiasedMeasure(Fraction(1, 4)))
    approx = measure(F, BiasedMeasure(0.25))
    assert abs(float(exact) - approx) < 1e-15


def test_measure_dimension_mismatch():
    with pytest.raises(StructuralError):
        measure(full_cube(3), BiasedMeasure(0.5), n=4)


@pytest.mark.parametrize('p', [0, 1, -0.1, 1.5])
def test_bias_out_of_range(p):
    with pytest.raises(PreconditionError):
        BiasedMeasure(p)


def test_bias_one_allowed_for_sampling():
    assert BiasedMeasure(1, allow_one=True).p == 1


def test_family_rejects_out_of_range_member():
    with pytest.raises(StructuralError):
        CubeFamily(3, frozenset({8}))


def test_point_order():
    assert CubePoint(3, 0b001) <= CubePoint(3, 0b011)
    assert not CubePoint(3, 0b100) <= CubePoint(3, 0b011)


def test_restrict_dictator():
    F = dictatorship(4, 1)
    assert restrict(F, Restriction.ones([1])) == full_cube(3)
    assert len(restrict(F, Restriction((1,), (0,)))) == 0


def test_restrict_renumbers_coordinates():
    # {x : x_3 = 1} 固定 x_1 后成为新坐标 2 上的独裁族
    F = dictatorship(4, 3)
    assert restrict(F, Restriction((1,), (0,))) == dictatorship(3, 2)


def test_restrict_mixed_values():
    F = subcube(4, [1, 2])
    restricted = restrict(F, Restriction((4, 2), (0, 1)))
    assert restricted.dim == 2
    assert restricted == dictatorship(2, 1)
    assert len(restrict(F, Restriction((2,), (0,)))) == 0


def test_restriction_validation():
    with pytest.raises(StructuralError):
        Restriction((1, 1), (0, 1))
    with pytest.raises(StructuralError):
        Restriction((1,), (2,))


def test_up_closure_and_monotone():
    F = CubeFamily(3, frozenset({0b011}))
    closed = up_closure(F)
    assert closed.members == frozenset({0b011, 0b111})
    assert is_monotone(closed)
    assert not is_monotone(F)


@pytest.mark.parametrize('n,count', [(1, 3), (2, 6), (3, 20), (4, 168)])
def test_dedekind_numbers(n, count):
    families = monotone_families(n)
    assert len(families) == count
    assert all(is_monotone(F) for F in families)


def test_monotone_enumeration_guard():
    with pytest.raises(ResourceGuardError):
        monotone_families(6)


def test_random_monotone_family_is_monotone(rng):
    for _ in range(20):
        assert is_monotone(random_monotone_family(8, rng))


def test_fkg_dictators_equality():
    m = BiasedMeasure(Fraction(2, 5))
    result = fkg_check(dictatorship(3, 1), dictatorship(3, 2), m)
    assert result.lhs == result.rhs == Fraction(4, 25)
    assert result.holds


def test_fkg_exhaustive_small():
    m = BiasedMeasure(Fraction(1, 3))
    families = monotone_families(3)
    assert all(fkg_check(F, G, m).holds for F, G in itertools.product(families, repeat=2))


@pytest.mark.slow
def test_fkg_exhaustive_n4():
    m = BiasedMeasure(Fraction(1, 3))
    families = monotone_families(4)
    assert len(families) == 168
    violations = [(F, G) for F, G in itertools.product(families, repeat=2) if not fkg_check(F, G, m).holds]
    assert violations == []


@pytest.mark.slow
def test_fkg_random_pairs_n12(rng):
    m = BiasedMeasure(0.3)
    for _ in range(1000):
        F, G = random_monotone_family(12, rng), random_monotone_family(12, rng)
        assert fkg_check(F, G, m).holds


def test_fkg_rejects_non_monotone():
    with pytest.raises(PreconditionError):
        fkg_check(CubeFamily(2, frozenset({0})), full_cube(2), BiasedMeasure(0.5))


def test_exact_cap():
    with pytest.raises(ResourceGuardError):
        full_cube(25)
