"""
置换族测试: 相交谓词、精确极值搜索、反例族、稳定性例子、偏置 AK 族
"""
import math
from fractions import Fraction

import numpy as np
import pytest

from core.errors import PreconditionError, ResourceGuardError, StructuralError
from analysis.cube import BiasedMeasure, dictatorship, full_cube, measure, subcube
from combinatorics import families
from combinatorics.families import (
    PermFamily, Permutation, UmvirateSpec, agreement, ak_family, ak_measure, ak_sweep, all_permutations,
    common_pairs, containing_umvirate, counterexample_family, counterexample_formula, derangement_count,
    is_cross_t_intersecting, is_t_intersecting, is_t_intersecting_cube, max_t_intersecting,
    max_t_intersecting_cube, max_t_intersecting_cube_monotone, maximal_cliques_oracle, stability_check,
    stability_family, umvirate,
)


def test_permutation_validation():
    with pytest.raises(StructuralError):
        Permutation((1, 1, 2))
    sigma = Permutation((2, 3, 1))
    assert sigma.compose(sigma.inverse()) == Permutation.identity(3)
    assert agreement(sigma, Permutation.identity(3)) == 0


def test_umvirate_size_and_pairs():
    F = umvirate(UmvirateSpec(((1, 2), (3, 3))), 5)
    assert len(F) == math.factorial(3)
    assert set(common_pairs(F)) >= {(1, 2), (3, 3)}
    assert is_t_intersecting(F, 2)


def test_umvirate_spec_rejects_repeated_points():
    with pytest.raises(PreconditionError):
        UmvirateSpec(((1, 2), (1, 3)))


def test_intersection_predicates():
    everything = all_permutations(4)
    assert not is_t_intersecting(everything, 1)
    assert is_t_intersecting(everything, 0)
    A = umvirate(UmvirateSpec.fixing([1]), 4)
    B = umvirate(UmvirateSpec.fixing([1, 2]), 4)
    assert is_cross_t_intersecting(A, B, 1)
    assert not is_cross_t_intersecting(A, B, 2)


def test_cube_intersection_predicate():
    assert is_t_intersecting_cube(subcube(4, [1, 2]), 2)
    assert not is_t_intersecting_cube(full_cube(3), 1)


@pytest.mark.parametrize('n,expected', [(2, 1), (3, 2), (4, 6)])
def test_deza_frankl_small(n, expected):
    result = max_t_intersecting(n, 1)
    assert result.max_size == expected == math.factorial(n - 1)


@pytest.mark.slow
def test_deza_frankl_n5():
    assert max_t_intersecting(5, 1).max_size == 24


@pytest.mark.parametrize('n', [3, 4])
def test_all_maximum_families_are_umvirates(n):
    result = max_t_intersecting(n, 1, enumerate_all=True)
    assert result.all_umvirates
    assert result.witness_scope == 'all'
    # n 个起点 × n 个终点
    assert result.witness_count == n * n


def test_clique_oracle_agrees():
    size, cliques = maximal_cliques_oracle(4, 1)
    result = max_t_intersecting(4, 1, enumerate_all=True)
    assert size == result.max_size == 6
    assert sorted(c.as_tuples() for c in cliques) == sorted(w.as_tuples() for w in result.witnesses)


def test_search_guard():
    with pytest.raises(ResourceGuardError):
        max_t_intersecting(8, 1)


def test_t_above_n_is_empty():
    assert max_t_intersecting(3, 4).max_size == 0


def test_counterexample_n8_t4():
    result = counterexample_family(8, 4)
    assert result.size == result.formula == 26
    assert result.umvirate_size == 24
    assert result.exceeds_umvirate
    assert result.t_intersecting
    assert result.filter_agrees


def test_counterexample_formula():
    assert counterexample_formula(8, 4) == 26
    with pytest.raises(PreconditionError):
        counterexample_family(5, 4)


def test_stability_example_n10():
    example = stability_family(10, 1)
    assert example.ratio_exact == Fraction(214551, 362880)
    assert abs(example.ratio - (1 - math.exp(-1))) <= 0.05
    assert example.cross_intersecting
    assert example.single_intersecting


def test_stability_check_on_umvirate():
    F = umvirate(UmvirateSpec.fixing([1]), 4)
    report = stability_check(F, F, 1)
    assert report.ratio == 1.0
    assert report.reaches_threshold
    assert report.container == UmvirateSpec(((1, 1),))
    assert containing_umvirate(F, F, 2) is None


def test_derangements():
    assert [derangement_count(m) for m in range(7)] == [1, 0, 1, 2, 9, 44, 265]
    assert derangement_count(4) == 9
    assert math.floor(math.factorial(4) / math.e) == 8


def test_ak_measure_exact():
    third = Fraction(1, 3)
    assert ak_measure(1, 1, third) == Fraction(7, 27)
    assert measure(ak_family(1, 1, 3), BiasedMeasure(third)) == Fraction(7, 27)
    assert ak_measure(2, 0, third) == Fraction(1, 9)


def test_ak_family_intersection_failure_is_structural(monkeypatch):
    monkeypatch.setattr(families, 'is_t_intersecting_cube', lambda F, t: False)
    with pytest.raises(StructuralError):
        ak_family(1, 1, 3)


def test_ak_sweep_bound():
    rows = ak_sweep(10, 5, Fraction(1, 3))
    assert len(rows) == 10
    assert all(row.holds for row in rows)


def test_cube_search_matches_ak_and_monotone_route():
    third = Fraction(1, 3)
    best, family = max_t_intersecting_cube(3, 1, third)
    assert best == Fraction(1, 3)
    assert is_t_intersecting_cube(family, 1)
    assert max_t_intersecting_cube_monotone(3, 1, third) == best


def test_cube_search_with_dictator_witness():
    best, _ = max_t_intersecting_cube(4, 1, Fraction(1, 4))
    assert best == measure(dictatorship(4, 1), BiasedMeasure(Fraction(1, 4)))


def test_perm_family_rows():
    F = PermFamily(3, np.array([[1, 2, 3], [2, 1, 3]]))
    assert len(F) == 2
    assert common_pairs(F) == [(3, 3)]


def test_counterexample_members_fix_all_but_one_leading_point():
    result = counterexample_family(8, 4)
    assert all(len([i for i in sigma.fixed_points() if i <= 6]) >= 5 for sigma in result.family)
    assert not result.family.issubset(umvirate(UmvirateSpec.fixing([1, 2, 3, 4]), 8))
