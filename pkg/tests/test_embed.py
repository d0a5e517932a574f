"""
嵌入与耦合测试: 嵌入保真度、完美匹配、耦合采样、μ_p(U) 的 Hall 界
"""
import itertools
import math
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest

from core.errors import ResourceGuardError, StructuralError
from analysis.cube import BiasedMeasure, measure, up_closure
from combinatorics.embed import (
    BitMatrix, WordPoint, _has_perfect_matching_scipy, common_ones, coupling_marginal_test, coupling_sample,
    embed_family, embed_perm, embed_word, embed_word_family, embedding_measure_factor, hall_bound,
    hall_membership, hall_threshold, is_t_intersecting_words, lifted_measure, perfect_matching,
    union_bound_residual, word_agreement,
)
from combinatorics.families import (
    UmvirateSpec, agreement, all_permutations, is_t_intersecting, is_t_intersecting_cube, umvirate,
)


def test_common_ones_equals_agreement_on_s4():
    perms = list(all_permutations(4))
    for sigma, tau in itertools.product(perms, repeat=2):
        assert common_ones(embed_perm(sigma), embed_perm(tau)) == agreement(sigma, tau)


def test_word_embedding_agreement(rng):
    for _ in range(200):
        w = WordPoint(tuple(rng.integers(1, 6, size=5)))
        v = WordPoint(tuple(rng.integers(1, 6, size=5)))
        assert common_ones(embed_word(w), embed_word(v)) == word_agreement(w, v)


def test_word_validation():
    with pytest.raises(StructuralError):
        WordPoint((1, 4, 2))


def test_intersection_preserved_by_embedding():
    F = umvirate(UmvirateSpec.fixing([1, 2]), 5)
    assert is_t_intersecting(F, 2) and is_t_intersecting_cube(embed_family(F), 2)
    everything = all_permutations(4)
    assert not is_t_intersecting(everything, 1) and not is_t_intersecting_cube(embed_family(everything), 1)

    words = [WordPoint((1, 2, 3, 3)), WordPoint((1, 2, 1, 1)), WordPoint((1, 2, 4, 2))]
    assert is_t_intersecting_words(words, 2)
    assert is_t_intersecting_cube(embed_word_family(words), 2)
    assert not is_t_intersecting_cube(embed_word_family(words), 3)


def test_bit_matrix_rows():
    x = BitMatrix.from_rows(['10', '11'])
    assert x.has(1, 1) and not x.has(1, 2) and x.has(2, 2)
    assert x.rows() == ['10', '11']
    with pytest.raises(StructuralError):
        BitMatrix.from_rows(['10', '1'])


def test_perfect_matching_agrees_with_networkx(rng):
    for _ in range(200):
        bits = rng.random((5, 5)) < 0.4
        x = BitMatrix.from_array(bits)
        graph = nx.Graph()
        rows = [('r', i) for i in range(5)]
        graph.add_nodes_from(rows)
        graph.add_nodes_from(('c', j) for j in range(5))
        graph.add_edges_from((('r', i), ('c', j)) for i in range(5) for j in range(5) if bits[i, j])
        matching = nx.bipartite.hopcroft_karp_matching(graph, top_nodes=rows)
        expected = len(matching) // 2 == 5
        assert hall_membership(x) == expected
        assert _has_perfect_matching_scipy(bits) == expected
        sigma = perfect_matching(x)
        if sigma is not None:
            assert embed_perm(sigma) <= x


def test_embedding_measure_factor_at_one_over_n():
    for n in (3, 5, 8):
        factor = embedding_measure_factor(n, Fraction(1, n))
        assert factor.holds
        assert factor.point_mass_ratio >= factor.bound * (1 - 1e-12)


def test_coupling_sample_is_dominated():
    sample = coupling_sample(4, 0.9, seed=1)
    assert sample.exact_uniform
    if sample.prospects:
        assert sample.dominated
        assert embed_perm(sample.sigma) <= sample.x


def test_coupling_marginal_is_uniform():
    report = coupling_marginal_test(3, 0.5, 20000, seed=11)
    assert sum(report.counts) == 20000
    assert len(report.counts) == 6
    assert report.p_value >= 0.001


def test_hall_exact_n2():
    bound = hall_bound(2, Fraction(1, 2), mode='exact')
    assert bound.exact
    assert bound.mu_u == Fraction(7, 16)
    direct = measure(up_closure(embed_family(all_permutations(2))), BiasedMeasure(Fraction(1, 2)))
    assert direct == Fraction(7, 16)


def test_hall_exact_guard():
    with pytest.raises(ResourceGuardError):
        hall_bound(5, 0.5, mode='exact')


def test_hall_threshold_vacuous_regime():
    p, vacuous = hall_threshold(10)
    assert p == 1.0 and vacuous
    p, vacuous = hall_threshold(60)
    assert p == pytest.approx(10 * math.log(60) / 60)
    assert not vacuous


@pytest.mark.slow
@pytest.mark.parametrize('n', [40, 60, 80])
def test_hall_monte_carlo_above_half(n):
    p, _ = hall_threshold(n)
    bound = hall_bound(n, p, samples=10000, seed=5, mode='mc')
    assert bound.ci_low >= 0.5
    assert bound.union_bound_residual <= 0.5


def test_union_bound_residual_decreases_in_p():
    assert union_bound_residual(10, 0.9) < union_bound_residual(10, 0.5)


def test_lifted_measure_on_umvirate():
    A = umvirate(UmvirateSpec.fixing([1]), 3)
    lifted = lifted_measure(A, Fraction(1, 2))
    assert lifted.mu_uniform == Fraction(1, 3)
    # 包含 E(123) 或 E(132) 的矩阵: 2·2^{-3} - 2^{-5}
    assert lifted.mu_lifted == Fraction(7, 32)
    assert lifted.half_bound_holds
    with pytest.raises(ResourceGuardError):
        lifted_measure(all_permutations(5), 0.5)


def test_coupling_test_guard():
    with pytest.raises(ResourceGuardError):
        coupling_marginal_test(9, 0.5, 10)


def test_bit_matrix_from_array_roundtrip():
    bits = np.array([[1, 0, 1], [0, 1, 0], [1, 1, 1]], dtype=bool)
    assert np.array_equal(BitMatrix.from_array(bits).to_array(), bits)


def test_large_coupling_sample_is_flagged():
    sample = coupling_sample(12, 0.9, seed=2)
    assert not sample.exact_uniform
    assert sample.prospects is None
    assert sample.dominated
    assert embed_perm(sample.sigma) <= sample.x
