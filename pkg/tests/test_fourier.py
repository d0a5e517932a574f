"""
偏置傅里叶分析测试: 往返、Parseval、字符正交性、单侧噪声算子
"""
import math

import numpy as np
import pytest

from core.errors import OrderingError
from analysis.cube import BiasedMeasure, CubePoint, dictatorship, measure
from analysis.fourier import (
    RealFunctionOnCube, character_table, coupling_expectation, expectation, inverse_transform, level_weight,
    level_weights, noise_rho, one_sided_noise, orthonormality_error, rho_upper_bound_check, sample_coupled_pair,
    sample_coupled_pairs, transform,
)


@pytest.mark.parametrize('n,p', [(6, 0.1), (10, 0.25), pytest.param(14, 0.5, marks=pytest.mark.slow)])
def test_roundtrip_and_parseval(rng, n, p):
    m = BiasedMeasure(p)
    for _ in range(100):
        f = RealFunctionOnCube(n, rng.standard_normal(1 << n))
        c = transform(f, m)
        assert np.max(np.abs(inverse_transform(c).values - f.values)) <= 1e-10
        second = expectation(RealFunctionOnCube(n, f.values ** 2), m)
        assert abs(float(np.sum(c.coeffs ** 2)) - second) <= 1e-10


def test_orthonormality_exhaustive():
    assert orthonormality_error(6, 0.3) <= 1e-12


def test_character_table_shape():
    assert character_table(3, 0.5).shape == (8, 8)


def test_dictator_coefficients():
    p = 0.2
    c = transform(RealFunctionOnCube.indicator(dictatorship(1, 1)), BiasedMeasure(p))
    assert c[0] == pytest.approx(p)
    assert c[[1]] == pytest.approx(math.sqrt(p * (1 - p)))


def test_empty_coefficient_is_expectation(rng):
    f = RealFunctionOnCube(5, rng.random(32))
    m = BiasedMeasure(0.35)
    assert transform(f, m)[0] == pytest.approx(expectation(f, m))


def test_level_weights_sum_to_measure_for_indicator():
    F = dictatorship(4, 2)
    m = BiasedMeasure(0.3)
    weights = level_weights(transform(RealFunctionOnCube.indicator(F), m))
    assert float(np.sum(weights)) == pytest.approx(float(measure(F, m)), abs=1e-12)
    assert level_weight(transform(RealFunctionOnCube.indicator(F), m), 2) == pytest.approx(0.0, abs=1e-12)


def test_constant_function_has_only_empty_coefficient():
    c = transform(RealFunctionOnCube.constant(4, 2.5), BiasedMeasure(0.4))
    assert c[0] == pytest.approx(2.5)
    assert np.max(np.abs(c.coeffs[1:])) <= 1e-12


@pytest.mark.parametrize('q,p', [(0.1, 0.3), (0.25, 0.5)])
def test_noise_fourier_form_matches_coupling(rng, q, p):
    for _ in range(50):
        f = RealFunctionOnCube(8, rng.standard_normal(256))
        by_fourier = inverse_transform(one_sided_noise(transform(f, BiasedMeasure(q)), p))
        by_coupling = coupling_expectation(f, q, p)
        assert np.max(np.abs(by_fourier.values - by_coupling.values)) <= 1e-10


def test_noise_rho_value():
    assert noise_rho(0.25, 0.5).rho == pytest.approx(math.sqrt(0.25 * 0.5 / (0.5 * 0.75)))


@pytest.mark.parametrize('q,p', [(0.5, 0.5), (0.6, 0.3)])
def test_noise_requires_q_below_p(q, p):
    with pytest.raises(OrderingError):
        noise_rho(q, p)


def test_coupled_samples_are_ordered():
    x, y = sample_coupled_pairs(10, 0.2, 0.6, 5000, seed=3)
    assert np.all(x <= y)
    assert abs(x.mean() - 0.2) < 0.01
    assert abs(y.mean() - 0.6) < 0.01
    a, b = sample_coupled_pair(10, 0.2, 0.6, seed=3)
    assert a <= b


def test_rho_bound_for_small_p():
    rho, bound, holds = rho_upper_bound_check(0.1)
    assert holds and rho <= bound


def test_coefficient_lookup_forms():
    c = transform(RealFunctionOnCube.indicator(dictatorship(3, 2)), BiasedMeasure(0.5))
    assert c[[2]] == c[0b010] == pytest.approx(0.5)
    assert c.as_dict() == {0: pytest.approx(0.5), 2: pytest.approx(0.5)}
    f = RealFunctionOnCube.indicator(dictatorship(3, 2))
    assert f(CubePoint.from_bits([0, 1, 0])) == 1.0
    assert f(0b101) == 0.0
