"""
密度凸起、限制链与常数审计测试
"""
import math
import time
from fractions import Fraction

import pytest

from core.errors import PreconditionError
from combinatorics.bump import (
    audit_bootstrap, audit_claim52, audit_prop41_cases, density_bump, floor_factorial_over_e,
    induction_basis_bound, r_monotonicity, r_of, restriction_chain,
)
from combinatorics.families import PermFamily, UmvirateSpec, all_permutations, umvirate


def test_density_bump_on_dictator():
    report = density_bump(umvirate(UmvirateSpec.fixing([1]), 4))
    assert (report.best_i, report.best_j) == (1, 1)
    assert report.ratio_exact == 4
    assert report.counts.sum() == 6 * 4


def test_density_bump_is_flat_on_whole_group():
    report = density_bump(all_permutations(4))
    assert report.ratio_exact == 1
    assert (report.best_i, report.best_j) == (1, 1)


def test_density_bump_empty():
    with pytest.raises(PreconditionError):
        density_bump(PermFamily.empty(3))


def test_restriction_chain_finds_common_umvirate():
    F = umvirate(UmvirateSpec.fixing([1, 2]), 5)
    report = restriction_chain(F, F, 2)
    assert report.cross_intersecting
    assert report.final_containment
    assert report.spec == UmvirateSpec(((1, 1), (2, 2)))
    assert [step.retained_a for step in report.steps] == [1.0, 1.0]


def test_restriction_chain_retention_drops_on_whole_group():
    everything = all_permutations(4)
    report = restriction_chain(everything, everything, 2)
    assert not report.cross_intersecting
    assert not report.final_containment
    assert report.steps[0].retained_a == pytest.approx(1 / 4)
    assert report.steps[1].retained_a == pytest.approx(1 / 12)


def test_restriction_chain_rejects_bad_t():
    F = umvirate(UmvirateSpec.fixing([1]), 4)
    with pytest.raises(PreconditionError):
        restriction_chain(F, F, 5)


@pytest.mark.parametrize('n,t', [(500, 1), (1000, 2), (5000, 10)])
def test_claim52_in_regime(n, t):
    audit = audit_claim52(n, t)
    assert audit.all_hold, audit.failed()


def test_claim52_retention_at_500():
    audit = audit_claim52(500, 1)
    assert audit.bounds['retention'] == pytest.approx(float(Fraction(6 * 500 * 499, 450 * 499 * 499)))
    assert audit.bounds['retention'] <= 7 / 500
    assert audit.bounds['lower_root'] < 50 < 450 < audit.bounds['upper_root']


def test_claim52_mid_bump_is_excluded():
    audit = audit_claim52(500, 1, a=100)
    assert set(audit.failed()) == {'quadratic_at_a', 'concentration'}


def test_claim52_outside_regime_reports_regime_failure():
    audit = audit_claim52(100, 1)
    assert 'regime' in audit.failed()
    assert audit.to_dict()['all_hold'] is False


def test_claim52_preconditions():
    with pytest.raises(PreconditionError):
        audit_claim52(40, 1)
    with pytest.raises(PreconditionError):
        audit_claim52(500, 1, c=2)


@pytest.mark.parametrize('m', range(12))
def test_floor_factorial_over_e(m):
    assert floor_factorial_over_e(m) == math.floor(math.factorial(m) / math.e)


@pytest.mark.parametrize('n,t', [(500, 1), (1000, 2)])
def test_bootstrap_in_regime(n, t):
    audit = audit_bootstrap(n, t)
    assert audit.all_hold, audit.failed()
    assert audit.bounds['ceil_ratio'] == pytest.approx(1 - math.exp(-1))


def _regime_grid():
    return [(n, t) for t in range(1, 21) for n in range(500 * t, 10001, 500)]


@pytest.mark.slow
def test_bootstrap_over_regime_grid():
    grid = _regime_grid()
    assert len(grid) == 210
    start = time.perf_counter()
    for n, t in grid:
        audit = audit_bootstrap(n, t)
        assert audit.all_hold, (n, t, audit.failed())
    assert time.perf_counter() - start < 10


@pytest.mark.slow
def test_claim52_and_r_monotonicity_over_regime_grid():
    for n, t in _regime_grid():
        audit = audit_claim52(n, t)
        assert audit.all_hold, (n, t, audit.failed())
        # ⌊499t⌋ <= n - 1 在整个网格上成立
        assert r_monotonicity(n, t, 499).all_hold, (n, t)


def test_bootstrap_stability_factor():
    check = next(c for c in audit_bootstrap(500, 1).checks if c.name == 'stability_factor')
    assert check.lhs == pytest.approx((100 / 98) ** 2 * (1 - math.exp(-1)))
    assert check.lhs == pytest.approx(0.6582, abs=1e-4)


def test_prop41_boundaries():
    audit = audit_prop41_cases(10 ** 4, 1, 50, Fraction(2, 3), 2, s=10)
    assert audit.bounds['large_t_boundary'] == pytest.approx(2171.5, abs=0.1)
    assert audit.bounds['small_t_boundary'] == pytest.approx(117.9, abs=0.1)
    assert audit.bounds['hypothesis_boundary'] == pytest.approx(20)
    checks = {c.name: c for c in audit.checks}
    assert checks['hypothesis'].holds
    assert checks['bump_union_bound'].holds
    assert checks['global_union_bound'].holds


def test_prop41_large_t_restriction_is_reported():
    audit = audit_prop41_cases(10 ** 6, 2000, 50, Fraction(2, 3), 2)
    assert 'large_t_restriction' in audit.failed()


def test_prop41_preconditions():
    with pytest.raises(PreconditionError):
        audit_prop41_cases(100, 1, 50, Fraction(2, 3), 1)
    with pytest.raises(PreconditionError):
        audit_prop41_cases(100, 1, 50, 1, 2)


@pytest.mark.parametrize('n,t,exact,binom,two_n', [(4, 2, 7, 12, 32), (3, 1, 4, 6, 16)])
def test_induction_basis_bound(n, t, exact, binom, two_n):
    bound = induction_basis_bound(n, t)
    assert (bound.exact_count, bound.binom_bound, bound.two_n_bound) == (exact, binom, two_n)
    assert bound.enumerated == exact
    assert bound.chain_holds


def test_r_of():
    assert r_of(1000, 1, 500) == 1
    assert r_of(600, 1, 500) == 4 ** 400
    with pytest.raises(PreconditionError):
        r_of(10, 1, 500)


def test_r_monotonicity():
    audit = r_monotonicity(600, 1, 500)
    assert audit.all_hold
    assert audit.bounds['log4_r'] == 400
    with pytest.raises(PreconditionError):
        r_monotonicity(500, 1, 500)
