"""
置换族与立方体族相关任务
精确极值搜索、偏置 Ahlswede–Khachatrian 族、反例族与稳定性例子
"""
import math
from fractions import Fraction
from typing import Any, Dict

from loguru import logger

from core.config import ParamSpec
from combinatorics.families import (
    ENUMERATE_ALL_CAP, ak_family, ak_measure, ak_sweep, containing_umvirate, counterexample_family,
    max_t_intersecting, max_t_intersecting_cube, max_t_intersecting_cube_monotone, maximal_cliques_oracle,
    stability_check, stability_family,
)
from analysis.cube import BiasedMeasure, measure
from campaigns.base import Campaign, check, outcome
from utils.formats import dump_perm_family

STABILITY_TARGET = 1 - math.exp(-1)


class SearchMaxCampaign(Campaign):
    name = 'search-max'
    description = 'S_n 中最大 t-相交族 (或交叉对的最大 |A||B|) 的精确搜索'
    params = (
        ParamSpec('n', 'int', required=True, help='置换规模, 不超过 7'),
        ParamSpec('t', 'int', required=True, help='相交参数'),
        ParamSpec('mode', 'choice', default='single', choices=('single', 'cross'), help='单族或交叉对'),
        ParamSpec('enumerate_all', 'flag', help='枚举全部最大见证, 缺省 n <= 4 时枚举'),
        ParamSpec('oracle', 'flag', default=False, help=f'用 networkx 团枚举独立核对 (n <= {ENUMERATE_ALL_CAP})'),
    )

    def run(self) -> Dict[str, Any]:
        n, t, mode = self.values['n'], self.values['t'], self.values['mode']
        result = max_t_intersecting(n, t, mode, self.values['enumerate_all'])
        results = {
            'n': n, 't': t, 'mode': mode,
            'max_size': result.max_size,
            'umvirate_size': result.umvirate_size,
            'witness_count': result.witness_count,
            'witness_scope': result.witness_scope,
            'all_umvirates': result.all_umvirates,
        }
        checks = []
        if self.values['oracle']:
            if mode != 'single':
                return outcome(results, errors=['oracle 只适用于 single 模式'])
            size, cliques = maximal_cliques_oracle(n, t)
            results['oracle_max_size'] = size
            results['oracle_witness_count'] = len(cliques)
            checks.append(check('oracle_max_size', size == result.max_size, result.max_size, size,
                                '分支定界 = networkx 团枚举'))
            if result.witness_scope == 'all':
                same = sorted(map(tuple, (w.as_tuples() for w in result.witnesses))) == \
                    sorted(map(tuple, (c.as_tuples() for c in cliques)))
                checks.append(check('oracle_witnesses', same, relation='最大见证集合一致'))
        return outcome(results, checks)


class SearchMaxCubeCampaign(Campaign):
    name = 'search-max-cube'
    description = '{0,1}^n 中 t-相交族的最大 μ_p: 加权团搜索与单调族枚举两条路线对照'
    params = (
        ParamSpec('n', 'int', required=True, help='维数, 不超过 4'),
        ParamSpec('t', 'int', required=True, help='相交参数'),
        ParamSpec('p', 'prob', default=Fraction(1, 3), help='偏置'),
    )

    def run(self) -> Dict[str, Any]:
        n, t, p = self.values['n'], self.values['t'], self.values['p']
        best, family = max_t_intersecting_cube(n, t, p)
        monotone_best = max_t_intersecting_cube_monotone(n, t, p)
        results = {'n': n, 't': t, 'p': p, 'max_measure': best, 'monotone_max_measure': monotone_best,
                   'witness': sorted(family.members)}
        checks = [check('routes_agree', _close(best, monotone_best), best, monotone_best, '团搜索 = 单调族枚举')]
        return outcome(results, checks)


def _close(a, b) -> bool:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    return abs(float(a) - float(b)) <= 1e-12


class VerifyAKCampaign(Campaign):
    name = 'verify-ak'
    description = '偏置 Ahlswede–Khachatrian 族: μ_p(F_{t,r}) 扫描, 上界 base^t, 以及小规模穷举对照'
    params = (
        ParamSpec('t_max', 'int', default=10, help='扫描的最大 t'),
        ParamSpec('r_max', 'int', default=5, help='扫描的最大 r'),
        ParamSpec('p', 'prob', default=Fraction(1, 3), help='偏置'),
        ParamSpec('bound_base', 'float', default=0.85, help='上界底数'),
        ParamSpec('search_n', 'int', default=3, help='穷举对照的维数, 0 表示跳过'),
        ParamSpec('search_t', 'int', default=1, help='穷举对照的相交参数'),
    )

    def run(self) -> Dict[str, Any]:
        p = self.values['p']
        rows = ak_sweep(self.values['t_max'], self.values['r_max'], p, self.values['bound_base'])
        failed = [row.t for row in rows if not row.holds]
        results: Dict[str, Any] = {'p': p, 'rows': len(rows), 'failed_t': failed}
        checks = [check('sweep_bound', not failed, len(failed), 0, 'max_r μ_p(F_{t,r}) <= base^t 的失败个数')]

        if p == Fraction(1, 3):
            # F_{1,1} 在 {0,1}^3 上: 至少两个 1, μ_{1/3} = 7/27
            f11 = ak_measure(1, 1, p)
            direct = measure(ak_family(1, 1, 3), BiasedMeasure(p))
            results['ak_1_1'] = f11
            checks.append(check('ak_1_1', f11 == direct == Fraction(7, 27), f11, Fraction(7, 27),
                                'μ_{1/3}(F_{1,1}) = 7/27'))

        search_n, search_t = self.values['search_n'], self.values['search_t']
        if search_n:
            best, _ = max_t_intersecting_cube(search_n, search_t, p)
            ak_best = max(ak_measure(search_t, r, p) for r in range((search_n - search_t) // 2 + 1))
            results['search_max'] = best
            results['ak_max'] = ak_best
            checks.append(check('search_matches_ak', _close(best, ak_best), best, ak_best,
                                f'{search_n} 维穷举最大值 = max_r μ_p(F_{{{search_t},r}})'))
        table = [vars(row) for row in rows]
        return outcome(results, checks, table=table)


class CounterexampleCampaign(Campaign):
    name = 'counterexample'
    description = '[t+2] 中至少 t+1 个不动点的置换族: 规模公式、超过 (n-t)!、t-相交'
    params = (
        ParamSpec('n', 'int', required=True, help='置换规模'),
        ParamSpec('t', 'int', required=True, help='相交参数'),
        ParamSpec('dump', 'path', help='把族写成 perm 文件'),
    )

    def run(self) -> Dict[str, Any]:
        n, t = self.values['n'], self.values['t']
        result = counterexample_family(n, t)
        results = {'n': n, 't': t, 'size': result.size, 'formula': result.formula,
                   'umvirate_size': result.umvirate_size, 'exceeds_umvirate': result.exceeds_umvirate,
                   't_intersecting': result.t_intersecting, 'filter_agrees': result.filter_agrees}
        checks = [
            check('size_formula', result.size == result.formula, result.size, result.formula,
                  '|F| = (t+2)(n-t-1)! - (t+1)(n-t-2)!'),
            check('exceeds_umvirate', result.exceeds_umvirate, result.size, result.umvirate_size, '|F| > (n-t)!'),
            check('t_intersecting', result.t_intersecting, relation='F 是 t-相交的'),
        ]
        if result.filter_agrees is not None:
            checks.append(check('filter_agrees', result.filter_agrees, relation='直接构造 = S_n 过滤'))
        if self.values['dump']:
            dump_perm_family(result.family, self.values['dump'])
            results['dump'] = self.values['dump']
            logger.info(f"反例族已写入 {self.values['dump']}")
        return outcome(results, checks)


class StabilityCampaign(Campaign):
    name = 'stability'
    description = '稳定性例子 (A, B): |B|/(n-t)! 趋于 1-1/e, 以及阈值断言的一致性'
    params = (
        ParamSpec('n', 'int', required=True, help='置换规模'),
        ParamSpec('t', 'int', required=True, help='相交参数'),
        ParamSpec('threshold', 'prob', default=Fraction(3, 4), help='稳定性阈值'),
        ParamSpec('tolerance', 'float', default=0.05, help='|B|/(n-t)! 与 1-1/e 的容差'),
    )

    def run(self) -> Dict[str, Any]:
        n, t = self.values['n'], self.values['t']
        example = stability_family(n, t)
        report = stability_check(example.A, example.B, t, self.values['threshold'])
        single_reaches = Fraction(len(example.single_family), math.factorial(n - t)) >= self.values['threshold']
        single_container = containing_umvirate(example.single_family, example.single_family, t)
        tolerance = float(self.values['tolerance'])

        results = {
            'n': n, 't': t,
            'size_a': len(example.A), 'size_b': len(example.B),
            'ratio_b': example.ratio_exact, 'ratio_b_float': example.ratio,
            'single_ratio': example.single_ratio, 'single_intersecting': example.single_intersecting,
            'pair_ratio': report.ratio, 'reaches_threshold': report.reaches_threshold,
            'container': None if report.container is None else list(report.container.pairs),
            'single_reaches_threshold': single_reaches,
        }
        # 阈值断言: 达到阈值的交叉 t-相交对必落在同一个 t-独裁族中
        consistent = (not report.reaches_threshold or report.container is not None) and \
            (not single_reaches or single_container is not None)
        checks = [
            check('cross_intersecting', example.cross_intersecting, relation='(A, B) 交叉 t-相交'),
            check('single_intersecting', example.single_intersecting, relation='B ∪ {σ} 是 t-相交的'),
            check('ratio_near_limit', abs(example.ratio - STABILITY_TARGET) <= tolerance,
                  example.ratio, STABILITY_TARGET, '| |B|/(n-t)! - (1-1/e) | <= tolerance'),
            check('threshold_consistent', consistent, relation='达到阈值 => 存在公共 t-独裁族'),
        ]
        return outcome(results, checks)
