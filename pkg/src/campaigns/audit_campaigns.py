"""
密度凸起与证明常数相关任务
密度凸起、限制链、集中度/自举/三情形算术、归纳基础、r(n, t) 单调性
"""
from fractions import Fraction
from typing import Any, Callable, Dict, List, Tuple

import numpy as np
from loguru import logger

from core.config import ParamSpec
from core.errors import PreconditionError
from combinatorics.bump import (
    DEFAULT_DENSITY, REGIME_FACTOR, ConstantAudit, audit_bootstrap, audit_claim52, audit_prop41_cases,
    density_bump, induction_basis_bound, r_monotonicity, restriction_chain,
)
from campaigns.base import Campaign, check, outcome
from campaigns.inputs import grid_points, perm_family
from utils.parallel import parallel_map


class BumpCampaign(Campaign):
    name = 'bump'
    description = '相对密度最大的字典族 (S_n)_{i->j} 及完整密度表'
    params = (
        ParamSpec('family', 'str', required=True, help='置换族描述或 perm 文件'),
        ParamSpec('n', 'int', help='置换规模 (内置族必需)'),
        ParamSpec('t', 'int', help='内置族使用的相交参数'),
    )

    def run(self) -> Dict[str, Any]:
        F = perm_family(self.values['family'], self.values['n'], self.values['t'])
        report = density_bump(F)
        size = len(F)
        # 每个起点 (每个终点) 把 F 划分成 n 份
        rows_ok = bool(np.all(report.counts.sum(axis=1) == size))
        cols_ok = bool(np.all(report.counts.sum(axis=0) == size))
        results = {
            'n': F.n, 'size': size,
            'best_i': report.best_i, 'best_j': report.best_j,
            'ratio': report.ratio, 'ratio_exact': report.ratio_exact,
            'table': np.round(report.table, 12).tolist(),
        }
        table = [
            {'i': i + 1, 'j': j + 1, 'count': int(report.counts[i, j]), 'density': float(report.table[i, j])}
            for i in range(F.n) for j in range(F.n)
        ]
        checks = [check('partition', rows_ok and cols_ok, relation='Σ_j |F_{i->j}| = Σ_i |F_{i->j}| = |F|'),
                  check('bump_at_least_one', report.ratio_exact >= 1, report.ratio_exact, 1,
                        'max_{i,j} |F_{i->j}|·n/|F| >= 1')]
        return outcome(results, checks, table=table)


class ChainCampaign(Campaign):
    name = 'chain'
    description = '把交叉 t-相交对 (A, B) 逐步限制到同一个 t-独裁族上, 报告每步保留比例'
    params = (
        ParamSpec('a', 'str', required=True, help='族 A 的描述或 perm 文件'),
        ParamSpec('b', 'str', required=True, help='族 B 的描述或 perm 文件'),
        ParamSpec('n', 'int', help='置换规模 (内置族必需)'),
        ParamSpec('t', 'int', required=True, help='相交参数'),
    )

    def run(self) -> Dict[str, Any]:
        n, t = self.values['n'], self.values['t']
        A = perm_family(self.values['a'], n, t)
        B = perm_family(self.values['b'], n, t)
        report = restriction_chain(A, B, t)
        table = [vars(step) for step in report.steps]

        def non_increasing(values: List[int]) -> bool:
            return all(later <= earlier for earlier, later in zip(values, values[1:]))

        results = {
            'n': A.n, 't': t, 'size_a': len(A), 'size_b': len(B),
            'cross_intersecting': report.cross_intersecting,
            'final_containment': report.final_containment,
            'spec': [list(pair) for pair in report.spec.pairs],
        }
        checks = [
            check('retained_a_monotone', non_increasing([s.kept_a for s in report.steps]),
                  relation='A 的保留个数逐步不增'),
            check('retained_b_monotone', non_increasing([s.kept_b for s in report.steps]),
                  relation='B 的保留个数逐步不增'),
        ]
        return outcome(results, checks, table=table)


# ---------------------------------------------------------------------------
# 证明常数审计: 单点或网格
# ---------------------------------------------------------------------------

def _claim52(n: int, t: int, options: Dict[str, Any]) -> ConstantAudit:
    return audit_claim52(n, t, options.get('a'), options.get('c', DEFAULT_DENSITY))


def _bootstrap(n: int, t: int, options: Dict[str, Any]) -> ConstantAudit:
    return audit_bootstrap(n, t)


def _r_audit(n: int, t: int, options: Dict[str, Any]) -> ConstantAudit:
    return r_monotonicity(n, t, options['c0'])


AUDITS: Dict[str, Callable[[int, int, Dict[str, Any]], ConstantAudit]] = {
    'claim52': _claim52,
    'bootstrap': _bootstrap,
    'r': _r_audit,
}


def _audit_point(args: Tuple[str, int, int, Dict[str, Any]]) -> Dict[str, Any]:
    kind, n, t, options = args
    try:
        audit = AUDITS[kind](n, t, options)
    except PreconditionError as e:
        return {'n': n, 't': t, 'skipped': str(e)}
    return {'n': n, 't': t, **audit.to_dict()}


class _ConstantAuditCampaign(Campaign):
    """单点模式直接给出审计的检查项; 网格模式每个 (n, t) 汇总为一条检查, 表格列出全部检查项"""

    kind = ''

    def options(self) -> Dict[str, Any]:
        return {}

    def run(self) -> Dict[str, Any]:
        grid = self.values.get('grid')
        if not grid:
            self.require('n', 't')
            audit = AUDITS[self.kind](self.values['n'], self.values['t'], self.options())
            data = audit.to_dict()
            results = {**data['inputs'], 'bounds': data['bounds'], 'all_hold': data['all_hold']}
            return outcome(results, data['checks'])

        points = list(grid_points(grid, ('n', 't')))
        regime_only = self.values.get('regime_only', False)
        skipped_regime = 0
        tasks = []
        for point in points:
            if regime_only and point['n'] < REGIME_FACTOR * point['t']:
                skipped_regime += 1
                continue
            tasks.append((self.kind, point['n'], point['t'], self.options()))

        rows = parallel_map(_audit_point, tasks, workers=self.workers, desc=self.name)
        checks, table, skipped = [], [], []
        for row in rows:
            n, t = row['n'], row['t']
            if 'skipped' in row:
                skipped.append({'n': n, 't': t, 'reason': row['skipped']})
                continue
            failed = [c['name'] for c in row['checks'] if not c['holds']]
            checks.append(check(f'n={n},t={t}', row['all_hold'], len(failed), 0,
                                '未通过: ' + ','.join(failed) if failed else '全部成立'))
            table.extend({'n': n, 't': t, **c} for c in row['checks'])
        if skipped:
            logger.warning(f"{self.name}: {len(skipped)} 个网格点不满足前置条件, 已跳过")
        results = {
            'grid_points': len(points),
            'audited': len(checks),
            'skipped_regime': skipped_regime,
            'skipped_precondition': skipped,
            'all_hold': all(c['holds'] for c in checks),
        }
        return outcome(results, checks, table=table)


class Claim52Campaign(_ConstantAuditCampaign):
    name = 'audit-claim52'
    description = '字典族集中度论证的算术: 判别式、根区间与保留比例链条 (精确有理数)'
    kind = 'claim52'
    params = (
        ParamSpec('n', 'int', help='置换规模, > 50'),
        ParamSpec('t', 'int', help='相交参数'),
        ParamSpec('a', 'float', help='最大字典族的规模参数, 缺省为 n'),
        ParamSpec('c', 'prob', default=DEFAULT_DENSITY, help='乘积密度常数'),
        ParamSpec('grid', 'range', help='网格, 如 n=500..10000:500;t=1..20'),
        ParamSpec('regime_only', 'flag', default=True, help='网格中只审计 n >= 500t 的点'),
    )

    def options(self) -> Dict[str, Any]:
        return {'a': self.values['a'], 'c': self.values['c']}


class BootstrapCampaign(_ConstantAuditCampaign):
    name = 'audit-bootstrap'
    description = '自举论证的算术: (1-7/n)^{2t} >= 0.94、(100/98)^2(1-1/e) < 2/3 与阶乘乘积 (精确整数)'
    kind = 'bootstrap'
    params = (
        ParamSpec('n', 'int', help='置换规模, > 7'),
        ParamSpec('t', 'int', help='相交参数'),
        ParamSpec('grid', 'range', help='网格, 如 n=500..10000:500;t=1..20'),
        ParamSpec('regime_only', 'flag', default=True, help='网格中只审计 n >= 500t 的点'),
    )


class RAuditCampaign(_ConstantAuditCampaign):
    name = 'r-audit'
    description = 'r(n, t) = max(4^(2⌊c0·t⌋-n), 1) 的两条单调关系'
    kind = 'r'
    params = (
        ParamSpec('n', 'int', help='置换规模'),
        ParamSpec('t', 'int', help='相交参数, >= 1'),
        ParamSpec('c0', 'float', default=REGIME_FACTOR, help='常数 c0'),
        ParamSpec('grid', 'range', help='网格, 如 n=500..10000:500;t=1..20'),
        ParamSpec('regime_only', 'flag', default=False, help='网格中只审计 n >= 500t 的点'),
    )

    def options(self) -> Dict[str, Any]:
        return {'c0': self.values['c0']}


class Prop41Campaign(Campaign):
    name = 'audit-prop41'
    description = '密度凸起论证三种情形的数值骨架: 情形边界与 |S| 的上界'
    params = (
        ParamSpec('n', 'int', required=True, help='置换规模'),
        ParamSpec('t', 'int', required=True, help='相交参数'),
        ParamSpec('k', 'int', default=50, help='凸起因子'),
        ParamSpec('c', 'prob', default=Fraction(2, 3), help='乘积下界常数'),
        ParamSpec('g', 'float', required=True, help='全局性参数, > 1'),
        ParamSpec('g_prime', 'float', help="第二次全局限制的参数, 缺省同 g"),
        ParamSpec('p', 'prob', help='嵌入后的偏置, 缺省 min(1, 10 ln n / n)'),
        ParamSpec('s', 'int', help='检查 |S| = s 的并集界'),
    )

    def run(self) -> Dict[str, Any]:
        v = self.values
        audit = audit_prop41_cases(v['n'], v['t'], v['k'], v['c'], v['g'], v['g_prime'], v['p'], v['s'])
        data = audit.to_dict()
        results = {**data['inputs'], 'bounds': data['bounds'], 'all_hold': data['all_hold']}
        return outcome(results, data['checks'])


class BasisBoundCampaign(Campaign):
    name = 'basis-bound'
    description = '与恒等置换至少 t 处一致的置换个数及其上界 C(n,t)(n-t)! <= 2^n (n-t)!'
    params = (
        ParamSpec('n', 'int', required=True, help='置换规模'),
        ParamSpec('t', 'int', required=True, help='相交参数'),
        ParamSpec('enumerate', 'flag', help='枚举 S_n 核对闭式, 缺省 n <= 8 时核对'),
    )

    def run(self) -> Dict[str, Any]:
        n, t = self.values['n'], self.values['t']
        bound = induction_basis_bound(n, t, self.values['enumerate'])
        results = {'n': n, 't': t, 'exact_count': bound.exact_count, 'binom_bound': bound.binom_bound,
                   'two_n_bound': bound.two_n_bound, 'enumerated': bound.enumerated}
        checks = [check('chain', bound.chain_holds, bound.exact_count, bound.two_n_bound,
                        '精确值 <= C(n,t)(n-t)! <= 2^n (n-t)!')]
        if bound.enumerated is not None:
            checks.append(check('enumeration', bound.enumerated == bound.exact_count, bound.enumerated,
                                bound.exact_count, '枚举 = Σ_j C(n,j) D(n-j)'))
        return outcome(results, checks)

