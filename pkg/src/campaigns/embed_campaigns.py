"""
嵌入与耦合相关任务
S_n -> {0,1}^{n^2} 的嵌入保真度、x ~ μ_p 与 σ 的耦合、μ_p(U) 的 Hall 界
"""
import itertools
from fractions import Fraction
from typing import Any, Dict

from loguru import logger

from core.config import ParamSpec
from analysis.cube import BiasedMeasure, measure, up_closure
from combinatorics.embed import (
    LIFT_CAP, WordPoint, common_ones, coupling_marginal_test, coupling_sample, embed_family, embed_perm,
    embed_word, embed_word_family, embedding_measure_factor, hall_bound, hall_threshold, is_t_intersecting_words,
    lifted_measure, word_agreement,
)
from combinatorics.families import agreement, all_permutations, is_t_intersecting, is_t_intersecting_cube
from campaigns.base import Campaign, check, outcome
from campaigns.inputs import perm_family

# 逐对核对 |E(σ) ∧ E(τ)| = agreement 的规模上限
AGREEMENT_CHECK_CAP = 5
# up-closure 交叉核对的上限 (2^{n^2} 个点)
UP_CLOSURE_CHECK_CAP = 4


class CouplingCampaign(Campaign):
    name = 'coupling'
    description = 'x ~ μ_p, σ 在 {σ : E(σ) <= x} 中均匀: σ 的边缘分布对 S_n 均匀的卡方检验'
    params = (
        ParamSpec('n', 'int', default=3, help='置换规模'),
        ParamSpec('p', 'prob', default=0.5, help='偏置'),
        ParamSpec('samples', 'int', default=20000, help='样本数'),
        ParamSpec('alpha', 'float', default=0.001, help='显著性水平'),
    )

    def run(self) -> Dict[str, Any]:
        n, p = self.values['n'], self.values['p']
        report = coupling_marginal_test(n, p, self.values['samples'], seed=self.seed, workers=self.workers)
        example = coupling_sample(n, p, seed=self.rng())
        results = {
            'n': n, 'p': p, 'samples': report.samples,
            'counts': report.counts, 'chi2': report.chi2, 'p_value': report.p_value,
            'dominated_fraction': report.dominated_fraction, 'exact_uniform': report.exact_uniform,
            'example': {
                'x': example.x.rows(), 'sigma': list(example.sigma.image),
                'dominated': example.dominated, 'prospects': example.prospects,
            },
        }
        alpha = float(self.values['alpha'])
        checks = [check('marginal_uniform', report.p_value >= alpha, report.p_value, alpha,
                        '卡方 p 值 >= alpha (不拒绝均匀)')]
        return outcome(results, checks)


class HallBoundCampaign(Campaign):
    name = 'hall-bound'
    description = 'μ_p(U), U = {x : 存在 σ 使 E(σ) <= x}: 精确枚举或蒙特卡洛 + Wilson 区间, 以及联合界余项'
    params = (
        ParamSpec('n', 'int', required=True, help='矩阵规模'),
        ParamSpec('p', 'prob', help='偏置, 缺省为 min(1, 10 ln n / n)'),
        ParamSpec('samples', 'int', default=10000, help='蒙特卡洛样本数'),
        ParamSpec('mode', 'choice', default='auto', choices=('auto', 'exact', 'mc'), help='计算方式'),
        ParamSpec('confidence', 'float', default=0.99, help='Wilson 区间置信水平'),
    )

    def run(self) -> Dict[str, Any]:
        n = self.values['n']
        p = self.values['p']
        if p is None:
            p = hall_threshold(n)[0]
        bound = hall_bound(n, p, self.values['samples'], seed=self.seed, mode=self.values['mode'],
                           workers=self.workers, confidence=float(self.values['confidence']))
        results = {
            'n': n, 'p': p, 'mu_U': bound.mu_u, 'exact': bound.exact,
            'ci_low': bound.ci_low, 'ci_high': bound.ci_high,
            'successes': bound.successes, 'samples': bound.samples,
            'union_bound_residual': bound.union_bound_residual,
            'threshold': bound.threshold, 'vacuous': bound.vacuous,
        }
        checks = []
        if bound.exact and n <= UP_CLOSURE_CHECK_CAP:
            # U 恰为嵌入置换族的上闭包
            direct = measure(up_closure(embed_family(all_permutations(n))), BiasedMeasure(p, allow_one=True))
            results['up_closure_measure'] = direct
            same = direct == bound.mu_u if isinstance(direct, Fraction) else abs(direct - bound.mu_u) <= 1e-12
            checks.append(check('up_closure', same, bound.mu_u, direct, 'Hall 枚举 = 上闭包测度'))
        in_regime = float(p) >= bound.threshold - 1e-12 and not bound.vacuous
        if in_regime and not bound.exact:
            checks.append(check('wilson_low', bound.ci_low >= 0.5, bound.ci_low, 0.5, 'Wilson 下界 >= 1/2'))
        if in_regime:
            checks.append(check('union_bound', bound.union_bound_residual <= 0.5, bound.union_bound_residual, 0.5,
                                'Σ_k C(n,k)C(n,k-1)(1-p)^{k(n-k+1)} <= 1/2'))
        elif not bound.exact:
            logger.warning(f"p = {float(p):.4f} 不在 p >= 10 ln n / n 的非空洞区间内, 只报告数值")
        return outcome(results, checks)


class EmbedCheckCampaign(Campaign):
    name = 'embed-check'
    description = '嵌入保真度: 公共 1 的个数等于一致位置数, t-相交在两种嵌入下保持, 以及测度因子'
    params = (
        ParamSpec('n', 'int', default=4, help='置换规模'),
        ParamSpec('t', 'int', default=1, help='相交参数'),
        ParamSpec('family', 'str', default='umvirate', help='置换族描述或 perm 文件'),
        ParamSpec('p', 'prob', help='测度因子的偏置, 缺省 1/n'),
        ParamSpec('lift_p', 'prob', default=Fraction(1, 2), help=f'提升测度的偏置 (n <= {LIFT_CAP})'),
        ParamSpec('words', 'int', default=1000, help='随机词对个数'),
    )

    def run(self) -> Dict[str, Any]:
        n, t = self.values['n'], self.values['t']
        rng = self.rng()
        results: Dict[str, Any] = {'n': n, 't': t}
        checks = []

        if n <= AGREEMENT_CHECK_CAP:
            perms = list(all_permutations(n))
            embedded = [embed_perm(sigma) for sigma in perms]
            mismatches = sum(
                1 for (a, x), (b, y) in itertools.product(zip(perms, embedded), repeat=2)
                if common_ones(x, y) != agreement(a, b)
            )
            results['perm_pairs'] = len(perms) ** 2
            checks.append(check('perm_agreement', mismatches == 0, mismatches, 0,
                                '|E(σ) ∧ E(τ)| = agreement(σ, τ), 全部 S_n 对'))

        word_mismatches = 0
        for _ in range(self.values['words']):
            w = WordPoint(tuple(rng.integers(1, n + 1, size=n)))
            v = WordPoint(tuple(rng.integers(1, n + 1, size=n)))
            if common_ones(embed_word(w), embed_word(v)) != word_agreement(w, v):
                word_mismatches += 1
        checks.append(check('word_agreement', word_mismatches == 0, word_mismatches, 0,
                            '|E(w) ∧ E(v)| = 一致位置数, 随机词对'))

        F = perm_family(self.values['family'], n, t)
        perm_side = is_t_intersecting(F, t)
        cube_side = is_t_intersecting_cube(embed_family(F), t)
        results['family_size'] = len(F)
        results['family_t_intersecting'] = perm_side
        checks.append(check('perm_preserved', perm_side == cube_side, cube_side, perm_side,
                            'F 的 t-相交性 = E(F) 的 t-相交性'))

        # 前 t 个字母固定为 1..t 的随机词, 以及它们与 F 中置换对应的词
        head = tuple(range(1, t + 1))
        words = [WordPoint(row) for row in F.as_tuples()[:20]]
        words += [WordPoint(head + tuple(rng.integers(1, n + 1, size=n - t))) for _ in range(20)]
        word_side = is_t_intersecting_words(words, t)
        word_cube_side = is_t_intersecting_cube(embed_word_family(words), t)
        checks.append(check('word_preserved', word_side == word_cube_side, word_cube_side, word_side,
                            '词族的 t-相交性 = 嵌入后的 t-相交性'))

        p = self.values['p'] if self.values['p'] is not None else Fraction(1, n)
        factor = embedding_measure_factor(n, p)
        results['measure_factor'] = vars(factor)
        if p == Fraction(1, n):
            checks.append(check('measure_factor', factor.holds, factor.point_mass_ratio, factor.bound,
                                'p = 1/n 时 n^n p^n (1-p)^{n^2-n} >= e^{-n}'))

        if n <= LIFT_CAP:
            lifted = lifted_measure(F, self.values['lift_p'])
            results['lifted'] = {'p': self.values['lift_p'], 'mu_lifted': lifted.mu_lifted,
                                 'mu_uniform': lifted.mu_uniform, 'half_bound_holds': lifted.half_bound_holds}
        return outcome(results, checks)
