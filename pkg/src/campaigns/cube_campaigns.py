"""
立方体相关任务: FKG 不等式扫描
"""
import itertools
from typing import Any, Dict

from loguru import logger
from tqdm import tqdm

from core.config import ParamSpec
from core.errors import ResourceGuardError
from core.logger import progress_disabled
from analysis.cube import BiasedMeasure, fkg_check, monotone_families, random_monotone_family
from campaigns.base import Campaign, check, outcome

# 穷举全部单调族对的维数上限 (n = 4 时 168^2 对)
EXHAUSTIVE_FKG_CAP = 4


class FKGSuiteCampaign(Campaign):
    name = 'fkg-suite'
    description = '单调族对上的 FKG 不等式 μ(F∩G) >= μ(F)μ(G): 小维数穷举, 否则随机'
    params = (
        ParamSpec('n', 'int', required=True, help='维数'),
        ParamSpec('p', 'prob', default=0.5, help='偏置'),
        ParamSpec('mode', 'choice', default='auto', choices=('auto', 'exhaustive', 'random'),
                  help=f'auto 在 n <= {EXHAUSTIVE_FKG_CAP} 时穷举'),
        ParamSpec('pairs', 'int', default=1000, help='随机模式下的族对数'),
    )

    def run(self) -> Dict[str, Any]:
        n, p = self.values['n'], self.values['p']
        m = BiasedMeasure(p)
        mode = self.values['mode']
        if mode == 'auto':
            mode = 'exhaustive' if n <= EXHAUSTIVE_FKG_CAP else 'random'

        if mode == 'exhaustive':
            if n > EXHAUSTIVE_FKG_CAP:
                raise ResourceGuardError(f"FKG 穷举要求 n <= {EXHAUSTIVE_FKG_CAP}, 实际 n = {n}")
            families = monotone_families(n)
            pairs = itertools.product(families, repeat=2)
            total = len(families) ** 2
        else:
            rng = self.rng()
            total = self.values['pairs']
            pairs = ((random_monotone_family(n, rng), random_monotone_family(n, rng)) for _ in range(total))

        violations = 0
        worst_gap = None
        for F, G in tqdm(pairs, total=total, desc='FKG', disable=progress_disabled()):
            result = fkg_check(F, G, m)
            gap = float(result.lhs - result.rhs)
            worst_gap = gap if worst_gap is None else min(worst_gap, gap)
            if not result.holds:
                violations += 1
                logger.warning(f"FKG 违反: |F| = {len(F)}, |G| = {len(G)}, 差 {gap:.3e}")

        results = {'n': n, 'p': p, 'mode': mode, 'pairs': total, 'violations': violations,
                   'min_gap': worst_gap}
        checks = [check('fkg', violations == 0, violations, 0, '违反次数 = 0 (容差 1e-12)')]
        return outcome(results, checks)
