"""
傅里叶相关任务
变换往返与 Parseval、字符正交性、单侧噪声算子的两种计算方式对照
"""
from typing import Any, Dict

import numpy as np
from loguru import logger
from tqdm import tqdm

from core.config import ParamSpec
from core.logger import progress_disabled
from analysis.cube import BiasedMeasure
from analysis.fourier import (
    RealFunctionOnCube, coupling_expectation, expectation, inverse_transform, level_weights, noise_rho,
    one_sided_noise, orthonormality_error, sample_coupled_pairs, transform,
)
from campaigns.base import Campaign, check, outcome
from campaigns.inputs import cube_family
from utils.formats import dump_coeffs, load_coeffs
from utils.stats import within_sigmas

ROUNDTRIP_TOL = 1e-10
ORTHONORMAL_TOL = 1e-12
# 字符正交性检查的维数上限
ORTHONORMAL_CHECK_CAP = 8


class FourierRoundtripCampaign(Campaign):
    name = 'fourier-roundtrip'
    description = '随机函数 (或给定族的指示函数) 的变换往返误差与 Parseval 误差'
    params = (
        ParamSpec('n', 'int', required=True, help='维数'),
        ParamSpec('p', 'prob', default=0.5, help='偏置'),
        ParamSpec('trials', 'int', default=100, help='随机函数个数'),
        ParamSpec('family', 'str', help='改为变换该族的指示函数'),
        ParamSpec('dump', 'path', help='把最后一个系数表写成 CSV 并读回核对'),
    )

    def run(self) -> Dict[str, Any]:
        n, p = self.values['n'], self.values['p']
        m = BiasedMeasure(p)
        rng = self.rng()

        if self.values['family']:
            functions = [RealFunctionOnCube.indicator(cube_family(self.values['family'], n, rng))]
        else:
            if self.values['trials'] <= 0:
                return outcome({}, errors=[f"trials 必须为正: {self.values['trials']}"])
            functions = [RealFunctionOnCube(n, rng.standard_normal(1 << n)) for _ in range(self.values['trials'])]

        max_error = parseval_error = 0.0
        coeffs = None
        for f in tqdm(functions, desc='傅里叶往返', disable=progress_disabled() or len(functions) == 1):
            coeffs = transform(f, m)
            back = inverse_transform(coeffs)
            max_error = max(max_error, float(np.max(np.abs(back.values - f.values))))
            second_moment = expectation(RealFunctionOnCube(n, f.values ** 2), m)
            parseval_error = max(parseval_error, abs(float(np.sum(coeffs.coeffs ** 2)) - second_moment))

        results = {
            'n': n, 'p': p, 'functions': len(functions),
            'max_error': max_error, 'parseval_error': parseval_error,
            'level_weights': level_weights(coeffs).tolist(),
        }
        checks = [
            check('roundtrip', max_error <= ROUNDTRIP_TOL, max_error, ROUNDTRIP_TOL, 'max |T^-1 T f - f| <= 1e-10'),
            check('parseval', parseval_error <= ROUNDTRIP_TOL, parseval_error, ROUNDTRIP_TOL,
                  '|Σ f̂(S)^2 - E[f^2]| <= 1e-10'),
        ]
        if n <= ORTHONORMAL_CHECK_CAP:
            ortho = orthonormality_error(n, p)
            results['orthonormality_error'] = ortho
            checks.append(check('orthonormality', ortho <= ORTHONORMAL_TOL, ortho, ORTHONORMAL_TOL,
                                'max |<χ_S, χ_T> - δ_ST| <= 1e-12'))

        if self.values['dump']:
            dump_coeffs(coeffs, self.values['dump'])
            reloaded = load_coeffs(self.values['dump'])
            same = reloaded.dim == coeffs.dim and np.array_equal(reloaded.coeffs, coeffs.coeffs)
            results['dump'] = self.values['dump']
            checks.append(check('coefficient_file', same, relation='系数 CSV 读回后逐项相等'))
        return outcome(results, checks)


class NoiseCheckCampaign(Campaign):
    name = 'noise-check'
    description = 'T_{q->p} 的傅里叶乘子形式与耦合期望逐点对照, 并检查耦合采样的边缘分布'
    params = (
        ParamSpec('n', 'int', default=6, help='维数'),
        ParamSpec('q', 'prob', required=True, help='源偏置'),
        ParamSpec('p', 'prob', required=True, help='目标偏置, 须大于 q'),
        ParamSpec('functions', 'int', default=50, help='随机函数个数'),
        ParamSpec('samples', 'int', default=20000, help='耦合采样个数'),
    )

    def run(self) -> Dict[str, Any]:
        n, q, p = self.values['n'], self.values['q'], self.values['p']
        rho = noise_rho(q, p)
        source = BiasedMeasure(q)
        rng = self.rng()

        max_diff = 0.0
        for _ in tqdm(range(self.values['functions']), desc='噪声算子', disable=progress_disabled()):
            f = RealFunctionOnCube(n, rng.standard_normal(1 << n))
            by_fourier = inverse_transform(one_sided_noise(transform(f, source), p))
            by_coupling = coupling_expectation(f, q, p)
            max_diff = max(max_diff, float(np.max(np.abs(by_fourier.values - by_coupling.values))))

        samples = self.values['samples']
        x, y = sample_coupled_pairs(n, q, p, samples, seed=rng)
        mean_x, mean_y = float(x.mean()), float(y.mean())
        dominated = bool(np.all(x <= y))
        logger.info(f"T_{{{q}->{p}}}: ρ = {rho.rho:.6f}, 最大逐点差 {max_diff:.3e}")

        results = {'n': n, 'q': q, 'p': p, 'rho': rho.rho, 'max_difference': max_diff,
                   'sample_mean_x': mean_x, 'sample_mean_y': mean_y}
        checks = [
            check('fourier_vs_coupling', max_diff <= ROUNDTRIP_TOL, max_diff, ROUNDTRIP_TOL,
                  'max |T f (乘子) - E[f(x) | y]| <= 1e-10'),
            check('coupling_order', dominated, relation='x <= y 逐坐标'),
            check('marginal_x', within_sigmas(mean_x, float(q), samples * n), mean_x, float(q), 'x 的边缘均值在 q ± 3σ 内'),
            check('marginal_y', within_sigmas(mean_y, float(p), samples * n), mean_y, float(p), 'y 的边缘均值在 p ± 3σ 内'),
        ]
        return outcome(results, checks)
