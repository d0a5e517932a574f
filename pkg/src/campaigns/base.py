"""
实验任务抽象基类
定义统一的任务接口: 参数声明、运行、生成报告
"""
import time
from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from loguru import logger

from core.config import Config, ParamSpec
from core.errors import PreconditionError
from utils.report import Report


def check(name: str, holds: bool, lhs: Any = None, rhs: Any = None, relation: str = '') -> Dict[str, Any]:
    """一条检查项, 字段与常数审计一致"""
    return {'name': name, 'relation': relation, 'lhs': lhs, 'rhs': rhs, 'holds': bool(holds)}


class Campaign(ABC):
    """
    实验任务抽象基类

    子类声明 name、description 与 params, 并实现 run();
    参数在构造时按声明校验, 任何计算都在校验之后
    """

    name: str = ''
    description: str = ''
    params: Tuple[ParamSpec, ...] = ()

    def __init__(self, config: Config):
        """
        :param config: 合并了配置文件与命令行的配置对象
        """
        self.config = config
        self.values = config.resolve(self.params)
        self.seed = config.get_seed()
        self.workers = config.get_workers()

    @abstractmethod
    def run(self) -> Dict[str, Any]:
        """
        执行任务

        :return: {'success': bool, 'results': dict, 'checks': list, 'table': list 可选, 'errors': list}
        """
        pass

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    def require(self, *names: str):
        """只在某些组合下必需的参数"""
        missing = [n for n in names if self.values.get(n) is None]
        if missing:
            raise PreconditionError(f"子命令 {self.name} 缺少参数: {', '.join(missing)}")

    def config_echo(self) -> Dict[str, Any]:
        return {'params': dict(self.values), 'seed': self.seed, 'workers': self.workers}

    def execute(self) -> Report:
        """运行并计时, 生成报告"""
        logger.info(f"开始任务 {self.name}")
        start = time.perf_counter()
        result = self.run()
        elapsed = time.perf_counter() - start

        results = dict(result.get('results', {}))
        errors: List[str] = list(result.get('errors', []))
        if errors:
            results['errors'] = errors
            for message in errors:
                logger.warning(f"{self.name}: {message}")
        report = Report(self.name, self.config_echo(), results, list(result.get('checks', [])),
                        result.get('table'), elapsed)

        failed = [c['name'] for c in report.checks if not c['holds']]
        if failed:
            logger.warning(f"任务 {self.name} 有 {len(failed)} 项检查未通过: {', '.join(failed[:10])}")
        logger.info(f"任务 {self.name} 完成, 用时 {elapsed:.2f}s, 检查 {len(report.checks) - len(failed)}/{len(report.checks)} 通过")
        return report

    @classmethod
    def schema(cls) -> Dict[str, Any]:
        """参数声明的可序列化形式"""
        return {
            'name': cls.name,
            'description': cls.description,
            'params': [
                {
                    'name': spec.name,
                    'kind': spec.kind,
                    'default': spec.default,
                    'required': spec.required,
                    'help': spec.help,
                    'choices': list(spec.choices),
                }
                for spec in cls.params
            ],
        }

    def __str__(self) -> str:
        return f"Campaign({self.name})"

    def __repr__(self) -> str:
        return self.__str__()


def outcome(results: Dict[str, Any], checks: Optional[List[Dict[str, Any]]] = None,
            table: Optional[List[Dict[str, Any]]] = None, errors: Optional[List[str]] = None) -> Dict[str, Any]:
    """组装 run() 的返回值"""
    checks = checks or []
    errors = errors or []
    return {
        'success': all(c['holds'] for c in checks) and not errors,
        'results': results,
        'checks': checks,
        'table': table,
        'errors': errors,
    }
