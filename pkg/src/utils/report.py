"""
报告输出
JSON (默认) 或 CSV; 有理数写成 "a/b", numpy 值转成原生类型
"""
import dataclasses
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd
from loguru import logger

from core import __version__

TOOL = 'globalcube'
FORMATS = ('json', 'csv')


def to_jsonable(value: Any) -> Any:
    """递归转换为可 JSON 序列化的结构"""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, Fraction):
        return str(value) if value.denominator != 1 else value.numerator
    if isinstance(value, (int, float)):
        return value
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()] if value.dtype == object else value.tolist()
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [to_jsonable(v) for v in items]
    if hasattr(value, 'to_dict'):
        return to_jsonable(value.to_dict())
    if dataclasses.is_dataclass(value):
        return to_jsonable({f.name: getattr(value, f.name) for f in dataclasses.fields(value)})
    return str(value)


@dataclasses.dataclass
class Report:
    """
    一次运行的报告

    results 与 checks 是确定性的载荷, wall_clock_seconds 是唯一随运行变化的字段
    """
    campaign: str
    config: Dict[str, Any]
    results: Dict[str, Any]
    checks: List[Dict[str, Any]] = dataclasses.field(default_factory=list)
    table: Optional[List[Dict[str, Any]]] = None
    wall_clock_seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(bool(c.get('holds', True)) for c in self.checks) and not self.results.get('errors')

    def to_dict(self) -> Dict[str, Any]:
        data = {
            'tool': TOOL,
            'version': __version__,
            'campaign': self.campaign,
            'config': to_jsonable(self.config),
            'results': to_jsonable(self.results),
            'checks': to_jsonable(self.checks),
        }
        if self.table:
            data['table'] = to_jsonable(self.table)
        data['wall_clock_seconds'] = round(self.wall_clock_seconds, 6)
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2)

    def to_frame(self) -> pd.DataFrame:
        """CSV 视图: 有表格用表格, 否则用检查项, 再否则把结果摊平成一行"""
        if self.table:
            return pd.DataFrame(to_jsonable(self.table))
        if self.checks:
            return pd.DataFrame(to_jsonable(self.checks))
        return pd.json_normalize(to_jsonable(self.results))

    def render(self, fmt: str = 'json') -> str:
        if fmt == 'csv':
            return self.to_frame().to_csv(index=False)
        return self.to_json() + '\n'

    def write(self, output: Optional[str] = None, fmt: str = 'json'):
        """
        写出报告

        :param output: 文件路径, 为空时写到标准输出
        :param fmt: json 或 csv
        """
        text = self.render(fmt)
        if not output:
            sys.stdout.write(text)
            return
        path = Path(output)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding='utf-8')
        logger.info(f"报告已写入: {path}")
