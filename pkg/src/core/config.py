"""
配置管理模块
纯文本 `key = value` 配置文件 + 命令行覆盖 + GLOBALCUBE_SEED 环境变量兜底
"""
import os
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple

from dotenv import load_dotenv

from core.errors import PreconditionError

SEED_ENV = 'GLOBALCUBE_SEED'

PARAM_KINDS = ('int', 'float', 'prob', 'str', 'choice', 'range', 'path', 'flag')

# 所有子命令共享的全局参数
GLOBAL_KEYS = ('seed', 'workers', 'output', 'format', 'log_level', 'log_path')

_KEY_RE = re.compile(r'^[A-Za-z_][A-Za-z0-9_]*$')
_RANGE_RE = re.compile(r'^(-?\d+)\.\.(-?\d+)(?::(\d+))?$')
_TRUE = {'1', 'true', 'yes', 'on'}
_FALSE = {'0', 'false', 'no', 'off'}


def parse_number(raw: Any, name: str = 'value'):
    """
    解析数值: `a/b` 为精确有理数, 整数字面量为 int, 其余为 float

    :param raw: 原始值 (字符串或已是数值)
    :param name: 参数名, 用于报错
    :return: int / Fraction / float
    """
    if isinstance(raw, bool):
        raise PreconditionError(f"参数 '{name}' 不是数值: {raw!r}")
    if isinstance(raw, (int, float, Fraction)):
        return raw
    text = str(raw).strip()
    try:
        if '/' in text:
            return Fraction(text)
        if re.fullmatch(r'[+-]?\d+', text):
            return int(text)
        value = float(text)
    except (ValueError, ZeroDivisionError):
        raise PreconditionError(f"参数 '{name}' 不是合法数值: {raw!r}")
    if value != value or value in (float('inf'), float('-inf')):
        raise PreconditionError(f"参数 '{name}' 必须是有限数值: {raw!r}")
    return value


def parse_grid(text: str) -> Dict[str, List[int]]:
    """
    解析网格参数, 例如 `n=500..10000:500;t=1..20` 或 `n=4,6,9`

    :param text: 网格描述
    :return: {轴名: 取值列表}
    """
    grid: Dict[str, List[int]] = {}
    for part in re.split(r'[;\s]+', str(text).strip()):
        if not part:
            continue
        if '=' not in part:
            raise PreconditionError(f"网格轴格式错误 (应为 name=a..b:step): {part}")
        axis, spec = part.split('=', 1)
        axis = axis.strip()
        if not _KEY_RE.match(axis):
            raise PreconditionError(f"网格轴名非法: {axis}")
        match = _RANGE_RE.match(spec.strip())
        if match:
            start, stop = int(match.group(1)), int(match.group(2))
            step = int(match.group(3) or 1)
            if step <= 0 or stop < start:
                raise PreconditionError(f"网格范围非法: {part}")
            values = list(range(start, stop + 1, step))
        else:
            try:
                values = [int(v) for v in spec.split(',') if v.strip()]
            except ValueError:
                raise PreconditionError(f"网格取值必须是整数: {part}")
        if not values:
            raise PreconditionError(f"网格轴为空: {part}")
        grid[axis] = values
    if not grid:
        raise PreconditionError("网格参数为空")
    return grid


def render_grid(grid: Dict[str, List[int]]) -> str:
    """网格的文本形式, parse_grid 的逆"""
    parts = []
    for axis, values in grid.items():
        steps = {b - a for a, b in zip(values, values[1:])}
        if len(values) >= 2 and len(steps) == 1 and steps.pop() > 0:
            step = values[1] - values[0]
            suffix = '' if step == 1 else f':{step}'
            parts.append(f"{axis}={values[0]}..{values[-1]}{suffix}")
        else:
            parts.append(f"{axis}={','.join(str(v) for v in values)}")
    return ';'.join(parts)


@dataclass(frozen=True)
class ParamSpec:
    """
    子命令参数声明

    kind 取值见 PARAM_KINDS; prob 要求落在 [0, 1]
    """
    name: str
    kind: str
    default: Any = None
    required: bool = False
    help: str = ''
    choices: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in PARAM_KINDS:
            raise ValueError(f"参数 '{self.name}' 的类型未知: {self.kind}")

    def parse(self, raw: Any) -> Any:
        """
        按声明的类型解析一个原始值

        :param raw: 字符串或已解析的值
        :return: 解析后的值
        """
        name = self.name
        if raw is None:
            return None
        if self.kind == 'int':
            value = parse_number(raw, name)
            if isinstance(value, Fraction) and value.denominator == 1:
                value = int(value)
            if isinstance(value, float) and value.is_integer():
                value = int(value)
            if not isinstance(value, int):
                raise PreconditionError(f"参数 '{name}' 必须是整数: {raw!r}")
            return value
        if self.kind in ('float', 'prob'):
            value = parse_number(raw, name)
            if isinstance(value, int):
                value = Fraction(value) if self.kind == 'prob' else value
            if self.kind == 'prob' and not 0 <= value <= 1:
                raise PreconditionError(f"参数 '{name}' 必须在 [0, 1] 内: {raw!r}")
            return value
        if self.kind == 'flag':
            if isinstance(raw, bool):
                return raw
            text = str(raw).strip().lower()
            if text in _TRUE:
                return True
            if text in _FALSE:
                return False
            raise PreconditionError(f"参数 '{name}' 必须是布尔值: {raw!r}")
        if self.kind == 'choice':
            text = str(raw).strip()
            if text not in self.choices:
                raise PreconditionError(f"参数 '{name}' 必须是 {'/'.join(self.choices)} 之一: {raw!r}")
            return text
        if self.kind == 'range':
            if isinstance(raw, dict):
                return raw
            return parse_grid(raw)
        return str(raw).strip()

    def render(self, value: Any) -> str:
        """值的文本形式, parse 的逆"""
        if self.kind == 'flag':
            return 'true' if value else 'false'
        if self.kind == 'range':
            return render_grid(value)
        if isinstance(value, float):
            return repr(value)
        return str(value)


def parse_config_text(text: str, source: str = '<text>') -> Dict[str, str]:
    """
    解析 `key = value` 文本, 忽略空行与 `#` 注释

    :param text: 配置文本
    :param source: 来源描述, 用于报错
    :return: 原始字符串字典
    """
    data: Dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split('#', 1)[0].strip()
        if not stripped:
            continue
        if '=' not in stripped:
            raise PreconditionError(f"{source}:{lineno} 缺少 '=': {line.strip()}")
        key, value = stripped.split('=', 1)
        key = key.strip().replace('-', '_')
        if not _KEY_RE.match(key):
            raise PreconditionError(f"{source}:{lineno} 配置键非法: {key}")
        data[key] = value.strip()
    return data


def render_config(values: Dict[str, Any], schema: Optional[Iterable[ParamSpec]] = None) -> str:
    """
    把参数值渲染为 `key = value` 文本, None 值省略

    :param values: 参数值
    :param schema: 参数声明 (决定渲染方式), 缺省按值类型渲染
    :return: 配置文本
    """
    specs = {spec.name: spec for spec in (schema or [])}
    lines = []
    for key, value in values.items():
        if value is None:
            continue
        spec = specs.get(key)
        if spec is not None:
            lines.append(f"{key} = {spec.render(value)}")
        elif isinstance(value, bool):
            lines.append(f"{key} = {'true' if value else 'false'}")
        elif isinstance(value, float):
            lines.append(f"{key} = {value!r}")
        else:
            lines.append(f"{key} = {value}")
    return '\n'.join(lines) + ('\n' if lines else '')


class Config:
    """配置管理类"""

    def __init__(self, config_file: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None,
                 env_file: Optional[str] = '.env'):
        """
        加载配置

        :param config_file: 配置文件路径, 可为空
        :param overrides: 命令行覆盖值, None 值不覆盖
        :param env_file: dotenv 文件, 用于 GLOBALCUBE_SEED 兜底
        """
        self.config_file = config_file
        self.env_file = env_file
        self.data: Dict[str, Any] = {}

        if config_file:
            if not os.path.exists(config_file):
                raise FileNotFoundError(f"配置文件不存在: {config_file}")
            text = Path(config_file).read_text(encoding='utf-8')
            self.data.update(parse_config_text(text, source=config_file))

        for key, value in (overrides or {}).items():
            if value is not None:
                self.data[key.replace('-', '_')] = value

        self._validate_config()

    @classmethod
    def from_text(cls, text: str, overrides: Optional[Dict[str, Any]] = None) -> 'Config':
        """从配置文本构造 (不读文件, 不读 .env)"""
        config = cls(config_file=None, overrides=None, env_file=None)
        config.data.update(parse_config_text(text))
        for key, value in (overrides or {}).items():
            if value is not None:
                config.data[key] = value
        config._validate_config()
        return config

    def _validate_config(self):
        """验证全局参数"""
        if 'workers' in self.data:
            workers = ParamSpec('workers', 'int').parse(self.data['workers'])
            if workers <= 0:
                raise PreconditionError("'workers' 必须是正整数")
        if 'format' in self.data:
            ParamSpec('format', 'choice', choices=('json', 'csv')).parse(self.data['format'])
        if 'seed' in self.data:
            seed = ParamSpec('seed', 'int').parse(self.data['seed'])
            if seed < 0:
                raise PreconditionError("'seed' 必须是非负整数")

    def get(self, key: str, default: Any = None) -> Any:
        """原始值"""
        return self.data.get(key, default)

    def get_seed(self) -> int:
        """
        随机种子: 配置/命令行 > GLOBALCUBE_SEED > 0

        :return: 种子
        """
        if self.data.get('seed') is not None:
            return ParamSpec('seed', 'int').parse(self.data['seed'])
        if self.env_file and os.path.exists(self.env_file):
            load_dotenv(self.env_file, override=False)
        env_value = os.environ.get(SEED_ENV)
        if env_value:
            seed = ParamSpec(SEED_ENV, 'int').parse(env_value)
            if seed < 0:
                raise PreconditionError(f"{SEED_ENV} 必须是非负整数")
            return seed
        return 0

    def get_workers(self) -> int:
        return ParamSpec('workers', 'int').parse(self.data.get('workers', 1))

    def get_output(self) -> Optional[str]:
        return self.data.get('output')

    def get_format(self) -> str:
        return str(self.data.get('format', 'json'))

    def get_logging_config(self) -> Dict[str, Any]:
        """日志配置"""
        return {
            'level': str(self.data.get('log_level', 'INFO')).upper(),
            'path': self.data.get('log_path'),
        }

    def resolve(self, schema: Iterable[ParamSpec]) -> Dict[str, Any]:
        """
        按子命令参数声明校验并解析, 在任何计算之前调用

        :param schema: 参数声明
        :return: 解析后的参数字典 (不含全局参数)
        """
        specs = list(schema)
        known = {spec.name for spec in specs} | set(GLOBAL_KEYS)
        unknown = sorted(set(self.data) - known)
        if unknown:
            raise PreconditionError(f"未知参数: {', '.join(unknown)}")

        values: Dict[str, Any] = {}
        for spec in specs:
            raw = self.data.get(spec.name)
            if raw is None:
                if spec.required:
                    raise PreconditionError(f"缺少必需参数 '{spec.name}'")
                values[spec.name] = spec.default
            else:
                values[spec.name] = spec.parse(raw)
        return values

    def save(self, path: str):
        """保存生效的配置 (含实际种子), 之后可用 --config 复现同一次运行"""
        data = {**self.data, 'seed': self.get_seed()}
        Path(path).write_text(render_config(data), encoding='utf-8')
