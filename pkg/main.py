#!/usr/bin/env python3
"""
globalcube 主程序
每个子命令对应一个实验任务, 报告写到标准输出或 --output 指定的文件
"""
import argparse
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Type

# 添加项目根目录到路径
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root / 'src'))

from loguru import logger

from core.config import Config
from core.errors import EXIT_CHECK_FAILED, EXIT_OK, EXIT_PRECONDITION, EXIT_UNKNOWN_COMMAND, exit_code_for
from core.logger import setup_logger
from campaigns.base import Campaign
from campaigns.registry import CAMPAIGNS, get_campaign

# (参数, 配置键, 说明)
GLOBAL_FLAGS = (
    ('--config', 'config', '配置文件 (key = value), 命令行参数优先'),
    ('--output', 'output', '报告输出路径, 缺省写到标准输出'),
    ('--format', 'format', '报告格式 json (默认) 或 csv'),
    ('--workers', 'workers', '并行进程数, 1 为参考行为'),
    ('--seed', 'seed', '随机种子, 缺省取 GLOBALCUBE_SEED 或 0'),
    ('--log-level', 'log_level', '日志级别 (DEBUG/INFO/WARNING/ERROR)'),
    ('--log-path', 'log_path', '日志目录, 缺省只输出到控制台'),
    ('--save-config', 'save_config', '把生效的配置写到文件, 之后可用 --config 复现'),
)

EPILOG = """
示例:
  python main.py fourier-roundtrip --n 10 --p 0.25 --trials 100 --seed 7
  python main.py search-max --n 4 --t 1
  python main.py hall-bound --n 2 --p 0.5 --mode exact
  python main.py --format csv audit-bootstrap --grid "n=500..10000:500;t=1..20"
  python main.py list
"""


def _add_global_flags(parser: argparse.ArgumentParser):
    group = parser.add_argument_group('全局参数')
    for flag, dest, help_text in GLOBAL_FLAGS:
        group.add_argument(flag, dest=dest, default=None, help=help_text)


def build_parser() -> argparse.ArgumentParser:
    """顶层解析器: 全局参数 + 子命令名 + 子命令参数"""
    parser = argparse.ArgumentParser(
        prog='globalcube',
        description='置换族 t-相交问题的验证与探索工具箱',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog='子命令: ' + ', '.join(CAMPAIGNS) + '\n' + EPILOG,
    )
    _add_global_flags(parser)
    parser.add_argument('command', nargs='?', help='子命令')
    parser.add_argument('rest', nargs=argparse.REMAINDER, help=argparse.SUPPRESS)
    return parser


def build_campaign_parser(cls: Type[Campaign]) -> argparse.ArgumentParser:
    """
    按任务的参数声明生成子命令解析器

    全部取值保留为字符串, 由 Config.resolve 统一校验
    """
    parser = argparse.ArgumentParser(prog=f'globalcube {cls.name}', description=cls.description)
    group = parser.add_argument_group('子命令参数')
    for spec in cls.params:
        flag = '--' + spec.name.replace('_', '-')
        default = '' if spec.default is None else f' (默认: {spec.default})'
        help_text = f"{spec.help}{default}{' [必需]' if spec.required else ''}"
        if spec.kind == 'flag':
            group.add_argument(flag, dest=spec.name, nargs='?', const='true', default=None, help=help_text)
        elif spec.kind == 'choice':
            group.add_argument(flag, dest=spec.name, choices=spec.choices, default=None, help=help_text)
        else:
            group.add_argument(flag, dest=spec.name, default=None, help=help_text)
    _add_global_flags(parser)
    return parser


def _overrides(*namespaces: argparse.Namespace) -> Dict[str, Any]:
    merged: Dict[str, Any] = {}
    for ns in namespaces:
        for key, value in vars(ns).items():
            if key in ('command', 'rest', 'config', 'save_config') or value is None:
                continue
            merged[key] = value
    return merged


def run(command: str, overrides: Dict[str, Any], config_file: Optional[str] = None,
        save_config: Optional[str] = None) -> int:
    """
    运行一个子命令并写出报告

    :param command: 子命令名
    :param overrides: 命令行覆盖值
    :param config_file: 配置文件路径
    :param save_config: 生效配置的保存路径
    :return: 退出码
    """
    config = Config(config_file, overrides)
    logging_config = config.get_logging_config()
    setup_logger(log_path=logging_config['path'], level=logging_config['level'])
    if save_config:
        config.save(save_config)
        logger.info(f"配置已保存: {save_config}")

    campaign = get_campaign(command)(config)
    report = campaign.execute()
    report.write(config.get_output(), config.get_format())
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def main(argv: Optional[List[str]] = None) -> int:
    """主函数"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    if not args.command:
        parser.print_help(sys.stderr)
        return EXIT_PRECONDITION
    if args.command not in CAMPAIGNS:
        print(f"错误: 未知的子命令 '{args.command}', 可用: {', '.join(CAMPAIGNS)}", file=sys.stderr)
        return EXIT_UNKNOWN_COMMAND

    sub_parser = build_campaign_parser(CAMPAIGNS[args.command])
    try:
        sub_args = sub_parser.parse_args(args.rest)
    except SystemExit as e:
        return int(e.code or 0)

    config_file = sub_args.config or args.config
    save_config = sub_args.save_config or args.save_config
    try:
        return run(args.command, _overrides(args, sub_args), config_file, save_config)
    except KeyboardInterrupt:
        print("\n用户中断", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except Exception as e:
        code = exit_code_for(e)
        print(f"错误: {e}", file=sys.stderr)
        logger.opt(exception=e).debug(f"子命令 {args.command} 失败, 退出码 {code}")
        return code


if __name__ == '__main__':
    sys.exit(main())
