"""
日志系统模块
基于 loguru 实现日志管理,支持文件轮转、多级别输出
"""
import sys
from datetime import datetime
from pathlib import Path
from typing import Optional

from loguru import logger

_LEVEL_ORDER = {'TRACE': 5, 'DEBUG': 10, 'INFO': 20, 'SUCCESS': 25, 'WARNING': 30, 'ERROR': 40, 'CRITICAL': 50}

# 未初始化时不显示进度条 (库被直接调用的场景,如测试)
_current_level = 'WARNING'


def setup_logger(log_path: Optional[str] = None, level: str = 'INFO',
                 max_bytes: int = 10485760, backup_count: int = 5):
    """
    配置日志系统

    控制台输出写到 stderr, stdout 留给报告

    :param log_path: 日志目录, 为空则只输出到控制台
    :param level: 日志级别 (DEBUG/INFO/WARNING/ERROR)
    :param max_bytes: 单个日志文件最大字节数 (默认10MB)
    :param backup_count: 保留的备份文件数量
    :return: logger 实例
    """
    global _current_level

    level = level.upper()
    if level not in _LEVEL_ORDER:
        raise ValueError(f"未知的日志级别: {level}")
    _current_level = level

    # 移除默认的 handler
    logger.remove()

    log_format = (
        "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | "
        "<level>{level: <8}</level> | "
        "<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> - "
        "<level>{message}</level>"
    )

    # 控制台输出 (带颜色)
    logger.add(
        sys.stderr,
        format=log_format,
        level=level,
        colorize=True,
        enqueue=True
    )

    if not log_path:
        return logger

    log_dir = Path(log_path)
    log_dir.mkdir(parents=True, exist_ok=True)
    log_file = log_dir / f"globalcube_{datetime.now().strftime('%Y%m%d')}.log"

    # 文件输出 (无颜色,支持轮转)
    logger.add(
        log_file,
        format=(
            "{time:YYYY-MM-DD HH:mm:ss} | "
            "{level: <8} | "
            "{name}:{function}:{line} - "
            "{message}"
        ),
        level=level,
        rotation=max_bytes,
        retention=backup_count,
        compression="zip",
        encoding="utf-8",
        enqueue=True
    )

    logger.debug(f"日志文件: {log_file}, 轮转 {max_bytes} bytes, 保留 {backup_count} 个")
    return logger


def progress_disabled() -> bool:
    """日志级别高于 INFO 时关闭 tqdm 进度条"""
    return _LEVEL_ORDER[_current_level] > _LEVEL_ORDER['INFO']
