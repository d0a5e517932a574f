"""
globalcube 核心模块
包含配置管理、日志系统与错误分类
"""

__version__ = '1.0.0'
