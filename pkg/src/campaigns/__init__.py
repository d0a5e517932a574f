"""
实验任务模块
每个子命令对应一个 Campaign, 由注册表统一调度
"""

__version__ = '1.0.0'
