"""
工具函数模块
文件格式、统计检验、并行任务池与报告输出
"""

__version__ = '1.0.0'
