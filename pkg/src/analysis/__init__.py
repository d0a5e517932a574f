"""
偏置超立方体分析模块
立方族与偏置测度、p-偏置傅里叶分析、全局性
"""

__version__ = '1.0.0'
