"""
置换族组合模块
相交族、嵌入与耦合、密度凸起与证明常数审计
"""

__version__ = '1.0.0'
