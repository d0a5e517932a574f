"""
测试公共配置
把 src 加入路径, 并提供固定种子的随机数发生器
"""
import sys
from pathlib import Path

import numpy as np
import pytest

project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root / 'src'))
sys.path.insert(0, str(project_root))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240607)
