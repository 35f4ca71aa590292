"""
测试公共夹具
内置导子、随机数生成器以及 hypothesis 的随机导子策略
"""

import numpy as np
import pytest
from hypothesis import strategies as st

from src.core.cantor import cantor_derivator
from src.core.catalog import example1_g, gderexample_g, non_tvs_g, random_derivator
from src.utils.config import AppConfig


@pytest.fixture
def config():
    return AppConfig()


@pytest.fixture
def gderexample():
    return gderexample_g()


@pytest.fixture
def example1():
    return example1_g()


@pytest.fixture
def non_tvs():
    return non_tvs_g()


@pytest.fixture(scope="session")
def cantor10():
    return cantor_derivator(10)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@st.composite
def derivators(draw, with_jumps: bool = True):
    """由种子生成的随机有限导子"""
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    return random_derivator(np.random.default_rng(seed), with_jumps=with_jumps)


@st.composite
def derivators_with_rng(draw):
    """(导子, 同种子派生的生成器)，供随机函数构造使用"""
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    rng = np.random.default_rng(seed)
    return random_derivator(rng), rng
