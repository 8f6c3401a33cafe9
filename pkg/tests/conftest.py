"""pytest設定ファイル"""
import os
import sys

import numpy as np
import pytest

# srcディレクトリをPythonパスに追加
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from lattice import Grid1D  # noqa: E402
from states import (  # noqa: E402
    cat_wave,
    gaussian_wave,
    sinc_linear_wave,
    sinc_quadratic_wave,
)


@pytest.fixture
def plus_grid():
    """F+ 用の格子（間隔 1/64）"""
    return Grid1D(-8.0, 8.0, 1025)


@pytest.fixture
def sinc_grid():
    """sinc(p^2) 用の広い格子（間隔 1/32）"""
    return Grid1D(-32.0, 32.0, 2049)


@pytest.fixture
def gaussian(plus_grid):
    return gaussian_wave(plus_grid, 1.0)


@pytest.fixture
def sinc_quadratic(sinc_grid):
    return sinc_quadratic_wave(sinc_grid)


@pytest.fixture
def sinc_linear():
    return sinc_linear_wave(Grid1D(-256.0, 256.0, 4097))


@pytest.fixture
def cat(plus_grid):
    return cat_wave(plus_grid, 1.0, 5.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)
