"""
Shared pytest fixtures
"""

import os
import sys

import pytest

ROOT = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, ROOT)

from aeroacm.config import SystemConfig  # noqa: E402


@pytest.fixture
def data_dir():
    return os.path.join(ROOT, "data")


@pytest.fixture
def small_config():
    """ 8 DTAs, 2 DRAs, 2 interferers, fixed correlation phase """
    return SystemConfig(num_dta=8, num_dra=2, num_interferers=2,
                        correlation_phase=0.4).validate()


@pytest.fixture
def default_config():
    return SystemConfig().validate()
