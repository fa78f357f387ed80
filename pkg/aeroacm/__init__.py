"""
aeroacm - asymptotic rate analysis and distance-based adaptive coding and
modulation for aeronautical massive MIMO links
"""

from aeroacm.acm import (AcmMode, AcmTable, design_thresholds, rate_curve,
                         select_mode, spectral_efficiency)
from aeroacm.config import RunControls, SystemConfig, load_scenario
from aeroacm.errors import AcmError
from aeroacm.montecarlo import ccdf, run_sweep, run_trial
from aeroacm.sinr import asymptotic_sinr, expected_rate

__version__ = "0.1.0"

__all__ = [
    "AcmError", "AcmMode", "AcmTable", "RunControls", "SystemConfig",
    "asymptotic_sinr", "ccdf", "design_thresholds", "expected_rate",
    "load_scenario", "rate_curve", "run_sweep", "run_trial", "select_mode",
    "spectral_efficiency",
]
