"""
Scenario configuration

SystemConfig holds the physical scenario (SI units: W, Hz, m, K, dB),
RunControls the Monte-Carlo and output settings. Both are read from a flat
JSON scenario file with strict key checking.
"""

from dataclasses import asdict, dataclass, fields, replace
import hashlib
import json
import logging
import multiprocessing as mp
import os
from typing import Optional, Union

from aeroacm.errors import ConfigError

logger = logging.getLogger(__name__)

THREADS_ENV = "AERO_ACM_THREADS"

INTERVALS = ("link", "full")
POWER_MODELS = ("uniform", "average")


@dataclass(frozen=True)
class SystemConfig:
    """ aeronautical link scenario, defaults of the reference system """

    num_interferers: int = 4
    num_dra: int = 4
    num_dta: int = 32
    tx_power_per_antenna: float = 1.0
    num_subcarriers: int = 512
    cp_length: int = 32
    rician_k: float = 5.0
    bandwidth: float = 6e6
    carrier_freq: float = 5e9
    correlation_factor: float = 0.1
    noise_figure: float = 4.0
    link_distance: float = 10e3
    d_min: float = 5e3
    d_max: float = 740e3
    ref_temperature: float = 290.0

    # model switches
    #
    correlation_phase: Union[None, float, str] = "random"
    interferer_interval: str = "link"
    interferer_power_model: str = "uniform"
    omega_scaled_middle: bool = False
    pilot_interferer_los: bool = False
    # share of LOS power common to all links of a trial
    los_similarity: float = 0.45
    sinr_cap: float = 1e12

    def validate(self):
        for key in ("num_dra", "num_dta", "num_subcarriers"):
            if getattr(self, key) < 1:
                raise ConfigError(key, "must be >= 1")
        if self.num_interferers < 0:
            raise ConfigError("num_interferers", "must be >= 0")
        if self.cp_length < 0:
            raise ConfigError("cp_length", "must be >= 0")
        for key in ("tx_power_per_antenna", "bandwidth", "carrier_freq",
                    "link_distance", "d_min", "d_max", "ref_temperature",
                    "sinr_cap"):
            if not getattr(self, key) > 0.0:
                raise ConfigError(key, "must be > 0")
        if self.num_dra > self.num_dta:
            raise ConfigError("num_dra", "must not exceed num_dta")
        if self.cp_length >= self.num_subcarriers:
            raise ConfigError("cp_length", "must be < num_subcarriers")
        if self.rician_k < 0.0:
            raise ConfigError("rician_k", "must be >= 0")
        if not 0.0 <= self.correlation_factor < 1.0:
            raise ConfigError("correlation_factor", "must be in [0, 1)")
        if not 0.0 <= self.los_similarity <= 1.0:
            raise ConfigError("los_similarity", "must be in [0, 1]")
        if self.d_min >= self.d_max:
            raise ConfigError("d_min", "must be < d_max")
        if not self.d_min <= self.link_distance < self.d_max:
            raise ConfigError("link_distance", "must be in [d_min, d_max)")
        if self.interferer_interval not in INTERVALS:
            raise ConfigError("interferer_interval",
                              "one of {}".format(INTERVALS))
        if self.interferer_power_model not in POWER_MODELS:
            raise ConfigError("interferer_power_model",
                              "one of {}".format(POWER_MODELS))
        ph = self.correlation_phase
        if isinstance(ph, str) and ph != "random":
            raise ConfigError("correlation_phase",
                              "null, an angle or \"random\"")
        return self

    def with_value(self, name, value):
        """ validated copy with one field replaced """
        if name not in _FIELD_TYPES:
            raise ConfigError(name, "unknown parameter")
        return replace(self, **{name: value}).validate()

    def to_dict(self):
        return asdict(self)

    def config_hash(self):
        txt = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(txt.encode()).hexdigest()


@dataclass(frozen=True)
class RunControls:
    trials: int = 2000
    seed: int = 0
    grid_step: float = 1000.0
    refine_tol: float = 100.0
    output_dir: str = "out"
    inner_batch: int = 200
    los_draws: int = 50
    margin: float = 0.0
    modes_file: Optional[str] = None

    def validate(self):
        for key in ("trials", "inner_batch", "los_draws"):
            if getattr(self, key) < 1:
                raise ConfigError(key, "must be >= 1")
        if self.seed < 0:
            raise ConfigError("seed", "must be >= 0")
        for key in ("grid_step", "refine_tol"):
            if not getattr(self, key) > 0.0:
                raise ConfigError(key, "must be > 0")
        if self.margin < 0.0:
            raise ConfigError("margin", "must be >= 0")
        return self


_FIELD_TYPES = {f.name: f.type for f in fields(SystemConfig)}
_RUN_TYPES = {f.name: f.type for f in fields(RunControls)}


def _check_type(key, value, typ):
    """ type check of a JSON value against the dataclass annotation """
    if typ is bool:
        ok = isinstance(value, bool)
    elif typ is int:
        ok = isinstance(value, int) and not isinstance(value, bool)
    elif typ is float:
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
    elif typ is str:
        ok = isinstance(value, str)
    elif typ == Optional[str]:
        ok = value is None or isinstance(value, str)
    else:
        # correlation_phase
        ok = value is None or isinstance(value, str) or \
            (isinstance(value, (int, float)) and not isinstance(value, bool))
    if not ok:
        raise ConfigError(key, "invalid type {}".format(type(value).__name__))
    if typ is float:
        return float(value)
    return value


def parse_scenario(doc):
    """ Split a flat scenario mapping into (SystemConfig, RunControls) """
    if not isinstance(doc, dict):
        raise ConfigError("<root>", "scenario must be a JSON object")
    sys_kw, run_kw = {}, {}
    for key, value in doc.items():
        if key in _FIELD_TYPES:
            sys_kw[key] = _check_type(key, value, _FIELD_TYPES[key])
        elif key in _RUN_TYPES:
            run_kw[key] = _check_type(key, value, _RUN_TYPES[key])
        else:
            raise ConfigError(key, "unknown key")
    return SystemConfig(**sys_kw).validate(), RunControls(**run_kw).validate()


def load_scenario(path):
    """ Read a JSON scenario file, missing keys take the defaults """
    try:
        with open(path, 'r') as f:
            doc = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError("<file>", "{}: {}".format(path, e)) from e
    cfg, run = parse_scenario(doc)
    logger.info("scenario {} loaded, config {}".format(
        path, cfg.config_hash()[:12]))
    return cfg, run


def worker_count(requested=None):
    """ --jobs value, else AERO_ACM_THREADS, else half the CPUs """
    if requested is not None:
        n = int(requested)
    elif os.environ.get(THREADS_ENV):
        try:
            n = int(os.environ[THREADS_ENV])
        except ValueError as e:
            raise ConfigError(THREADS_ENV, "not an integer") from e
    else:
        n = int(mp.cpu_count()/2)
    return max(n, 1)
