"""
Distance-based adaptive coding and modulation

Mode k is used for d_k <= d < d_{k-1} with d_0 the maximum communication
distance. Thresholds are read off the closed-form rate-versus-distance curve
so that the spectral efficiency of every mode stays below the achievable
rate per DRA over its whole distance range.
"""

from dataclasses import dataclass, replace
from enum import IntEnum
import json
import logging

import numpy as np
import pandas as pd

from aeroacm.channel import scenario_phase
from aeroacm.errors import (BelowMinimumSeparation, DomainError, EmptyTable,
                            OutOfRange)
from aeroacm.sinr import expected_rate

logger = logging.getLogger(__name__)


class Modulation(IntEnum):
    BPSK = 2
    QPSK = 4
    QAM8 = 8
    QAM16 = 16


MOD_LABEL = {Modulation.BPSK: "BPSK", Modulation.QPSK: "QPSK",
             Modulation.QAM8: "8-QAM", Modulation.QAM16: "16-QAM"}


def modulation_order(label):
    """ order from a label ("8-QAM", "8QAM", "QPSK", ...) or an integer """
    if isinstance(label, (int, np.integer)):
        return int(label)
    key = str(label).upper().replace("-", "")
    for m, lbl in MOD_LABEL.items():
        if lbl.replace("-", "") == key:
            return int(m)
    raise DomainError("unknown modulation {}".format(label))


def modulation_label(order):
    try:
        return MOD_LABEL[Modulation(order)]
    except ValueError:
        return "{}-QAM".format(order)


@dataclass(frozen=True)
class AcmMode:
    index: int
    modulation_order: int
    code_rate: float
    spectral_efficiency: float

    @property
    def modulation(self):
        return modulation_label(self.modulation_order)


@dataclass(frozen=True)
class AcmTable:
    """ modes in ascending SE with thresholds d_1 > d_2 > ... [m] """

    modes: tuple
    thresholds: tuple
    d_max: float
    dropped: tuple = ()

    def __post_init__(self):
        if not self.modes:
            raise EmptyTable("ACM table without modes")
        if len(self.modes) != len(self.thresholds):
            raise DomainError("{} modes vs {} thresholds".format(
                len(self.modes), len(self.thresholds)))
        se = [m.spectral_efficiency for m in self.modes]
        if np.any(np.diff(se) <= 0.0):
            raise DomainError("modes not strictly increasing in SE")
        t = np.asarray(self.thresholds, dtype=float)
        if np.any(np.diff(t) >= 0.0) or t[0] >= self.d_max:
            raise DomainError("thresholds not strictly decreasing below "
                              "d_max")

    @property
    def d_min(self):
        return self.thresholds[-1]

    def interval(self, k):
        """ distance range [d_k, d_k-1) of the k-th mode (0-based) """
        hi = self.d_max if k == 0 else self.thresholds[k - 1]
        return self.thresholds[k], hi

    def to_records(self):
        return [{"mode": m.index, "modulation": m.modulation,
                 "code_rate": m.code_rate,
                 "spectral_efficiency": m.spectral_efficiency,
                 "threshold_m": float(t)}
                for m, t in zip(self.modes, self.thresholds)]

    def to_frame(self, b_total, n_r):
        rows = []
        for m, t in zip(self.modes, self.thresholds):
            per_dra, total = mode_data_rates(m, b_total, n_r)
            rows.append([m.index, m.modulation, m.code_rate,
                         m.spectral_efficiency, t*1e-3, per_dra*1e-6,
                         total*1e-6])
        return pd.DataFrame(rows, columns=[
            "mode", "modulation", "code_rate", "se_bps_hz", "threshold_km",
            "rate_per_dra_mbps", "total_rate_mbps"])


def spectral_efficiency(modulation_order, code_rate, n, n_cp):
    """ log2(order) * code rate * (N - N_cp)/N [bits/s/Hz] """
    if modulation_order < 2:
        raise DomainError("modulation order {} < 2".format(modulation_order))
    if not 0.0 < code_rate <= 1.0:
        raise DomainError("code rate {} not in (0, 1]".format(code_rate))
    if n < 1 or not 0 <= n_cp < n:
        raise DomainError("need 0 <= n_cp < n, got {} and {}".format(n_cp, n))
    return np.log2(modulation_order)*code_rate*(n - n_cp)/n


def mode_data_rates(mode, b_total, n_r):
    """ (data rate per DRA, total data rate) [bits/s] """
    per_dra = mode.spectral_efficiency*b_total
    return per_dra, per_dra*n_r


def distance_grid(config, step=1000.0):
    """ grid from d_min to d_max (both included) """
    n = int(np.ceil((config.d_max - config.d_min)/step))
    return np.linspace(config.d_min, config.d_min + n*step, n + 1).clip(
        max=config.d_max)


def rate_curve(config, d_grid, mode="theoretical", seed=0, draws=50):
    """
    Closed-form rate per DRA at each distance of d_grid

    The correlation phase and the LOS draws are shared by all grid points.
    """
    d_grid = np.asarray(d_grid, dtype=float)
    if np.any(d_grid < config.d_min) or np.any(d_grid > config.d_max):
        raise DomainError("grid outside [d_min, d_max]")
    phase = scenario_phase(config, seed)
    rates = np.array([expected_rate(replace(config, link_distance=float(d)),
                                    mode, seed, draws, phase)
                      for d in d_grid])
    if np.any(np.diff(rates) > 1e-9):
        logger.warning("rate curve not monotone in distance")
    return rates


def _crossing(d, ok, se, refine, margin, tol):
    """ largest distance X with se <= curve on [d[0], X], None if none """
    if not ok[0]:
        return None
    i = len(ok) - 1 if ok.all() else int(np.argmin(ok)) - 1
    if refine is None or i == len(ok) - 1:
        return float(d[i])
    lo, hi = float(d[i]), float(d[i + 1])
    while hi - lo > tol:
        mid = 0.5*(lo + hi)
        if refine(mid) - margin >= se:
            lo = mid
        else:
            hi = mid
    return lo


def design_thresholds(d_grid, curve, modes, d_max=None, margin=0.0,
                      refine=None, tol=100.0):
    """
    Distance thresholds of an ACM table from a rate curve

    d_grid ascending [m], curve the rate per DRA on the grid. refine, if
    given, evaluates the rate at any distance and is used to bisect each
    crossing down to `tol` metres. Modes infeasible at the shortest
    distance, or whose distance range collapses, are dropped.
    """
    d = np.asarray(d_grid, dtype=float)
    c = np.asarray(curve, dtype=float) - margin
    if d.shape != c.shape or d.size < 2 or np.any(np.diff(d) <= 0.0):
        raise DomainError("grid must be ascending and match the curve")
    d_max = float(d[-1]) if d_max is None else float(d_max)
    modes = sorted(modes, key=lambda m: m.spectral_efficiency)

    dropped = []
    kept = []
    for m in modes:
        x = _crossing(d, c >= m.spectral_efficiency, m.spectral_efficiency,
                      refine, margin, tol)
        if x is None:
            logger.warning("mode {} (SE {:.3f}) above the rate curve, "
                           "dropped".format(m.index, m.spectral_efficiency))
            dropped.append((m, "above the rate curve"))
        else:
            kept.append((m, x))

    # equal reach: the higher SE mode takes over the whole range
    i = 0
    while i < len(kept) - 1:
        if kept[i + 1][1] >= kept[i][1]:
            dropped.append((kept[i][0], "empty distance range"))
            del kept[i]
        else:
            i += 1
    if kept and kept[-1][1] <= d[0]:
        dropped.append((kept[-1][0], "feasible only at the minimum distance"))
        del kept[-1]
    if not kept:
        raise EmptyTable("no ACM mode below the rate curve")

    reach = kept[0][1]
    top = min(d_max, reach) if reach < d[-1] else d_max
    if top < d_max:
        logger.warning("no mode feasible beyond {:.1f} km".format(top*1e-3))
    thresholds = [x for _, x in kept[1:]] + [float(d[0])]
    return AcmTable(tuple(m for m, _ in kept), tuple(thresholds), top,
                    tuple(dropped))


def select_mode(d, table):
    """ mode k with d_k <= d < d_k-1 """
    if d >= table.d_max:
        raise OutOfRange("{:.1f} km beyond the link range".format(d*1e-3))
    if d < table.d_min:
        raise BelowMinimumSeparation("{:.2f} km below minimum separation"
                                     .format(d*1e-3))
    for m, t in zip(table.modes, table.thresholds):
        if d >= t:
            return m
    raise BelowMinimumSeparation("{:.2f} km".format(d*1e-3))


def _mode_from_record(k, rec, n, n_cp):
    order = modulation_order(rec["modulation"])
    rate = float(rec["code_rate"])
    se = rec.get("spectral_efficiency")
    if se is None:
        se = spectral_efficiency(order, rate, n, n_cp)
    return AcmMode(int(rec.get("mode", k + 1)), order, rate, float(se))


def load_modes(path, n=512, n_cp=32):
    """ ACM modes from a JSON document {"modes": [records]} """
    with open(path, 'r') as f:
        doc = json.load(f)
    recs = doc["modes"] if isinstance(doc, dict) else doc
    return [_mode_from_record(k, r, n, n_cp) for k, r in enumerate(recs)]


def load_table(path, n=512, n_cp=32, d_max=None):
    """
    ACM table from a JSON document or from the CSV written by design-acm

    The CSV carries no d_max, it is taken from the argument; without one
    the reference 740 km is assumed and a warning logged. JSON tables
    written by save_table() are the complete form.
    """
    if str(path).endswith(".csv"):
        if d_max is None:
            logger.warning("{} carries no d_max, assuming 740 km".format(
                path))
            d_max = 740e3
        df = pd.read_csv(path)
        modes = tuple(AcmMode(int(r.mode), modulation_order(r.modulation),
                              float(r.code_rate), float(r.se_bps_hz))
                      for r in df.itertuples())
        thr = tuple(df["threshold_km"].to_numpy(dtype=float)*1e3)
        return AcmTable(modes, thr, float(d_max))
    with open(path, 'r') as f:
        doc = json.load(f)
    recs = doc["modes"]
    modes = tuple(_mode_from_record(k, r, n, n_cp)
                  for k, r in enumerate(recs))
    thr = tuple(float(r["threshold_m"]) for r in recs)
    return AcmTable(modes, thr, float(doc["d_max"] if d_max is None
                                      else d_max))


def save_table(table, path):
    doc = {"d_max": table.d_max, "modes": table.to_records()}
    with open(path, 'w') as f:
        json.dump(doc, f, indent=2)
    logger.info("ACM table written to {}".format(path))
