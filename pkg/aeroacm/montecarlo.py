"""
Monte-Carlo engine: pilot -> MMSE estimate -> MF precoding -> data phase

Every trial owns the random stream RngStream(seed, point*2^32 + trial), so a
sweep gives the same numbers whatever the worker count or execution order.
Sub-streams of a trial:
  0 LOS set, 1/2 interferer distances (training/data), 3 desired scattering,
  4 desired pilot noise, 5 symbols and receiver noise, 16+a interferer a,
  2^16+k replica k of the desired link
"""

from dataclasses import dataclass
from functools import lru_cache
import logging
import multiprocessing as mp
import os

import numpy as np
import pandas as pd
from tqdm import tqdm

from aeroacm.channel import (compose_channel, draw_los_set, draw_scattered,
                             interferer_distances, received_power,
                             scenario_phase)
from aeroacm.errors import DomainError, EmptySamples, InvalidAxis
from aeroacm.estimation import dft_pilot, mmse_estimate, simulate_pilot_rx
from aeroacm.numerics import RngStream
from aeroacm.precoding import (Precoder, decompose_terms, measured_gains,
                                mf_precoder)
from aeroacm.sinr import evaluate_link, link_estimation, rate_per_dra

logger = logging.getLogger(__name__)

TRIAL_SPAN = 2**32

# replica k > 0 of the desired link draws from sub-stream GAIN_STREAM + k
GAIN_STREAM = 2**16

# sweep axis -> (SystemConfig field, type)
AXES = {
    "A": ("num_interferers", int),
    "d_ab": ("link_distance", float),
    "N_t": ("num_dta", int),
    "N_r": ("num_dra", int),
    "rho": ("correlation_factor", float),
    "K_Rice": ("rician_k", float),
}


@dataclass(frozen=True)
class TrialResult:
    per_dra_sinr: tuple
    rate_per_dra: float
    theoretical_rate: float
    approximate_rate: float

    def __post_init__(self):
        v = np.array(self.per_dra_sinr + (self.rate_per_dra,))
        if not np.all(np.isfinite(v)) or self.rate_per_dra < 0.0:
            raise DomainError("non-finite or negative trial result")


@dataclass(frozen=True, eq=False)
class SweepResult:
    """ rate per DRA [bits/s/Hz] along one sweep axis """

    axis_name: str
    axis_values: tuple
    theoretical: np.ndarray
    approximate: np.ndarray
    simulated_mean: np.ndarray
    stderr: np.ndarray
    samples: tuple
    n_r: tuple

    def __post_init__(self):
        n = len(self.axis_values)
        for s in (self.theoretical, self.approximate, self.simulated_mean,
                  self.stderr, self.samples, self.n_r):
            if len(s) != n:
                raise DomainError("sweep series of unequal length")

    def to_frame(self, total=False):
        """ sweep table, sums over the DRAs with total=True """
        k = np.asarray(self.n_r, dtype=float) if total else 1.0
        return pd.DataFrame({
            "axis_value": np.asarray(self.axis_values, dtype=float),
            "theoretical": self.theoretical*k,
            "approximate": self.approximate*k,
            "simulated_mean": self.simulated_mean*k,
            "stderr": self.stderr*k,
        })


def _interferer_stream(stream, a):
    return stream.child(16 + a)


def _interferer_powers(config, budget, stream):
    """ received training and data powers of the interferers """
    n_a = config.num_interferers
    if config.interferer_power_model == "average" or n_a == 0:
        return [budget.p_bar]*n_a, [budget.p_bar]*n_a
    pw = [[received_power(config.tx_power_per_antenna, config.carrier_freq,
                          d)
           for d in interferer_distances(config, n_a, stream.child(k))]
          for k in (1, 2)]
    return pw[0], pw[1]


def _desired_link(config, stats, los, budget, p_train, stream, perfect_csi):
    """ one realization of the desired channel and its MF precoder

    Reads sub-streams 3, 4 and 16+a.4 of `stream`. """
    p, nv = budget.p_desired, budget.noise_var
    real = compose_channel(stats, draw_scattered(stats, stream.child(3)))
    if perfect_csi:
        return real, mf_precoder(real.h_true)
    contam = []
    for a in range(config.num_interferers):
        h_r = draw_scattered(stats, _interferer_stream(stream, a).child(4))
        if config.pilot_interferer_los:
            contam.append(compose_channel(
                stats.with_mean(los.cross[a]), h_r).h_true)
        else:
            contam.append(stats.varsigma*h_r)
    obs = simulate_pilot_rx([real] + contam, [p] + list(p_train),
                            dft_pilot(config.num_dra), nv, stream.child(4))
    return real, mf_precoder(mmse_estimate(obs, stats, p, budget.p_interf,
                                           nv))


def run_trial(config, stream, batch=200, phase=None, perfect_csi=False,
              base=None, gain_draws=16):
    """
    One full trial at the configured link distance

    Interfering transmitters serve their own receivers at the same distance
    and reuse the desired pilot block. The mean matched gain of each DRA is
    the sample mean over the trial's channel and `gain_draws` - 1 further
    scattering, contamination and pilot-noise draws for the same LOS set.
    The five signal parts are averaged over `batch` symbol and noise draws
    with the channels fixed.
    """
    if base is None:
        base = link_estimation(config, phase)
    budget, stats0, _ = base
    p, nv = budget.p_desired, budget.noise_var
    n_a = config.num_interferers
    pilot = dft_pilot(config.num_dra)

    los = draw_los_set(config, stream.child(0))
    p_train, p_data = _interferer_powers(config, budget, stream)
    stats = stats0.with_mean(los.desired)

    links = [_desired_link(config, stats, los, budget, p_train,
                           stream if k == 0 else
                           stream.child(GAIN_STREAM + k), perfect_csi)
             for k in range(max(gain_draws, 1))]
    real, pre = links[0]
    mean_gain = measured_gains([r.data_side for r, _ in links],
                               [v for _, v in links])

    interferers = []
    for a in range(n_a):
        sub = _interferer_stream(stream, a)
        st_a = stats0.with_mean(los.own[a])
        own = compose_channel(st_a, draw_scattered(st_a, sub.child(0)))
        if perfect_csi:
            v_a = own.h_true
        else:
            # aggregated contamination seen by the interfering transmitter
            cont = st_a.varsigma*draw_scattered(st_a, sub.child(1))
            obs_a = simulate_pilot_rx(
                [own, cont], [p, p*budget.interference_ratio], pilot, nv,
                sub.child(2))
            v_a = mmse_estimate(obs_a, st_a, p, budget.p_interf, nv)
        st_c = stats0.with_mean(los.cross[a])
        cross = compose_channel(st_c, draw_scattered(st_c, sub.child(3)))
        interferers.append((cross.data_side, Precoder(v_a), p_data[a]))

    terms = [decompose_terms(real.data_side, pre, p, mean_gain, n,
                             interferers, nv, stream.child(5), batch)
             for n in range(config.num_dra)]
    sinrs = tuple(t.sinr(config.sinr_cap) for t in terms)

    theo = [b.rate_per_dra for b in
            evaluate_link(config, los, "theoretical", base=base)]
    appr = [b.rate_per_dra for b in
            evaluate_link(config, los, "approximate", base=base)]
    return TrialResult(sinrs, rate_per_dra(sinrs), float(np.mean(theo)),
                       float(np.mean(appr)))


@lru_cache(maxsize=8)
def _point_base(config, phase):
    return link_estimation(config, phase)


def _trial_job(args):
    config, seed, sid, batch, phase, perfect_csi = args
    return run_trial(config, RngStream(seed, sid), batch, phase, perfect_csi,
                     _point_base(config, phase))


def run_point(config, trials, seed, point_index=0, jobs=1, batch=200,
              phase=None, perfect_csi=False, progress=False):
    """ `trials` independent trials of one configuration, in trial order """
    if trials < 1:
        raise DomainError("trials must be >= 1")
    if phase is None:
        phase = scenario_phase(config, seed)
    args = [(config, seed, point_index*TRIAL_SPAN + t, batch, phase,
             perfect_csi) for t in range(trials)]
    desc = "point {}".format(point_index)
    if jobs <= 1:
        return [_trial_job(a) for a in tqdm(args, desc=desc,
                                             disable=not progress)]
    chunk = max(1, trials//(4*jobs))
    with mp.Pool(processes=jobs) as pool:
        return list(tqdm(pool.imap(_trial_job, args, chunksize=chunk),
                         total=trials, desc=desc, disable=not progress))


def axis_config(config, axis, value):
    """ validated copy of config with the sweep axis set to value """
    if axis not in AXES:
        raise InvalidAxis("axis {} not in {}".format(axis, list(AXES)))
    name, typ = AXES[axis]
    return config.with_value(name, typ(value))


def run_sweep(config, axis, values, trials, seed, jobs=1, batch=200,
              progress=False):
    """
    Theoretical, approximate and simulated rate per DRA along one axis

    d_ab values are in metres. The closed-form series are trial means over
    the same LOS draws as the simulation.
    """
    if axis not in AXES:
        raise InvalidAxis("axis {} not in {}".format(axis, list(AXES)))
    phase = scenario_phase(config, seed)
    theo, appr, mean, err, samples, n_r = [], [], [], [], [], []
    for i, v in enumerate(values):
        cfg = axis_config(config, axis, v)
        res = run_point(cfg, trials, seed, i, jobs, batch, phase,
                        progress=progress)
        rates = np.array([r.rate_per_dra for r in res])
        theo.append(np.mean([r.theoretical_rate for r in res]))
        appr.append(np.mean([r.approximate_rate for r in res]))
        mean.append(np.mean(rates))
        err.append(np.std(rates, ddof=1)/np.sqrt(rates.size)
                   if rates.size > 1 else 0.0)
        samples.append(rates)
        n_r.append(cfg.num_dra)
        logger.info("{}={}: theoretical {:.4f} approximate {:.4f} simulated "
                    "{:.4f} +- {:.4f}".format(axis, v, theo[-1], appr[-1],
                                              mean[-1], err[-1]))
    return SweepResult(axis, tuple(values), np.array(theo), np.array(appr),
                       np.array(mean), np.array(err), tuple(samples),
                       tuple(n_r))


def ccdf(samples, grid):
    """ P(sample > x) for every x of grid """
    s = np.asarray(samples, dtype=float).reshape(-1)
    if s.size == 0:
        raise EmptySamples("CCDF of an empty sample set")
    g = np.asarray(grid, dtype=float).reshape(-1)
    return np.mean(s[None, :] > g[:, None], axis=1)


def ccdf_grid(samples, n=201):
    s = np.asarray(samples, dtype=float)
    if s.size == 0:
        raise EmptySamples("CCDF of an empty sample set")
    return np.linspace(0.0, 1.05*float(np.max(s)), n)


def write_ccdf(samples, path, grid=None):
    if grid is None:
        grid = ccdf_grid(samples)
    df = pd.DataFrame({"rate": grid, "prob": ccdf(samples, grid)})
    df.to_csv(path, index=False, float_format="%.15g")
    logger.info("CCDF written to {}".format(path))
    return df


def write_samples(values, samples, path):
    """ long table axis_value,trial,rate """
    rows = [(v, t, r) for v, s in zip(values, samples)
            for t, r in enumerate(s)]
    df = pd.DataFrame(rows, columns=["axis_value", "trial", "rate"])
    df.to_csv(path, index=False, float_format="%.15g")
    return df


def write_sweep(result, out_dir):
    """ sweep.csv, sweep_total.csv and samples.csv in out_dir """
    os.makedirs(out_dir, exist_ok=True)
    paths = [os.path.join(out_dir, f) for f in
             ("sweep.csv", "sweep_total.csv", "samples.csv")]
    result.to_frame().to_csv(paths[0], index=False, float_format="%.15g")
    result.to_frame(total=True).to_csv(paths[1], index=False,
                                       float_format="%.15g")
    write_samples(result.axis_values, result.samples, paths[2])
    logger.info("sweep written to {}".format(out_dir))
    return paths
