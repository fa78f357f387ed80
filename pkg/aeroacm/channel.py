"""
Link budget and spatially correlated Rician channel model

Orientation: training-side channels (pilots sent by the receiving aircraft,
observed by the transmitter's DTAs) are N_t x N_r matrices whose column n is
the channel of DRA n. Data-side channels are their conjugate transpose.
vec() stacks columns, so the training-side covariance is R_r (x) R_t and its
N_t x N_t diagonal blocks belong to one DRA each.
"""

from dataclasses import dataclass, field, replace
from functools import cached_property
import logging

import numpy as np

from aeroacm.errors import DimensionMismatch, DomainError
from aeroacm.numerics import (RngStream, as_cmatrix, gaussian_matrix,
                              hermitian_sqrt, kron)

logger = logging.getLogger(__name__)

BOLTZMANN = 1.3e-23
PL_CONST_DB = -154.06

# stream ids reserved outside the per-trial id range
PHASE_STREAM = 2**63 - 1
LOS_STREAM = 2**63 - 2

# sub-stream of a LOS set holding the component shared by its links
COMMON_LOS = 2**20


def _positive(**kw):
    for k, v in kw.items():
        if not v > 0.0:
            raise DomainError("{} must be > 0, got {}".format(k, v))


def path_loss_db(f, d):
    """ free-space path loss [dB] for frequency f [Hz] and distance d [m] """
    _positive(f=f, d=d)
    return PL_CONST_DB + 20.0*np.log10(f) + 20.0*np.log10(d)


def received_power(p_t, f, d):
    _positive(p_t=p_t, f=f, d=d)
    return p_t*10.0**(-0.1*path_loss_db(f, d))


def noise_power(noise_figure, t0, b):
    """ receiver noise power F*k*T0*B [W], noise figure in dB """
    _positive(t0=t0, b=b)
    return 10.0**(0.1*noise_figure)*BOLTZMANN*t0*b


def subcarrier_noise_variance(config):
    return noise_power(config.noise_figure, config.ref_temperature,
                       config.bandwidth)/config.num_subcarriers


def average_received_power(p_t, f, d_lo, d_hi):
    """
    Received power averaged over a distance uniform on [d_lo, d_hi]

    d_lo == d_hi is the point-mass limit and equals received_power().
    """
    _positive(p_t=p_t, f=f, d_lo=d_lo)
    if d_hi < d_lo:
        raise DomainError("d_hi {} < d_lo {}".format(d_hi, d_lo))
    return p_t*10.0**(-0.1*PL_CONST_DB)/f**2/(d_hi*d_lo)


def interferer_interval(config):
    """ distance interval of the interfering aircraft """
    if config.interferer_interval == "full":
        return config.d_min, config.d_max
    return config.link_distance, config.d_max


def average_interferer_power(config):
    lo, hi = interferer_interval(config)
    return average_received_power(config.tx_power_per_antenna,
                                  config.carrier_freq, lo, hi)


def interferer_distances(config, count, stream):
    lo, hi = interferer_interval(config)
    return stream.generator().uniform(lo, hi, size=count)


def exponential_correlation(n, rho, phase=None):
    """ [R]_mn = (c rho)^(m-n) for m >= n, Hermitian, c = exp(j phase) """
    if not 0.0 <= rho < 1.0:
        raise DomainError("correlation factor {} not in [0, 1)".format(rho))
    theta = 0.0 if phase is None else float(phase)
    k = np.arange(n)
    lag = k[:, None] - k[None, :]
    return rho**np.abs(lag)*np.exp(1j*theta*lag)


def rician_factors(k_rice):
    """ (nu, varsigma) of the LOS and scattered components """
    if k_rice < 0.0:
        raise DomainError("Rician factor {} < 0".format(k_rice))
    return np.sqrt(k_rice/(k_rice + 1.0)), np.sqrt(1.0/(k_rice + 1.0))


def scenario_phase(config, seed):
    """ correlation phase of a scenario, drawn once per seed if random """
    ph = config.correlation_phase
    if ph is None:
        return None
    if ph == "random":
        return float(RngStream(seed, PHASE_STREAM).generator().uniform(
            0.0, 2.0*np.pi))
    return float(ph)


@dataclass(frozen=True, eq=False)
class ChannelStats:
    """ deterministic statistics of one link (training-side orientation) """

    h_d: np.ndarray
    corr_tx: np.ndarray
    corr_rx: np.ndarray
    nu: float
    varsigma: float
    sqrt_tx: np.ndarray = field(repr=False, default=None)
    sqrt_rx: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        if self.sqrt_tx is None:
            object.__setattr__(self, 'sqrt_tx', hermitian_sqrt(self.corr_tx))
        if self.sqrt_rx is None:
            object.__setattr__(self, 'sqrt_rx', hermitian_sqrt(self.corr_rx))
        nt, nr = self.corr_tx.shape[0], self.corr_rx.shape[0]
        if self.h_d.shape != (nt, nr):
            raise DimensionMismatch("h_d {} vs ({}, {})".format(
                self.h_d.shape, nt, nr))

    @property
    def num_dta(self):
        return self.corr_tx.shape[0]

    @property
    def num_dra(self):
        return self.corr_rx.shape[0]

    @cached_property
    def rx_white(self):
        """ True when R_r is the identity (uncorrelated DRAs) """
        return bool(np.allclose(self.corr_rx, np.eye(self.num_dra),
                                rtol=0.0, atol=1e-14))

    @cached_property
    def covariance(self):
        """ training-side spatial correlation R_r (x) R_t """
        return kron(self.corr_rx, self.corr_tx)

    @cached_property
    def covariance_data(self):
        """ data-side spatial correlation R_t (x) R_r """
        return kron(self.corr_tx, self.corr_rx)

    @property
    def h_d_data(self):
        return self.h_d.conj().T

    def corr_block(self, i):
        """ i-th N_t x N_t diagonal block of the training-side covariance """
        return self.corr_rx[i, i]*self.corr_tx

    def with_mean(self, h_d):
        """ same correlation and Rician factors, other LOS component """
        return replace(self, h_d=as_cmatrix(h_d))


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    h_true: np.ndarray
    h_los: np.ndarray
    h_scatter: np.ndarray

    @property
    def data_side(self):
        return self.h_true.conj().T


@dataclass(frozen=True, eq=False)
class LosSet:
    """ LOS components of one trial: desired link and per interferer the
    own link and the link towards the desired receiver """

    desired: np.ndarray
    own: tuple = ()
    cross: tuple = ()


def build_channel_stats(config, h_d, phase=None, check_norm=True):
    nt, nr = config.num_dta, config.num_dra
    h_d = as_cmatrix(h_d)
    if h_d.shape != (nt, nr):
        raise DimensionMismatch("h_d {} vs ({}, {})".format(h_d.shape, nt, nr))
    if check_norm:
        p = np.sum(np.abs(h_d)**2)
        if abs(p - nt*nr) > 1e-9*nt*nr:
            raise DomainError("Tr{{H_d H_d^H}} = {:.6g} != {}".format(
                p, nt*nr))
    nu, vs = rician_factors(config.rician_k)
    r_t = exponential_correlation(nt, config.correlation_factor, phase)
    return ChannelStats(h_d, r_t, np.eye(nr, dtype=complex), nu, vs)


def draw_los(config, stream):
    """ i.i.d. Gaussian LOS matrix scaled to Tr{H_d H_d^H} = N_t N_r """
    nt, nr = config.num_dta, config.num_dra
    g = gaussian_matrix(nt, nr, stream)
    return g*np.sqrt(nt*nr/np.sum(np.abs(g)**2))


def mix_los(common, h, similarity):
    """ sqrt(s) common + sqrt(1-s) h, scaled back to Tr = N_t N_r """
    if not 0.0 <= similarity <= 1.0:
        raise DomainError("LOS similarity {} not in [0, 1]".format(
            similarity))
    common, h = as_cmatrix(common), as_cmatrix(h)
    if common.shape != h.shape:
        raise DimensionMismatch("LOS {} vs {}".format(common.shape, h.shape))
    g = np.sqrt(similarity)*common + np.sqrt(1.0 - similarity)*h
    return g*np.sqrt(h.size/np.sum(np.abs(g)**2))


def draw_los_set(config, stream):
    """
    LOS components of one trial

    Every link mixes a draw of its own with a common draw (sub-stream
    COMMON_LOS) in the ratio config.los_similarity, so column n of any
    two links shares the same component. Interferer a uses sub-streams
    1+2a and 2+2a, the draws of the first interferers do not depend on
    the number of interferers.
    """
    s = config.los_similarity
    common = draw_los(config, stream.child(COMMON_LOS))

    def one(k):
        return mix_los(common, draw_los(config, stream.child(k)), s)

    own = tuple(one(1 + 2*a) for a in range(config.num_interferers))
    cross = tuple(one(2 + 2*a) for a in range(config.num_interferers))
    return LosSet(one(0), own, cross)


def draw_scattered(stats, stream):
    """ R_t^1/2 G (R_r^1/2)^T, vec-covariance R_r (x) R_t """
    g = gaussian_matrix(stats.num_dta, stats.num_dra, stream)
    return stats.sqrt_tx @ g @ stats.sqrt_rx.T


def compose_channel(stats, h_r):
    h_r = np.asarray(h_r, dtype=complex)
    if h_r.shape != stats.h_d.shape:
        raise DimensionMismatch("h_r {} vs h_d {}".format(h_r.shape,
                                                          stats.h_d.shape))
    h_los = stats.nu*stats.h_d
    h_sc = stats.varsigma*h_r
    return ChannelRealization(h_los + h_sc, h_los, h_sc)
