"""
MMSE channel estimation under worst-case pilot contamination

All interfering aircraft reuse the pilot block of the desired link. Powers
enter only as ratios to the desired received power: c = sigma_w^2/P and
r = sum_a P_a/P.
"""

from dataclasses import dataclass
from functools import cached_property
import logging

import numpy as np

from aeroacm.errors import DimensionMismatch, DomainError, IndexOutOfRange
from aeroacm.numerics import (as_cmatrix, complex_normal, hermitize, kron,
                              solve_hpd)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class EstimationStats:
    """
    Second-order statistics of the channel estimate of one link

    phi, xi and m_mean are N_t N_r x N_t N_r in the training-side vec
    ordering. theta_blocks and omega_blocks hold one N_t x N_t block per DRA.
    """

    phi: np.ndarray
    xi: np.ndarray
    m_mean: np.ndarray
    theta_blocks: tuple
    omega_blocks: tuple
    rho_ratios: tuple
    snr_ratio: float

    @property
    def num_dra(self):
        return len(self.theta_blocks)

    @property
    def num_dta(self):
        return self.theta_blocks[0].shape[0]

    @cached_property
    def phi_blocks(self):
        return tuple(diagonal_block(self.phi, i, self.num_dta)
                     for i in range(self.num_dra))

    @cached_property
    def xi_blocks(self):
        return tuple(diagonal_block(self.xi, i, self.num_dta)
                     for i in range(self.num_dra))

    @cached_property
    def m_blocks(self):
        return tuple(diagonal_block(self.m_mean, i, self.num_dta)
                     for i in range(self.num_dra))

    def with_mean(self, h_d, nu):
        """ same Phi, Xi, Omega for a link with another LOS component """
        m = mean_outer(h_d)
        if m.shape != self.m_mean.shape:
            raise DimensionMismatch("LOS {} vs stats {}".format(
                m.shape, self.m_mean.shape))
        theta = tuple(theta_block(nu, diagonal_block(m, i, self.num_dta), p)
                      for i, p in enumerate(self.phi_blocks))
        return EstimationStats(self.phi, self.xi, m, theta, self.omega_blocks,
                               self.rho_ratios, self.snr_ratio)


@dataclass(frozen=True, eq=False)
class PilotObservation:
    y_rx: np.ndarray
    pilot: np.ndarray

    def __post_init__(self):
        x = self.pilot
        if x.shape[0] != x.shape[1] or \
                not np.allclose(x @ x.conj().T, np.eye(x.shape[0]),
                                rtol=0.0, atol=1e-12):
            raise DomainError("pilot block is not unitary")
        if self.y_rx.shape[1] != x.shape[0]:
            raise DimensionMismatch("y_rx {} vs pilot {}".format(
                self.y_rx.shape, x.shape))


def dft_pilot(n):
    """ n x n unitary DFT pilot block """
    k = np.arange(n)
    return np.exp(-2j*np.pi*np.outer(k, k)/n)/np.sqrt(n)


def _ratios(p_desired, p_interf, noise_var):
    if not p_desired > 0.0:
        raise DomainError("desired power must be > 0")
    if noise_var < 0.0:
        raise DomainError("noise variance must be >= 0")
    ratios = np.asarray(p_interf, dtype=float)/p_desired
    if np.any(ratios < 0.0):
        raise DomainError("interferer powers must be >= 0")
    return noise_var/p_desired, ratios


def diagonal_block(m, i, n_t):
    """ (i,i)-th N_t x N_t diagonal block, i counted from 0 """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % n_t:
        raise DimensionMismatch("{} is not a square multiple of {}".format(
            m.shape, n_t))
    n_r = m.shape[0]//n_t
    if not 0 <= i < n_r:
        raise IndexOutOfRange("block {} of {}".format(i, n_r))
    return m[i*n_t:(i + 1)*n_t, i*n_t:(i + 1)*n_t]


def _observation_cov(r, s, c, r_sum):
    """ c I + s R + r_sum s R, covariance of the de-meaned observation """
    return c*np.eye(r.shape[0]) + s*(1.0 + r_sum)*r


def estimation_covariance(stats, p_desired, p_interf, noise_var):
    """ covariance Phi of the (de-meaned) MMSE estimate """
    c, ratios = _ratios(p_desired, p_interf, noise_var)
    s = stats.varsigma**2
    r_sum = float(np.sum(ratios))
    if stats.rx_white:
        rt = stats.corr_tx
        blk = s*rt @ solve_hpd(_observation_cov(rt, s, c, r_sum), s*rt)
        return kron(np.eye(stats.num_dra), hermitize(blk))
    rb = stats.covariance
    phi = s*rb @ solve_hpd(_observation_cov(rb, s, c, r_sum), s*rb)
    return hermitize(phi)


def error_covariance(stats, phi):
    phi = np.asarray(phi)
    if phi.shape != stats.covariance.shape:
        raise DimensionMismatch("phi {} vs {}".format(
            phi.shape, stats.covariance.shape))
    return hermitize(stats.varsigma**2*stats.covariance - phi)


def mean_outer(h_d):
    """ vec(H_d) vec(H_d)^H """
    v = as_cmatrix(h_d).reshape(-1, order='F')
    return np.outer(v, v.conj())


def theta_block(nu, m_block, phi_block):
    return nu**2*np.asarray(m_block) + np.asarray(phi_block)


def omega_block(stats, r_block, p_desired, p_interf, noise_var,
                scaled_middle=False):
    """
    s R (c I + R + r_sum s R)^-1 on one N_t x N_t correlation block

    With scaled_middle the bare R middle term becomes s R, matching the
    bracket of the estimation covariance.
    """
    c, ratios = _ratios(p_desired, p_interf, noise_var)
    s = stats.varsigma**2
    r = np.asarray(r_block, dtype=complex)
    mid = s if scaled_middle else 1.0
    b = c*np.eye(r.shape[0]) + (mid + float(np.sum(ratios))*s)*r
    # X B = s R  <=>  B X^H = s R for Hermitian B and R
    return hermitize(solve_hpd(b, s*r).conj().T)


def estimation_stats(stats, p_desired, p_interf, noise_var,
                     scaled_middle=False):
    """ all estimation matrices of one link """
    c, ratios = _ratios(p_desired, p_interf, noise_var)
    nt = stats.num_dta
    phi = estimation_covariance(stats, p_desired, p_interf, noise_var)
    xi = error_covariance(stats, phi)
    m = mean_outer(stats.h_d)
    theta = tuple(theta_block(stats.nu, diagonal_block(m, i, nt),
                              diagonal_block(phi, i, nt))
                  for i in range(stats.num_dra))
    if stats.rx_white:
        om = omega_block(stats, stats.corr_tx, p_desired, p_interf,
                         noise_var, scaled_middle)
        omega = (om,)*stats.num_dra
    else:
        omega = tuple(omega_block(stats, stats.corr_block(i), p_desired,
                                  p_interf, noise_var, scaled_middle)
                      for i in range(stats.num_dra))
    return EstimationStats(phi, xi, m, theta, omega, tuple(ratios), c)


def perfect_estimation_stats(stats, scaled_middle=False):
    """ statistics for perfect CSI: Phi = s R, Xi = 0 """
    nt = stats.num_dta
    phi = stats.varsigma**2*stats.covariance
    m = mean_outer(stats.h_d)
    theta = tuple(theta_block(stats.nu, diagonal_block(m, i, nt),
                              diagonal_block(phi, i, nt))
                  for i in range(stats.num_dra))
    omega = tuple(omega_block(stats, stats.corr_block(i), 1.0, [], 0.0,
                              scaled_middle)
                  for i in range(stats.num_dra))
    return EstimationStats(phi, np.zeros_like(phi), m, theta, omega, (), 0.0)


def simulate_pilot_rx(true_channels, powers, pilot, noise_var, stream):
    """
    Received pilot block Y = sum_k sqrt(P_k) H_k X + W

    The first channel is the desired link, all others reuse its pilot.
    """
    chans = [np.asarray(getattr(h, 'h_true', h)) for h in true_channels]
    if len(chans) != len(powers) or not chans:
        raise DimensionMismatch("{} channels vs {} powers".format(
            len(chans), len(powers)))
    shape = chans[0].shape
    if any(h.shape != shape for h in chans) or pilot.shape[0] != shape[1]:
        raise DimensionMismatch("channel/pilot dimensions disagree")
    y = complex_normal(stream.generator(), shape, noise_var)
    for h, p in zip(chans, powers):
        y = y + np.sqrt(p)*h @ pilot
    return PilotObservation(y, np.asarray(pilot, dtype=complex))


def mmse_estimate(obs, stats, p_desired, p_interf, noise_var):
    """ MMSE estimate of the desired training-side channel (N_t x N_r) """
    c, ratios = _ratios(p_desired, p_interf, noise_var)
    s = stats.varsigma**2
    r_sum = float(np.sum(ratios))
    z = obs.y_rx @ obs.pilot.conj().T/np.sqrt(p_desired)
    h_mean = stats.nu*stats.h_d
    if z.shape != h_mean.shape:
        raise DimensionMismatch("observation {} vs channel {}".format(
            z.shape, h_mean.shape))
    if stats.rx_white:
        # column-wise, one N_t x N_t system per DRA
        rt = stats.corr_tx
        g = s*rt @ solve_hpd(_observation_cov(rt, s, c, r_sum), z - h_mean)
        return h_mean + g
    rb = stats.covariance
    d = (z - h_mean).reshape(-1, order='F')
    g = s*rb @ solve_hpd(_observation_cov(rb, s, c, r_sum), d)
    return h_mean + g.reshape(h_mean.shape, order='F')
