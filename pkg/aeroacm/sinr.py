"""
Closed-form asymptotic SINR and achievable rate of the MF-precoded link

Notation used below, per DRA block n (N_t x N_t):
  s = varsigma^2, c = sigma_w^2/P, r = A*P_bar/P
  A_n = nu^2 M_n + (Phi_n + c I + r s R_n) Omega_n
  B_n = nu^2 M_n + s R_n
The self-interference at DRA n* is P sum_{n != n*} Tr{A_n B_n*}; interferer
a contributes P_bar sum_n Tr{A^a_n B^a_n*} where A^a uses the interferer's
own LOS and B^a its LOS towards the desired receiver. In approximate mode
these unknown LOS blocks are replaced by L(M_n) and L(M_n*) of the desired
link, L(M) = s_los M + (1 - s_los) Tr{M}/N_t I with s_los the share of LOS
power common to all links.
"""

from dataclasses import dataclass
import logging

import numpy as np

from aeroacm.channel import (LOS_STREAM, average_interferer_power,
                             build_channel_stats, draw_los_set,
                             received_power, scenario_phase,
                             subcarrier_noise_variance)
from aeroacm.errors import DimensionMismatch, DomainError, IndexOutOfRange
from aeroacm.estimation import estimation_stats, mean_outer, diagonal_block
from aeroacm.numerics import RngStream

logger = logging.getLogger(__name__)

MODES = ("theoretical", "approximate")


@dataclass(frozen=True)
class LinkBudget:
    p_desired: float
    p_bar: float
    noise_var: float
    num_interferers: int

    def __post_init__(self):
        if not self.p_desired > 0.0:
            raise DomainError("desired received power must be > 0")
        if self.p_bar < 0.0 or self.noise_var < 0.0:
            raise DomainError("powers must be >= 0")

    @classmethod
    def from_config(cls, config):
        p = received_power(config.tx_power_per_antenna, config.carrier_freq,
                           config.link_distance)
        return cls(p, average_interferer_power(config),
                   subcarrier_noise_variance(config), config.num_interferers)

    @property
    def noise_ratio(self):
        return self.noise_var/self.p_desired

    @property
    def interference_ratio(self):
        """ A*P_bar/P """
        return self.num_interferers*self.p_bar/self.p_desired

    @property
    def p_interf(self):
        """ per-interferer training powers used by the closed form """
        return [self.p_bar]*self.num_interferers


@dataclass(frozen=True)
class SinrBreakdown:
    desired: float
    est_error_term: float
    inter_antenna_term: float
    interferer_term: float
    noise: float
    sinr: float
    rate_per_dra: float

    @property
    def interference_plus_noise(self):
        return self.est_error_term + self.inter_antenna_term + \
            self.interferer_term + self.noise


def asymptotic_quadratic_form(m, upsilon, a):
    """
    Deterministic equivalent of x^H A x for x ~ CN(m/sqrt(N), Upsilon/N)

    Tr{(m m^H/N + Upsilon/N) A}
    """
    m = np.asarray(m, dtype=complex).reshape(-1)
    n = m.shape[0]
    upsilon = np.asarray(upsilon)
    a = np.asarray(a)
    if upsilon.shape != (n, n) or a.shape != (n, n):
        raise DimensionMismatch("m {}, upsilon {}, a {}".format(
            m.shape, upsilon.shape, a.shape))
    return complex(np.trace((np.outer(m, m.conj()) + upsilon) @ a)/n)


def _trace_prod(a, b):
    """ Tr{a b} without forming the product """
    return np.sum(a*b.T)


def desired_power(p_desired, theta_block):
    return p_desired*float(np.real(np.trace(theta_block)))**2


def variance_term(p_desired, xi_block, theta_block):
    return p_desired*float(np.real(_trace_prod(xi_block, theta_block)))


def _a_block(nu, m_blk, phi_blk, omega_blk, r_blk, s, c, r):
    nt = m_blk.shape[0]
    return nu**2*m_blk + (phi_blk + c*np.eye(nt) + r*s*r_blk) @ omega_blk


def _b_block(nu, m_blk, r_blk, s):
    return nu**2*m_blk + s*r_blk


def substitute_los(m_blk, similarity):
    """ L(M) = s M + (1 - s) Tr{M}/N_t I, a link's LOS block sharing the
    share s of its power with m_blk """
    m_blk = np.asarray(m_blk)
    if not 0.0 <= similarity <= 1.0:
        raise DomainError("LOS similarity {} not in [0, 1]".format(
            similarity))
    nt = m_blk.shape[0]
    iso = float(np.real(np.trace(m_blk)))/nt
    return similarity*m_blk + (1.0 - similarity)*iso*np.eye(nt)


def _check_index(n_r_star, n_r):
    if not 0 <= n_r_star < n_r:
        raise IndexOutOfRange("DRA {} of {}".format(n_r_star, n_r))


def self_interference_term(budget, stats, est, n_r_star):
    """ power leaking from the streams of the other DRAs into n_r_star """
    n_r = est.num_dra
    _check_index(n_r_star, n_r)
    s = stats.varsigma**2
    c, r = budget.noise_ratio, budget.interference_ratio
    b_star = _b_block(stats.nu, est.m_blocks[n_r_star],
                      stats.corr_block(n_r_star), s)
    total = 0.0
    for n in range(n_r):
        if n == n_r_star:
            continue
        a_n = _a_block(stats.nu, est.m_blocks[n], est.phi_blocks[n],
                       est.omega_blocks[n], stats.corr_block(n), s, c, r)
        total += np.real(_trace_prod(a_n, b_star))
    return budget.p_desired*float(total)


def _interferer_list(est_interferer, count):
    if isinstance(est_interferer, (list, tuple)):
        if len(est_interferer) != count:
            raise DimensionMismatch("{} interferer stats for {} interferers"
                                    .format(len(est_interferer), count))
        return list(est_interferer)
    return [est_interferer]*count


def cross_interference_term(budget, stats, est_interferer, est_desired,
                            own_stats, n_r_star=0, cross_means=None,
                            similarity=1.0):
    """
    Co-channel interference of the A interfering aircraft at DRA n_r_star

    With own_stats the interferers' LOS blocks, unknown to the desired
    link, are replaced by substitute_los() of the desired link's blocks:
    block n of the own link by L(M_n), the block towards DRA n_r_star by
    L(M_n_r_star). Otherwise
    est_interferer carries each interferer's own-link LOS (m_mean) and
    cross_means the interferers' LOS matrices towards the desired receiver.
    """
    count = budget.num_interferers
    if count == 0:
        return 0.0
    _check_index(n_r_star, est_desired.num_dra)
    ests = _interferer_list(est_interferer, count)
    if not own_stats:
        if cross_means is None or len(cross_means) != count:
            raise DimensionMismatch("true-mean mode needs {} cross LOS "
                                    "matrices".format(count))
    s = stats.varsigma**2
    c, r = budget.noise_ratio, budget.interference_ratio
    nt = est_desired.num_dta
    m_star = est_desired.m_blocks[n_r_star]
    r_star = stats.corr_block(n_r_star)
    total = 0.0
    for a, est_a in enumerate(ests):
        if own_stats:
            m_cross = substitute_los(m_star, similarity)
        else:
            m_cross = diagonal_block(mean_outer(cross_means[a]), n_r_star, nt)
        b_a = _b_block(stats.nu, m_cross, r_star, s)
        for n in range(est_a.num_dra):
            m_own = substitute_los(est_desired.m_blocks[n], similarity) \
                if own_stats else est_a.m_blocks[n]
            a_n = _a_block(stats.nu, m_own, est_a.phi_blocks[n],
                           est_a.omega_blocks[n], stats.corr_block(n),
                           s, c, r)
            total += np.real(_trace_prod(a_n, b_a))
    return budget.p_bar*float(total)


def _resolve_mode(mode, est, est_interferer):
    if mode not in MODES:
        raise DomainError("mode {} not in {}".format(mode, MODES))
    own_stats = mode == "approximate"
    if est_interferer is None:
        if not own_stats:
            raise DomainError("theoretical mode needs the interferer stats")
        est_interferer = est
    return own_stats, est_interferer


def interference_plus_noise(budget, stats, est, n_r_star, mode="theoretical",
                            est_interferer=None, cross_means=None,
                            similarity=1.0):
    _check_index(n_r_star, est.num_dra)
    if budget.num_interferers == 0:
        own_stats, est_interferer = True, est
    else:
        own_stats, est_interferer = _resolve_mode(mode, est,
                                                    est_interferer)
    return variance_term(budget.p_desired, est.xi_blocks[n_r_star],
                         est.theta_blocks[n_r_star]) + \
        self_interference_term(budget, stats, est, n_r_star) + \
        cross_interference_term(budget, stats, est_interferer, est,
                                own_stats, n_r_star, cross_means,
                                similarity) + \
        budget.noise_var


def _capped(desired, den, cap):
    if den <= 0.0 or desired >= cap*den:
        logger.debug("SINR capped at {:g}".format(cap))
        return cap
    return desired/den


def asymptotic_sinr(budget, stats, est, n_r_star, mode="theoretical",
                    est_interferer=None, cross_means=None, cap=1e12,
                    similarity=1.0):
    _check_index(n_r_star, est.num_dra)
    desired = desired_power(budget.p_desired, est.theta_blocks[n_r_star])
    den = interference_plus_noise(budget, stats, est, n_r_star, mode,
                                  est_interferer, cross_means, similarity)
    return _capped(desired, den, cap)


def rate_per_dra(sinrs):
    """ (1/N_r) sum log2(1 + sinr) [bits/s/Hz] """
    g = np.asarray(sinrs, dtype=float)
    if np.any(g < 0.0):
        raise DomainError("negative SINR")
    return float(np.mean(np.log2(1.0 + g)))


def per_dra_breakdowns(budget, stats, est, mode="theoretical",
                       est_interferer=None, cross_means=None, cap=1e12,
                       similarity=1.0):
    """
    SinrBreakdown of every DRA at once

    Same values as the per-index operations, computed on stacked blocks.
    """
    n_r, nt = est.num_dra, est.num_dta
    s = stats.varsigma**2
    nu2 = stats.nu**2
    c, r = budget.noise_ratio, budget.interference_ratio
    eye = np.eye(nt)
    m_b = np.stack(est.m_blocks)
    r_b = np.stack([stats.corr_block(n) for n in range(n_r)])

    def a_stack(m_own, e):
        ph = np.stack(e.phi_blocks)
        om = np.stack(e.omega_blocks)
        return nu2*m_own + (ph + c*eye + r*s*r_b) @ om

    theta = np.stack(est.theta_blocks)
    tr_theta = np.real(np.einsum('nii->n', theta))
    desired = budget.p_desired*tr_theta**2
    var = budget.p_desired*np.real(
        np.einsum('nij,nji->n', np.stack(est.xi_blocks), theta))

    b_star = nu2*m_b + s*r_b
    t = np.real(np.einsum('nij,kji->nk', a_stack(m_b, est), b_star))
    self_i = budget.p_desired*(t.sum(axis=0) - np.diag(t))

    cross = np.zeros(n_r)
    if budget.num_interferers > 0:
        own_stats, est_interferer = _resolve_mode(mode, est,
                                                    est_interferer)
        ests = _interferer_list(est_interferer, budget.num_interferers)
        if not own_stats and (cross_means is None or
                                len(cross_means) != len(ests)):
            raise DimensionMismatch("true-mean mode needs {} cross LOS "
                                    "matrices".format(len(ests)))
        if own_stats:
            m_sub = np.stack([substitute_los(m, similarity)
                              for m in est.m_blocks])
            b_sub = nu2*m_sub + s*r_b
        for a, e in enumerate(ests):
            if own_stats:
                a_sum = np.sum(a_stack(m_sub, e), axis=0)
                cross += np.real(np.einsum('ij,kji->k', a_sum, b_sub))
            else:
                a_sum = np.sum(a_stack(np.stack(e.m_blocks), e), axis=0)
                hc = np.asarray(cross_means[a])
                m_c = np.einsum('in,jn->nij', hc, hc.conj())
                b_a = nu2*m_c + s*r_b
                cross += np.real(np.einsum('ij,kji->k', a_sum, b_a))
        cross *= budget.p_bar

    out = []
    for n in range(n_r):
        den = var[n] + self_i[n] + cross[n] + budget.noise_var
        g = _capped(desired[n], den, cap)
        out.append(SinrBreakdown(float(desired[n]), float(var[n]),
                                 float(self_i[n]), float(cross[n]),
                                 budget.noise_var, g, float(np.log2(1.0 + g))))
    return out


def link_estimation(config, phase=None):
    """ budget, reference stats and estimation stats of a configuration;
    the LOS component of the reference is a placeholder """
    budget = LinkBudget.from_config(config)
    h0 = np.ones((config.num_dta, config.num_dra), dtype=complex)
    stats = build_channel_stats(config, h0, phase)
    est = estimation_stats(stats, budget.p_desired, budget.p_interf,
                           budget.noise_var, config.omega_scaled_middle)
    return budget, stats, est


def evaluate_link(config, los, mode="theoretical", phase=None, base=None):
    """ per-DRA closed-form breakdowns for the LOS draws in `los` """
    budget, stats0, est0 = base if base is not None else \
        link_estimation(config, phase)
    stats = stats0.with_mean(los.desired)
    est = est0.with_mean(los.desired, stats.nu)
    est_i, cross = None, None
    if mode == "theoretical" and budget.num_interferers > 0:
        est_i = [est0.with_mean(h, stats.nu) for h in los.own]
        cross = los.cross
    return per_dra_breakdowns(budget, stats, est, mode, est_i, cross,
                              config.sinr_cap, config.los_similarity)


def expected_rate(config, mode="theoretical", seed=0, draws=50, phase=None):
    """
    Closed-form rate per DRA averaged over `draws` LOS realizations

    The LOS draws depend only on (seed, draw index) and the antenna counts,
    so configurations differing in distance or interferer count share them.
    """
    if phase is None:
        phase = scenario_phase(config, seed)
    base = link_estimation(config, phase)
    rates = np.empty(draws)
    for j in range(draws):
        los = draw_los_set(config, RngStream(seed, LOS_STREAM).child(j))
        rates[j] = np.mean([b.rate_per_dra for b in
                            evaluate_link(config, los, mode, base=base)])
    return float(np.mean(rates))
