"""
Link budget and Rician channel model.

 Group 1 - Link budget golden values
   1. free-space path loss at 5 GHz, 10 km
   2. receiver noise power at 4 dB, 290 K, 6 MHz
   3. average received power over [5, 740] km, by quadrature, and its
      point-mass limit
   4. domain errors

 Group 2 - Correlation and channel statistics
   5. exponential correlation is Hermitian with unit diagonal
   6. Rician factors split unit power
   7. LOS normalization check
   8. scattered component has covariance R_r (x) R_t

 Group 3 - Draws
   9. LOS draws are normalized and reproducible
  10. interferer LOS draws do not depend on the interferer count
  11. interferer distances stay in their interval
  12. LOS mixing keeps the normalization
  13. links of one trial share the common LOS component
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np
import pytest
from scipy.integrate import quad

from aeroacm.channel import (average_interferer_power,
                             average_received_power, build_channel_stats,
                             compose_channel, draw_los, draw_los_set,
                             draw_scattered, exponential_correlation,
                             interferer_distances, interferer_interval,
                             mix_los, noise_power, path_loss_db,
                             received_power, rician_factors, scenario_phase)
from aeroacm.errors import DimensionMismatch, DomainError
from aeroacm.numerics import RngStream, complex_normal, is_hermitian


# ── Group 1 ──────────────────────────────────────────────────────────────────

def test_path_loss_golden():
    assert path_loss_db(5e9, 10e3) == pytest.approx(119.9194, rel=1e-3)


def test_noise_power_golden():
    assert noise_power(4.0, 290.0, 6e6) == pytest.approx(5.6819e-14,
                                                         rel=1e-3)


def test_average_received_power_golden():
    p = average_received_power(1.0, 5e9, 5e3, 740e3)
    assert p == pytest.approx(2.7533e-14, rel=1e-3)


def test_average_received_power_quadrature():
    lo, hi = 10e3, 740e3
    val, _ = quad(lambda d: received_power(1.0, 5e9, d), lo, hi,
                  epsabs=0.0, epsrel=1e-10, limit=200)
    assert average_received_power(1.0, 5e9, lo, hi) == \
        pytest.approx(val/(hi - lo), rel=1e-6)


def test_average_received_power_point_mass():
    assert average_received_power(2.0, 5e9, 70e3, 70e3) == \
        pytest.approx(received_power(2.0, 5e9, 70e3), rel=1e-12)


def test_link_budget_domain():
    with pytest.raises(DomainError):
        path_loss_db(5e9, 0.0)
    with pytest.raises(DomainError):
        noise_power(4.0, 290.0, -1.0)
    with pytest.raises(DomainError):
        average_received_power(1.0, 5e9, 10e3, 5e3)


def test_interferer_interval(default_config):
    assert interferer_interval(default_config) == (10e3, 740e3)
    full = replace(default_config, interferer_interval="full")
    assert interferer_interval(full) == (5e3, 740e3)
    assert average_interferer_power(full) > \
        average_interferer_power(default_config)


# ── Group 2 ──────────────────────────────────────────────────────────────────

def test_exponential_correlation():
    r = exponential_correlation(5, 0.3, 0.7)
    assert is_hermitian(r)
    np.testing.assert_allclose(np.diag(r), 1.0)
    assert r[1, 0] == pytest.approx(0.3*np.exp(0.7j))
    assert r[3, 0] == pytest.approx(0.3**3*np.exp(2.1j))
    assert np.all(np.linalg.eigvalsh(r) > 0.0)


def test_exponential_correlation_real_and_identity():
    np.testing.assert_allclose(exponential_correlation(4, 0.0), np.eye(4))
    r = exponential_correlation(4, 0.5)
    np.testing.assert_allclose(r.imag, 0.0)
    with pytest.raises(DomainError):
        exponential_correlation(4, 1.0)


def test_rician_factors():
    nu, vs = rician_factors(5.0)
    assert nu**2 + vs**2 == pytest.approx(1.0)
    assert nu**2/vs**2 == pytest.approx(5.0)
    assert rician_factors(0.0) == (0.0, 1.0)
    with pytest.raises(DomainError):
        rician_factors(-1.0)


def test_scenario_phase(default_config):
    a = scenario_phase(default_config, 3)
    assert 0.0 <= a < 2*np.pi
    assert scenario_phase(default_config, 3) == a
    assert scenario_phase(replace(default_config, correlation_phase=None),
                          3) is None
    assert scenario_phase(replace(default_config, correlation_phase=0.25),
                          3) == 0.25


def test_los_normalization_check(small_config):
    with pytest.raises(DomainError):
        build_channel_stats(small_config, 2*np.ones((8, 2)))
    with pytest.raises(DimensionMismatch):
        build_channel_stats(small_config, np.ones((2, 8)))
    st = build_channel_stats(small_config, np.ones((8, 2)))
    assert st.rx_white
    assert st.covariance.shape == (16, 16)


def test_scattered_covariance(small_config):
    st = build_channel_stats(small_config, np.ones((8, 2)), phase=0.4)
    n = 6000
    acc = np.zeros((16, 16), dtype=complex)
    for t in range(n):
        v = draw_scattered(st, RngStream(5, t)).reshape(-1, order='F')
        acc += np.outer(v, v.conj())
    err = np.linalg.norm(acc/n - st.covariance)/np.linalg.norm(st.covariance)
    assert err < 0.1


def test_compose_channel(small_config):
    st = build_channel_stats(small_config, np.ones((8, 2)))
    h_r = draw_scattered(st, RngStream(1))
    ch = compose_channel(st, h_r)
    np.testing.assert_allclose(ch.h_true, st.nu*st.h_d + st.varsigma*h_r)
    np.testing.assert_allclose(ch.data_side, ch.h_true.conj().T)
    with pytest.raises(DimensionMismatch):
        compose_channel(st, np.ones((2, 8)))


# ── Group 3 ──────────────────────────────────────────────────────────────────

def test_draw_los(small_config):
    h = draw_los(small_config, RngStream(2))
    assert h.shape == (8, 2)
    assert np.sum(np.abs(h)**2) == pytest.approx(16.0)
    np.testing.assert_array_equal(h, draw_los(small_config, RngStream(2)))


def test_los_set_prefix_stable(small_config):
    four = replace(small_config, num_interferers=4)
    a = draw_los_set(small_config, RngStream(9))
    b = draw_los_set(four, RngStream(9))
    assert len(a.own) == 2 and len(b.cross) == 4
    np.testing.assert_array_equal(a.desired, b.desired)
    for k in range(2):
        np.testing.assert_array_equal(a.own[k], b.own[k])
        np.testing.assert_array_equal(a.cross[k], b.cross[k])


def test_interferer_distances(default_config):
    d = interferer_distances(default_config, 500, RngStream(4))
    assert d.shape == (500,)
    assert np.all(d >= 10e3) and np.all(d <= 740e3)


def test_mix_los():
    rng = RngStream(6).generator()
    c = complex_normal(rng, (8, 2))
    h = complex_normal(rng, (8, 2))
    for s in (0.0, 0.45, 1.0):
        g = mix_los(c, h, s)
        assert np.sum(np.abs(g)**2) == pytest.approx(16.0)
    np.testing.assert_allclose(mix_los(c, h, 0.0),
                               h*np.sqrt(16.0/np.sum(np.abs(h)**2)))
    np.testing.assert_allclose(mix_los(c, h, 1.0),
                               c*np.sqrt(16.0/np.sum(np.abs(c)**2)))
    with pytest.raises(DomainError):
        mix_los(c, h, -0.1)
    with pytest.raises(DimensionMismatch):
        mix_los(c, h[:, :1], 0.5)


def test_los_set_shared_component(small_config):
    # column products of two links average to s N_t
    cfg = replace(small_config, num_dta=64)
    inner = []
    for k in range(200):
        los = draw_los_set(cfg, RngStream(3, k))
        inner.append(np.vdot(los.desired[:, 0], los.cross[0][:, 0]))
    assert np.real(np.mean(inner)) == pytest.approx(0.45*64, rel=0.1)
    iso = draw_los_set(replace(cfg, los_similarity=0.0), RngStream(3, 0))
    assert abs(np.vdot(iso.desired[:, 0], iso.cross[0][:, 0])) < 0.5*64
