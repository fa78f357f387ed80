"""
MF precoding and the five-term signal split.

 Group 1 - Term powers
   1. SINR from the term powers, cap for a vanishing denominator
   2. expectation split against direct evaluation
   3. measured mean gains approach Tr{Theta_n}

 Group 2 - Batch split
   4. reproducible for a fixed stream
   5. converges to the expectation split for large batches
   6. received symbol model without noise
   7. the five parts add up to the received power E|Y_n|^2
"""

from __future__ import annotations

import numpy as np
import pytest

from aeroacm.channel import (build_channel_stats, compose_channel, draw_los,
                             draw_scattered)
from aeroacm.config import SystemConfig
from aeroacm.errors import DimensionMismatch, IndexOutOfRange
from aeroacm.estimation import (dft_pilot, estimation_stats, mmse_estimate,
                               simulate_pilot_rx)
from aeroacm.numerics import RngStream, complex_normal
from aeroacm.precoding import (Precoder, TermPowers, decompose_terms,
                               expected_gains, measured_gains, mf_precoder,
                               received_symbol)

_CFG = SystemConfig(num_dta=8, num_dra=3, num_interferers=1)


def _setup():
    st = build_channel_stats(_CFG, draw_los(_CFG, RngStream(1)), 0.2)
    est = estimation_stats(st, 1.0, [0.3], 0.05)
    h = compose_channel(st, draw_scattered(st, RngStream(2)))
    h_hat = h.h_true + 0.1*draw_scattered(st, RngStream(3))
    g = compose_channel(st, draw_scattered(st, RngStream(4)))
    v_i = mf_precoder(g.h_true)
    return st, est, h, mf_precoder(h_hat), [(g.data_side, v_i, 0.3)]


# ── Group 1 ──────────────────────────────────────────────────────────────────

def test_term_powers_sinr():
    t = TermPowers(4.0, 0.5, 0.5, 0.5, 0.5)
    assert t.interference_plus_noise == 2.0
    assert t.total == 6.0
    assert t.sinr() == 2.0
    assert TermPowers(1.0, 0.0, 0.0, 0.0, 0.0).sinr(cap=1e6) == 1e6
    assert TermPowers(1e9, 1e-6, 0.0, 0.0, 0.0).sinr(cap=1e6) == 1e6


def test_expectation_split():
    st, est, h, pre, intf = _setup()
    n = 1
    t = decompose_terms(h.data_side, pre, 2.0, expected_gains(est), n, intf,
                        noise_var=0.05)
    row = h.data_side[n] @ pre.v
    tr = np.trace(est.theta_blocks[n]).real
    assert t.desired == pytest.approx(2.0*tr**2)
    assert t.est_error == pytest.approx(2.0*abs(row[n] - tr)**2)
    assert t.inter_antenna == pytest.approx(
        2.0*(abs(row[0])**2 + abs(row[2])**2))
    r_i = intf[0][0][n] @ intf[0][1].v
    assert t.interferer == pytest.approx(0.3*np.sum(np.abs(r_i)**2))
    assert t.noise == 0.05


def test_split_errors():
    st, est, h, pre, intf = _setup()
    with pytest.raises(IndexOutOfRange):
        decompose_terms(h.data_side, pre, 1.0, expected_gains(est), 3)
    with pytest.raises(DimensionMismatch):
        decompose_terms(h.data_side[:, :4], pre, 1.0, expected_gains(est),
                        0)
    with pytest.raises(DimensionMismatch):
        decompose_terms(h.data_side, pre, 1.0, [1.0, 2.0], 0)


def test_measured_gains_mean():
    st, est, h, pre, intf = _setup()
    pilot = dft_pilot(3)
    chans, pres = [], []
    for k in range(2000):
        real = compose_channel(st, draw_scattered(st, RngStream(100, k)))
        contam = st.varsigma*draw_scattered(st, RngStream(200, k))
        obs = simulate_pilot_rx([real, contam], [1.0, 0.3], pilot, 0.05,
                                RngStream(300, k))
        chans.append(real.data_side)
        pres.append(mf_precoder(mmse_estimate(obs, st, 1.0, [0.3], 0.05)))
    g = measured_gains(chans, pres)
    np.testing.assert_allclose(g.real, expected_gains(est), rtol=0.04)
    assert np.all(np.abs(g.imag) < 0.04*g.real)
    with pytest.raises(DimensionMismatch):
        measured_gains(chans, pres[:3])


# ── Group 2 ──────────────────────────────────────────────────────────────────

def test_batch_split_reproducible():
    st, est, h, pre, intf = _setup()
    a = decompose_terms(h.data_side, pre, 1.0, expected_gains(est), 0, intf,
                        0.05, RngStream(8), 100)
    b = decompose_terms(h.data_side, pre, 1.0, expected_gains(est), 0, intf,
                        0.05, RngStream(8), 100)
    assert a == b


def test_batch_split_converges():
    st, est, h, pre, intf = _setup()
    e = decompose_terms(h.data_side, pre, 1.0, expected_gains(est), 2, intf,
                        0.05)
    b = decompose_terms(h.data_side, pre, 1.0, expected_gains(est), 2, intf,
                        0.05, RngStream(9), 40000)
    for f in ("desired", "est_error", "inter_antenna", "interferer",
              "noise"):
        assert getattr(b, f) == pytest.approx(getattr(e, f), rel=0.05)


def test_received_symbol_noise_free():
    st, est, h, pre, intf = _setup()
    x = np.array([1.0, -1.0, 1j])
    y = received_symbol([h.data_side], [pre], [2.0], [x], 0.0, RngStream(1))
    np.testing.assert_allclose(y[:, 0], np.sqrt(2.0)*(h.data_side @ pre.v)
                               @ x)
    with pytest.raises(DimensionMismatch):
        received_symbol([h.data_side], [pre, pre], [1.0], [x], 0.0,
                        RngStream(1))


def test_precoder_is_estimate():
    m = np.ones((4, 2))
    assert isinstance(mf_precoder(m), Precoder)
    np.testing.assert_array_equal(mf_precoder(m).v, m)


def test_split_adds_up_to_received_power():
    st, est, h, pre, intf = _setup()
    (g_data, v_i, p_i), = intf
    reals = [compose_channel(st, draw_scattered(st, RngStream(20, k)))
             for k in range(20)]
    pres = [mf_precoder(r.h_true + 0.1*draw_scattered(st, RngStream(21, k)))
            for k, r in enumerate(reals)]
    mean_gain = measured_gains([r.data_side for r in reals], pres)
    rng = RngStream(22).generator()
    n, split, received = 1, 0.0, 0.0
    for k, (r, v) in enumerate(zip(reals, pres)):
        split += decompose_terms(r.data_side, v, 2.0, mean_gain, n, intf,
                                 0.05).total
        x0 = complex_normal(rng, (3, 20000))
        x1 = complex_normal(rng, (3, 20000))
        y = received_symbol([r.data_side, g_data], [v, v_i], [2.0, p_i],
                            [x0, x1], 0.05, RngStream(23, k))
        received += np.mean(np.abs(y[n])**2)
    assert split == pytest.approx(received, rel=0.02)
