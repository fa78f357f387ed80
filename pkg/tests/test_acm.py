"""
Distance-based ACM design and selection.

 Group 1 - Mode arithmetic
   1. spectral efficiency from modulation, code rate and cyclic prefix
   2. data rates per DRA and in total

 Group 2 - Selection on the reference table
   3. distances inside, on the edges of and outside the table
   4. mode index nonincreasing in distance

 Group 3 - Threshold design
   5. analytic curve: crossings, truncated coverage, refinement
   6. flat curves: dropped and merged modes, empty table. A curve above
      only the lowest SE keeps that mode down to the shortest grid distance,
      so d_1 is D_min there, not d_max
   7. safety margin moves thresholds inwards
   8. table validity holds on the grid

 Group 4 - Rate curve
   9. closed-form curve decreases with distance
  10. 64 DTAs reach at least as far as 32 for every shared mode
  11. reference system: all seven modes, mode 6 from about 25 km

 Group 5 - Files
  12. JSON and CSV tables load back
"""

from __future__ import annotations

import os

import numpy as np
import pytest

from aeroacm.acm import (AcmMode, AcmTable, design_thresholds,
                         distance_grid, load_modes, load_table,
                         mode_data_rates, modulation_order, rate_curve,
                         save_table, select_mode, spectral_efficiency)
from aeroacm.config import SystemConfig
from aeroacm.errors import (BelowMinimumSeparation, DomainError, EmptyTable,
                            OutOfRange)

_GRID = np.arange(5e3, 740e3 + 1.0, 1e3)


def _modes(*se):
    return [AcmMode(k + 1, 4, 0.5, s) for k, s in enumerate(se)]


def _linear(d):
    """ 3.5 bps/Hz at 0 falling to 0.5 bps/Hz at 740 km """
    return 3.5 - 3.0*np.asarray(d)/740e3


def _crossing(se):
    return (3.5 - se)*740e3/3.0


@pytest.fixture
def table32(data_dir):
    return load_table(os.path.join(data_dir, "acm_table_nt32.json"))


# ── Group 1 ──────────────────────────────────────────────────────────────────

def test_spectral_efficiency():
    assert spectral_efficiency(4, 0.533, 512, 32) == \
        pytest.approx(0.99938, abs=1e-5)
    assert spectral_efficiency(2, 1.0, 512, 0) == 1.0
    assert spectral_efficiency(8, 0.642, 512, 32) == \
        pytest.approx(1.8056, abs=1e-4)


def test_spectral_efficiency_domain():
    for args in [(1, 0.5, 512, 32), (4, 0.0, 512, 32), (4, 0.5, 512, 512)]:
        with pytest.raises(DomainError):
            spectral_efficiency(*args)


def test_mode_data_rates():
    per, total = mode_data_rates(AcmMode(6, 16, 0.731, 2.747), 6e6, 4)
    assert per == pytest.approx(16.482e6)
    assert total == pytest.approx(65.928e6)
    per, total = mode_data_rates(AcmMode(1, 2, 0.488, 0.459), 6e6, 4)
    assert (per, total) == pytest.approx((2.754e6, 11.016e6))
    assert mode_data_rates(AcmMode(1, 2, 0.5, 1.0), 1.0, 1) == (1.0, 1.0)


def test_modulation_labels():
    assert modulation_order("8-QAM") == 8
    assert modulation_order("16qam") == 16
    assert modulation_order("BPSK") == 2
    with pytest.raises(DomainError):
        modulation_order("64-APSK")


# ── Group 2 ──────────────────────────────────────────────────────────────────

def test_select_reference(table32):
    assert select_mode(30e3, table32).index == 6
    assert select_mode(600e3, table32).index == 1
    assert select_mode(25e3, table32).index == 6
    assert select_mode(40e3, table32).index == 5
    assert select_mode(5.56e3, table32).index == 7
    with pytest.raises(OutOfRange):
        select_mode(750e3, table32)
    with pytest.raises(OutOfRange):
        select_mode(740e3, table32)
    with pytest.raises(BelowMinimumSeparation):
        select_mode(3e3, table32)


def test_select_monotone(table32):
    d = np.linspace(5.56e3, 739e3, 500)
    k = [select_mode(x, table32).index for x in d]
    assert np.all(np.diff(k) <= 0)
    assert k[0] == 7 and k[-1] == 1


def test_table_validation():
    with pytest.raises(EmptyTable):
        AcmTable((), (), 740e3)
    with pytest.raises(DomainError):
        AcmTable(tuple(_modes(1.0, 2.0)), (10e3, 20e3), 740e3)
    with pytest.raises(DomainError):
        AcmTable(tuple(_modes(2.0, 1.0)), (20e3, 10e3), 740e3)


# ── Group 3 ──────────────────────────────────────────────────────────────────

def test_design_linear_curve():
    modes = _modes(1.0, 2.05, 3.1)
    t = design_thresholds(_GRID, _linear(_GRID), modes, 740e3)
    assert [m.index for m in t.modes] == [1, 2, 3]
    assert t.thresholds[-1] == 5e3
    assert abs(t.thresholds[0] - _crossing(2.05)) <= 1e3
    assert abs(t.thresholds[1] - _crossing(3.1)) <= 1e3
    # nothing above 1.0 bps/Hz beyond the first crossing
    assert abs(t.d_max - _crossing(1.0)) <= 1e3
    assert t.d_max < 740e3


def test_design_refined():
    modes = _modes(1.0, 2.05, 3.1)
    t = design_thresholds(_GRID, _linear(_GRID), modes, 740e3,
                          refine=_linear, tol=100.0)
    for got, se in zip(t.thresholds[:2], (2.05, 3.1)):
        assert _crossing(se) - 100.0 <= got <= _crossing(se)


def test_design_flat_curve():
    t = design_thresholds(_GRID, np.full(_GRID.size, 1.5), _modes(1.0, 2.0),
                          740e3)
    assert [m.index for m in t.modes] == [1]
    assert t.thresholds == (5e3,)
    assert t.d_max == 740e3
    assert [m.index for m, _ in t.dropped] == [2]


def test_design_merges_equal_reach():
    t = design_thresholds(_GRID, np.full(_GRID.size, 3.0), _modes(1.0, 2.0),
                          740e3)
    assert [m.index for m in t.modes] == [2]
    assert [m.index for m, _ in t.dropped] == [1]


def test_design_empty():
    with pytest.raises(EmptyTable):
        design_thresholds(_GRID, np.full(_GRID.size, 0.5), _modes(1.0, 2.0))
    with pytest.raises(EmptyTable):
        design_thresholds(_GRID, _linear(_GRID), [])


def test_design_margin():
    modes = _modes(1.0, 2.05, 3.1)
    t0 = design_thresholds(_GRID, _linear(_GRID), modes, 740e3)
    t1 = design_thresholds(_GRID, _linear(_GRID), modes, 740e3, margin=0.2)
    assert all(b < a for a, b in zip(t0.thresholds[:2], t1.thresholds[:2]))


def test_design_validity():
    curve = 0.4 + 3.0*np.exp(-_GRID/150e3)
    modes = _modes(0.459, 1.0, 1.322, 1.809, 2.194, 2.747, 3.197)
    t = design_thresholds(_GRID, curve, modes, 740e3)
    assert np.all(np.diff(t.thresholds) < 0)
    for k, m in enumerate(t.modes):
        lo, hi = t.interval(k)
        sel = (_GRID >= lo) & (_GRID < hi)
        assert np.all(curve[sel] >= m.spectral_efficiency)


def test_design_bad_grid():
    with pytest.raises(DomainError):
        design_thresholds(_GRID[::-1], _linear(_GRID), _modes(1.0))


# ── Group 4 ──────────────────────────────────────────────────────────────────

def test_rate_curve_decreasing():
    cfg = SystemConfig(correlation_phase=0.5)
    r = rate_curve(cfg, [10e3, 300e3], draws=2)
    assert r[0] > r[1] > 0.0
    with pytest.raises(DomainError):
        rate_curve(cfg, [1e3, 10e3], draws=1)


def test_more_dtas_reach_further(data_dir):
    modes = load_modes(os.path.join(data_dir, "acm_table_nt32.json"))
    tables, curves = [], []
    for nt in (32, 64):
        cfg = SystemConfig(num_dta=nt, correlation_phase=0.5)
        grid = distance_grid(cfg, 35e3)
        c = rate_curve(cfg, grid, draws=4)
        tables.append(design_thresholds(grid, c, modes, cfg.d_max))
        curves.append(c)
    assert np.all(curves[1] >= curves[0])
    reach = [{m.index: t.interval(k)[1] for k, m in enumerate(t.modes)}
             for t in tables]
    for k in set(reach[0]) & set(reach[1]):
        assert reach[1][k] >= reach[0][k]


def test_reference_design(data_dir):
    modes = load_modes(os.path.join(data_dir, "acm_table_nt32.json"))
    cfg = SystemConfig()
    grid = distance_grid(cfg, 5e3)
    curve = rate_curve(cfg, grid, draws=10)
    t = design_thresholds(grid, curve, modes, cfg.d_max,
                          refine=lambda d: rate_curve(cfg, [d], draws=10)[0],
                          tol=500.0)
    assert len(t.modes) == 7
    assert 17.5e3 <= t.thresholds[5] <= 32.5e3
    assert np.all(np.diff(t.thresholds) < 0)
    for k, m in enumerate(t.modes):
        lo, hi = t.interval(k)
        sel = (grid >= lo) & (grid < hi)
        assert np.all(curve[sel] >= m.spectral_efficiency)


def test_distance_grid():
    g = distance_grid(SystemConfig(), 1000.0)
    assert g[0] == 5e3 and g[-1] == 740e3
    assert g.size == 736


# ── Group 5 ──────────────────────────────────────────────────────────────────

def test_reference_tables(data_dir, table32):
    assert len(table32.modes) == 7
    assert table32.thresholds[5] == 25e3
    t64 = load_table(os.path.join(data_dir, "acm_table_nt64.json"))
    assert [m.spectral_efficiency for m in t64.modes] == \
        [1.322, 1.809, 2.194, 2.747, 3.197]


def test_save_and_load(tmp_path, table32):
    p = str(tmp_path / "t.json")
    save_table(table32, p)
    t = load_table(p)
    assert t.thresholds == table32.thresholds
    assert t.modes == table32.modes

    csv = str(tmp_path / "t.csv")
    table32.to_frame(6e6, 4).to_csv(csv, index=False, float_format="%.15g")
    t = load_table(csv)
    assert t.thresholds == pytest.approx(table32.thresholds)
    assert [m.index for m in t.modes] == list(range(1, 8))


def test_load_modes_formula(tmp_path):
    p = tmp_path / "m.json"
    p.write_text('{"modes": [{"modulation": "QPSK", "code_rate": 0.533}]}')
    m = load_modes(str(p))
    assert m[0].index == 1
    assert m[0].spectral_efficiency == pytest.approx(0.999375)
