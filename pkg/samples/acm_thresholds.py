"""
 ACM distance thresholds for 32 and 64 DTAs against the reference tables
"""
from dataclasses import replace

import matplotlib.pyplot as plt

from aeroacm.acm import (design_thresholds, distance_grid, load_modes,
                         load_table, rate_curve)
from aeroacm.config import SystemConfig
from aeroacm.sinr import expected_rate

seed = 0
draws = 20
step = 5e3

fig = plt.figure(figsize=[7, 4])

for nt, fmt in [(32, 'b-'), (64, 'r-')]:

    ref = load_table('../data/acm_table_nt{}.json'.format(nt))
    modes = load_modes('../data/acm_table_nt32.json')

    cfg = SystemConfig(num_dta=nt).validate()
    d = distance_grid(cfg, step)
    curve = rate_curve(cfg, d, seed=seed, draws=draws)

    def refine(x):
        return expected_rate(replace(cfg, link_distance=x), seed=seed,
                             draws=draws)

    tab = design_thresholds(d, curve, modes, cfg.d_max, refine=refine)

    print("N_t = {}, coverage up to {:.1f} km".format(nt, tab.d_max*1e-3))
    print(" mode  SE [bps/Hz]  threshold [km]  reference [km]")
    t_ref = {m.spectral_efficiency: t for m, t in
             zip(ref.modes, ref.thresholds)}
    for m, t in zip(tab.modes, tab.thresholds):
        tr = t_ref.get(m.spectral_efficiency)
        print(" {:4d}  {:11.3f}  {:14.2f}  {:>14s}".format(
            m.index, m.spectral_efficiency, t*1e-3,
            '-' if tr is None else '{:.2f}'.format(tr*1e-3)))

    plt.plot(d*1e-3, curve, fmt, label='N_t = {}'.format(nt))
    for k, m in enumerate(tab.modes):
        lo, hi = tab.interval(k)
        plt.hlines(m.spectral_efficiency, lo*1e-3, hi*1e-3, colors=fmt[0],
                   linestyles='dashed')

plt.xscale('log')
plt.xlabel('Distance [km]')
plt.ylabel('Spectral efficiency [bps/Hz]')
plt.grid(which='both')
plt.legend()

plotFileFormat = 'png'
plotFileName = '.'.join(('acm_thresholds', plotFileFormat))

plt.savefig(plotFileName, format=plotFileFormat, bbox_inches='tight', dpi=300)
