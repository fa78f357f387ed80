"""
 CCDF of the simulated rate per DRA for several numbers of interferers
"""
import matplotlib.pyplot as plt

from aeroacm.config import SystemConfig
from aeroacm.montecarlo import ccdf, ccdf_grid, run_point

trials = 1000
seed = 1
jobs = 4

cfg = SystemConfig().validate()

fig = plt.figure(figsize=[6, 4])

for k, a in enumerate([2, 4, 8]):
    res = run_point(cfg.with_value('num_interferers', a), trials, seed, k,
                    jobs, progress=True)
    rates = [r.rate_per_dra for r in res]
    x = ccdf_grid(rates)
    plt.plot(x, ccdf(rates, x), label='A = {}'.format(a))

plt.xlabel('Throughput per DRA [bps/Hz]')
plt.ylabel('CCDF')
plt.grid()
plt.legend()

plotFileFormat = 'png'
plotFileName = '.'.join(('ccdf_rate', plotFileFormat))

plt.savefig(plotFileName, format=plotFileFormat, bbox_inches='tight', dpi=300)
