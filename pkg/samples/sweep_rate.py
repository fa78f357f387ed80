"""
 rate per DRA versus one system parameter, closed form and simulation
"""
import matplotlib.pyplot as plt
import numpy as np

from aeroacm.config import SystemConfig
from aeroacm.montecarlo import run_sweep

# Sweep selection
#
case = 0

if case == 0:  # number of interfering aircraft
    axis, values = 'A', [0, 2, 4, 8, 14]
elif case == 1:  # distance between the aircraft [m]
    axis, values = 'd_ab', [5e3, 10e3, 40e3, 70e3, 200e3, 500e3]
elif case == 2:  # number of DTAs
    axis, values = 'N_t', [16, 32, 64, 120, 180]
elif case == 3:  # number of DRAs
    axis, values = 'N_r', [2, 4, 8]
elif case == 4:  # antenna correlation
    axis, values = 'rho', [0.1, 0.2, 0.4, 0.6]
elif case == 5:  # Rician factor
    axis, values = 'K_Rice', [0.0, 2.0, 5.0, 10.0]
else:
    print("ERROR: no sweep selected!")
    exit(1)

trials = 500
seed = 1
jobs = 4

cfg = SystemConfig().validate()
res = run_sweep(cfg, axis, values, trials, seed, jobs, progress=True)

x = np.array(values, dtype=float)
if axis == 'd_ab':
    x *= 1e-3

print("{:>10s} {:>12s} {:>12s} {:>12s}".format(
    axis, 'theoretical', 'approximate', 'simulated'))
for k in range(len(values)):
    print("{:10.3f} {:12.4f} {:12.4f} {:12.4f}".format(
        x[k], res.theoretical[k], res.approximate[k],
        res.simulated_mean[k]))

fig = plt.figure(figsize=[6, 4])

plt.plot(x, res.theoretical, 'b-o', label='Theoretical')
plt.plot(x, res.approximate, 'g--x', label='Approximate')
plt.plot(x, res.simulated_mean, 'r-s', label='Simulation')
plt.xlabel(axis)
plt.ylabel('Throughput per DRA [bps/Hz]')
plt.grid()
plt.legend()

plotFileFormat = 'png'
plotFileName = '.'.join(('sweep_{}'.format(axis), plotFileFormat))

plt.savefig(plotFileName, format=plotFileFormat, bbox_inches='tight', dpi=300)
