"""
 total data rate of the link for two traffic situations
"""
from aeroacm.config import SystemConfig
from aeroacm.sinr import expected_rate

seed = 0
draws = 50

# (interfering aircraft, distance [m])
cases = [(14, 10e3), (4, 70e3)]

for a, d in cases:
    cfg = SystemConfig(num_interferers=a, link_distance=d).validate()
    for mode in ('theoretical', 'approximate'):
        r = expected_rate(cfg, mode, seed, draws)
        total = r*cfg.bandwidth*cfg.num_dra
        print("A = {:2d}, d = {:5.1f} km, {:11s}: {:.3f} bps/Hz per DRA, "
              "{:.2f} Mbps total".format(a, d*1e-3, mode, r, total*1e-6))
