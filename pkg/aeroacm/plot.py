"""
SVG figures of sweeps, CCDFs and ACM threshold designs

Figures are written with a fixed hash salt and without a date so that
reruns produce identical files. A provenance comment with the config hash
and the seed follows the XML header.
"""

import io
import logging

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

logger = logging.getLogger(__name__)

HASH_SALT = "aeroacm"

AXIS_LABEL = {
    "A": "Number of interfering aircraft A",
    "d_ab": "Distance [km]",
    "N_t": "Number of DTAs N_t",
    "N_r": "Number of DRAs N_r",
    "rho": "Correlation factor",
    "K_Rice": "Rician factor",
}


def provenance(config_hash, seed):
    return "config={} seed={}".format(config_hash, seed)


def save_svg(fig, path, prov=None):
    """ deterministic SVG of fig, prov is placed in an XML comment """
    buf = io.StringIO()
    with matplotlib.rc_context({'svg.hashsalt': HASH_SALT}):
        fig.savefig(buf, format='svg', metadata={'Date': None},
                    bbox_inches='tight')
    plt.close(fig)
    txt = buf.getvalue()
    if prov is not None:
        head, sep, body = txt.partition("?>\n")
        if sep:
            txt = head + sep + "<!-- {} -->\n".format(prov) + body
        else:
            txt = "<!-- {} -->\n".format(prov) + txt
    with open(path, 'w') as f:
        f.write(txt)
    logger.info("figure written to {}".format(path))
    return path


def _axis_values(result):
    x = np.asarray(result.axis_values, dtype=float)
    if result.axis_name == "d_ab":
        return x*1e-3
    return x


def plot_sweep(result, path, prov=None, total=False):
    """ theoretical, approximate and simulated rate along the sweep axis """
    df = result.to_frame(total=total)
    x = _axis_values(result)

    fig = plt.figure(figsize=[6, 4])
    plt.plot(x, df["theoretical"], 'b-o', label='Theoretical')
    plt.plot(x, df["approximate"], 'g--x', label='Approximate')
    plt.errorbar(x, df["simulated_mean"], yerr=2*df["stderr"], fmt='r-s',
                 label='Simulation')
    plt.xlabel(AXIS_LABEL.get(result.axis_name, result.axis_name))
    if total:
        plt.ylabel('Total throughput [bps/Hz]')
    else:
        plt.ylabel('Throughput per DRA [bps/Hz]')
    plt.grid()
    plt.legend()
    return save_svg(fig, path, prov)


def plot_ccdf(curves, path, prov=None):
    """ curves: list of (label, rate grid, probability) """
    fig = plt.figure(figsize=[6, 4])
    for lbl, x, p in curves:
        plt.plot(x, p, label=lbl)
    plt.xlabel('Throughput per DRA [bps/Hz]')
    plt.ylabel('CCDF')
    plt.ylim([0.0, 1.02])
    plt.grid()
    plt.legend()
    return save_svg(fig, path, prov)


def plot_acm(d_grid, curve, table, path, prov=None):
    """ rate curve with the spectral efficiency of the selected modes """
    d_km = np.asarray(d_grid, dtype=float)*1e-3

    fig = plt.figure(figsize=[7, 4])
    plt.plot(d_km, curve, 'b-', label='Achievable rate per DRA')
    for k, m in enumerate(table.modes):
        lo, hi = table.interval(k)
        plt.hlines(m.spectral_efficiency, lo*1e-3, hi*1e-3, colors='r')
        plt.vlines(lo*1e-3, 0.0, m.spectral_efficiency, colors='r',
                   linestyles='dotted')
        plt.text(lo*1e-3, m.spectral_efficiency, " {}".format(m.index),
                 va='bottom', fontsize=8)
    plt.xscale('log')
    plt.xlabel('Distance [km]')
    plt.ylabel('Spectral efficiency [bps/Hz]')
    plt.grid(which='both')
    plt.legend()
    return save_svg(fig, path, prov)
