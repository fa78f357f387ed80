#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Command line front end

  analyze     link budget and closed-form SINR/rate per DRA
  design-acm  distance thresholds of an ACM table from the rate curve
  sweep       closed-form and Monte-Carlo rate along one parameter axis
  select      ACM mode for a given distance
  simulate    Monte-Carlo trials at one operating point
"""

import argparse
from dataclasses import replace
import logging
import os
import sys

import numpy as np
import pandas as pd

from aeroacm.acm import (design_thresholds, distance_grid, load_modes,
                         load_table, mode_data_rates, rate_curve, save_table,
                         select_mode)
from aeroacm.channel import (LOS_STREAM, draw_los_set, path_loss_db,
                             scenario_phase)
from aeroacm.config import (RunControls, SystemConfig, load_scenario,
                            worker_count)
from aeroacm.errors import (AcmError, BelowMinimumSeparation, ConfigError,
                            DimensionMismatch, DomainError, EmptySamples,
                            EmptyTable, InvalidAxis, OutOfRange)
from aeroacm.montecarlo import (AXES, ccdf, ccdf_grid, run_point, run_sweep,
                                write_ccdf, write_sweep)
from aeroacm.numerics import RngStream
from aeroacm.plot import plot_acm, plot_ccdf, plot_sweep, provenance
from aeroacm.sinr import (MODES, LinkBudget, evaluate_link, expected_rate,
                          link_estimation)

logger = logging.getLogger(__name__)

DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), '..',
                        'data')
DEFAULT_TABLE = os.path.join(DATA_DIR, 'acm_table_nt32.json')

# exit status per error class, checked in this order
EXIT_CODES = [
    (ConfigError, 3),
    (InvalidAxis, 4),
    (EmptyTable, 5),
    (OutOfRange, 6),
    (BelowMinimumSeparation, 7),
    (EmptySamples, 8),
    (DimensionMismatch, 9),
    (DomainError, 10),
    (AcmError, 1),
]

TERMS = ["desired", "est_error_term", "inter_antenna_term", "interferer_term",
         "noise", "sinr", "rate_per_dra"]


def exit_code(err):
    for cls, code in EXIT_CODES:
        if isinstance(err, cls):
            return code
    return 1


def _write_csv(df, path):
    df.to_csv(path, index=False, float_format="%.15g")
    logger.info("{} written".format(path))


def _want(args, kind):
    return args.format in (kind, 'both')


def mean_breakdowns(config, mode, seed, draws, phase):
    """ per-DRA terms averaged over `draws` LOS realizations """
    base = link_estimation(config, phase)
    acc = np.zeros((config.num_dra, len(TERMS)))
    for j in range(draws):
        los = draw_los_set(config, RngStream(seed, LOS_STREAM).child(j))
        bd = evaluate_link(config, los, mode, base=base)
        acc += np.array([[getattr(b, t) for t in TERMS] for b in bd])
    return pd.DataFrame(acc/draws, columns=TERMS)


def cmd_analyze(config, run, args):
    budget = LinkBudget.from_config(config)
    print("path loss          {:10.4f} dB".format(
        path_loss_db(config.carrier_freq, config.link_distance)))
    print("received power P   {:10.4e} W".format(budget.p_desired))
    print("interferer P_bar   {:10.4e} W".format(budget.p_bar))
    print("noise variance     {:10.4e} W".format(budget.noise_var))
    print("c = sigma^2/P      {:10.4e}".format(budget.noise_ratio))
    print("r = A P_bar/P      {:10.4e}".format(budget.interference_ratio))

    phase = scenario_phase(config, run.seed)
    frames = []
    for mode in MODES:
        df = mean_breakdowns(config, mode, run.seed, run.los_draws, phase)
        rate = df["rate_per_dra"].mean()
        total = rate*config.bandwidth*config.num_dra
        print("\n{}: rate per DRA {:.4f} bps/Hz, total data rate "
              "{:.3f} Mbps".format(mode, rate, total*1e-6))
        print(df.to_string(float_format="{:.4e}".format))
        df.insert(0, "dra", np.arange(config.num_dra))
        df.insert(0, "mode", mode)
        frames.append(df)

    if _want(args, 'csv'):
        os.makedirs(run.output_dir, exist_ok=True)
        _write_csv(pd.concat(frames, ignore_index=True),
                   os.path.join(run.output_dir, "analyze.csv"))
    return 0


def cmd_design_acm(config, run, args):
    modes = load_modes(run.modes_file or DEFAULT_TABLE,
                       config.num_subcarriers, config.cp_length)
    if not modes:
        raise EmptyTable("mode list is empty")
    phase = scenario_phase(config, run.seed)
    d_grid = distance_grid(config, run.grid_step)
    curve = rate_curve(config, d_grid, args.mode, run.seed, run.los_draws)

    def refine(d):
        return expected_rate(replace(config, link_distance=d), args.mode,
                             run.seed, run.los_draws, phase)

    table = design_thresholds(d_grid, curve, modes, config.d_max, run.margin,
                              refine, run.refine_tol)
    df = table.to_frame(config.bandwidth, config.num_dra)
    print(df.to_string(index=False))
    for m, why in table.dropped:
        print("dropped mode {} ({} {}): {}".format(m.index, m.modulation,
                                                  m.code_rate, why))

    os.makedirs(run.output_dir, exist_ok=True)
    if _want(args, 'csv'):
        _write_csv(df, os.path.join(run.output_dir, "acm_table.csv"))
        _write_csv(pd.DataFrame({"distance_km": d_grid*1e-3, "rate": curve}),
                   os.path.join(run.output_dir, "rate_curve.csv"))
        save_table(table, os.path.join(run.output_dir, "acm_table.json"))
    if _want(args, 'svg'):
        plot_acm(d_grid, curve, table,
                 os.path.join(run.output_dir, "acm_design.svg"),
                 provenance(config.config_hash(), run.seed))
    return 0


def parse_values(txt, axis):
    """ comma separated axis values, d_ab given in km """
    try:
        vals = [float(v) for v in txt.split(',') if v.strip()]
    except ValueError as e:
        raise ConfigError("values", str(e)) from e
    if not vals:
        raise ConfigError("values", "empty list")
    if axis == "d_ab":
        return [v*1e3 for v in vals]
    if axis in ("A", "N_t", "N_r"):
        if any(v != int(v) for v in vals):
            raise ConfigError("values", "integers expected for " + axis)
        return [int(v) for v in vals]
    return vals


def cmd_sweep(config, run, args):
    if args.axis not in AXES:
        raise InvalidAxis("axis {} not in {}".format(args.axis, list(AXES)))
    if args.values is None:
        raise ConfigError("values", "required for sweep")
    values = parse_values(args.values, args.axis)
    jobs = worker_count(args.jobs)
    logger.info("{} worker(s)".format(jobs))
    res = run_sweep(config, args.axis, values, run.trials, run.seed, jobs,
                    run.inner_batch, progress=not args.quiet)

    os.makedirs(run.output_dir, exist_ok=True)
    print(res.to_frame().to_string(index=False))
    curves = []
    g = ccdf_grid(np.concatenate(res.samples))
    for i, (v, s) in enumerate(zip(res.axis_values, res.samples)):
        lbl = v*1e-3 if args.axis == "d_ab" else v
        curves.append(("{}={:g}".format(args.axis, lbl), g, ccdf(s, g)))
        if _want(args, 'csv'):
            write_ccdf(s, os.path.join(run.output_dir,
                                       "ccdf_{}.csv".format(i)), g)
    if _want(args, 'csv'):
        write_sweep(res, run.output_dir)
    if _want(args, 'svg'):
        prov = provenance(config.config_hash(), run.seed)
        plot_sweep(res, os.path.join(run.output_dir, "sweep.svg"), prov)
        plot_sweep(res, os.path.join(run.output_dir, "sweep_total.svg"),
                   prov, total=True)
        plot_ccdf(curves, os.path.join(run.output_dir, "ccdf.svg"), prov)
    return 0


def cmd_select(config, run, args):
    if args.distance is None:
        raise ConfigError("distance", "required for select")
    path = args.table or DEFAULT_TABLE
    # a CSV table carries no d_max, the scenario's applies
    d_max = config.d_max if str(path).endswith(".csv") else None
    table = load_table(path, config.num_subcarriers, config.cp_length,
                       d_max)
    m = select_mode(args.distance*1e3, table)
    per_dra, total = mode_data_rates(m, config.bandwidth, config.num_dra)
    print("distance {:.2f} km: mode {} {} rate {} SE {:.3f} bps/Hz".format(
        args.distance, m.index, m.modulation, m.code_rate,
        m.spectral_efficiency))
    print("data rate per DRA {:.3f} Mbps, total {:.3f} Mbps".format(
        per_dra*1e-6, total*1e-6))
    return 0


def cmd_simulate(config, run, args):
    jobs = worker_count(args.jobs)
    logger.info("{} worker(s)".format(jobs))
    res = run_point(config, run.trials, run.seed, 0, jobs, run.inner_batch,
                    perfect_csi=args.perfect_csi, progress=not args.quiet)
    rates = np.array([r.rate_per_dra for r in res])
    err = np.std(rates, ddof=1)/np.sqrt(rates.size) if rates.size > 1 else 0.0
    print("trials              {}".format(rates.size))
    print("simulated mean      {:.4f} bps/Hz (stderr {:.4f})".format(
        np.mean(rates), err))
    print("theoretical         {:.4f} bps/Hz".format(
        np.mean([r.theoretical_rate for r in res])))
    print("approximate         {:.4f} bps/Hz".format(
        np.mean([r.approximate_rate for r in res])))

    os.makedirs(run.output_dir, exist_ok=True)
    if _want(args, 'csv'):
        sinr = np.array([r.per_dra_sinr for r in res])
        df = pd.DataFrame(sinr, columns=["sinr_{}".format(n) for n in
                                         range(config.num_dra)])
        df.insert(0, "rate", rates)
        df.insert(0, "trial", np.arange(rates.size))
        _write_csv(df, os.path.join(run.output_dir, "samples.csv"))
        write_ccdf(rates, os.path.join(run.output_dir, "ccdf.csv"))
    if _want(args, 'svg'):
        g = ccdf_grid(rates)
        plot_ccdf([("simulation", g, ccdf(rates, g))],
                  os.path.join(run.output_dir, "ccdf.svg"),
                  provenance(config.config_hash(), run.seed))
    return 0


COMMANDS = {
    "analyze": cmd_analyze,
    "design-acm": cmd_design_acm,
    "sweep": cmd_sweep,
    "select": cmd_select,
    "simulate": cmd_simulate,
}


def build_parser():
    parser = argparse.ArgumentParser(
        description="Aeronautical massive MIMO rate analysis and ACM design")

    parser.add_argument("command", choices=list(COMMANDS))

    # Scenario and run controls
    #
    parser.add_argument("--config", default=None,
                        help="JSON scenario file [Table defaults]")
    parser.add_argument("--seed", type=int, default=None,
                        help="master seed [scenario]")
    parser.add_argument("--trials", type=int, default=None,
                        help="Monte-Carlo trials per point [scenario]")
    parser.add_argument("--out", default=None,
                        help="output directory [scenario]")
    parser.add_argument("--format", choices=['csv', 'svg', 'both'],
                        default='both', help="output files [both]")
    parser.add_argument("--mode", choices=list(MODES), default='theoretical',
                        help="closed-form interference model [theoretical]")

    parser.add_argument("--axis", default=None,
                        help="sweep axis, one of {}".format(list(AXES)))
    parser.add_argument("--values", default=None,
                        help="comma separated axis values (d_ab in km)")

    parser.add_argument("--distance", type=float, default=None,
                        help="link distance for select [km]")
    parser.add_argument("--table", default=None,
                        help="ACM table for select (JSON or CSV)")
    parser.add_argument("--modes", default=None,
                        help="ACM mode set for design-acm (JSON)")
    parser.add_argument("--margin", type=float, default=None,
                        help="rate back-off before thresholding [bps/Hz]")
    parser.add_argument("--perfect-csi", action='store_true',
                        help="simulate with perfect channel knowledge")

    parser.add_argument("-j", "--jobs", type=int, default=None,
                        help='Max. number of parallel processes')
    parser.add_argument("-v", "--verbose", action='count', default=0)
    parser.add_argument("--quiet", action='store_true',
                        help="no progress bars")
    return parser


def scenario(args):
    """ (SystemConfig, RunControls) of the scenario file and the flags """
    if args.config is not None:
        config, run = load_scenario(args.config)
    else:
        config, run = SystemConfig().validate(), RunControls()
    over = {"seed": args.seed, "trials": args.trials,
            "output_dir": args.out, "margin": args.margin,
            "modes_file": args.modes}
    run = replace(run, **{k: v for k, v in over.items() if v is not None})
    return config, run.validate()


def main(argv=None):

    # Parse command line arguments
    #
    args = build_parser().parse_args(argv)

    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose,
                                                                 2)]
    logging.basicConfig(format="%(asctime)s - %(levelname)s - %(message)s",
                        level=level)

    try:
        config, run = scenario(args)
        return COMMANDS[args.command](config, run, args)
    except AcmError as e:
        logger.error("{}: {}".format(type(e).__name__, e))
        print("error: {}".format(e), file=sys.stderr)
        return exit_code(e)


# Call main function
#
if __name__ == "__main__":
    sys.exit(main())
