"""Command-line interface: simulate, fit, predict, acf, compare-ar, convert.

Every subcommand writes machine-readable CSV/JSON at full precision plus a
short human summary on stdout, and can optionally render a matplotlib figure
next to the delimited output (``--plot``).  Exit codes: 0 success, 1
recoverable domain error (single-line machine-parsable message on stderr),
2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import ar_baseline, plotting
from .covariance import CovarianceModel
from .dataio import (TimeSeriesSample, ingest_csv, load_model, save_model,
                     write_series_csv, write_table_csv)
from .estimate import empirical_autocovariance, mce_fit, mle_fit
from .exceptions import OUProcessError
from .kernels import (OUModel, format_kappa, parse_complex_list,
                      phi_from_kappa)
from .predict import predict_series
from .simulate import simulate_grid


def _add_plot_flag(p):
    p.add_argument("--plot", metavar="PNG",
                   help="also render a figure to this file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ouprocess",
        description="Model stationary time series with Ornstein-Uhlenbeck "
                    "processes of order p.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert",
                       help="convert between kappa and phi parameterisations")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--kappa", help="comma-separated complex rates, "
                                   "e.g. '0.9,0.2+0.4i,0.2-0.4i'")
    g.add_argument("--phi", help="comma-separated real phi coefficients")
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("-o", "--output", help="model JSON path (default stdout)")

    p = sub.add_parser("simulate", help="draw an exact OU(p) sample path")
    p.add_argument("--model", required=True, help="model JSON file")
    p.add_argument("--n", type=int, required=True,
                   help="number of steps (n+1 values emitted)")
    p.add_argument("--tau", type=float, default=1.0, help="grid spacing")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True, help="output CSV (t,value)")
    _add_plot_flag(p)

    p = sub.add_parser("fit", help="fit an OU(p) model to a CSV series")
    p.add_argument("data", help="input CSV (value or t,value)")
    p.add_argument("--method", choices=["mle-diff", "mle-centered", "mce"],
                   default="mce")
    p.add_argument("--order", type=int, required=True, help="process order p")
    p.add_argument("--T", type=int, default=None,
                   help="MCE horizon (default: 0.9 n)")
    p.add_argument("--mean", default="sample",
                   help="mean policy: sample | zero | <value>")
    p.add_argument("--starts", type=int, default=20,
                   help="random multi-start count for MCE")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True, help="model JSON path")
    p.add_argument("--report", help="optional fit-report JSON path")

    p = sub.add_parser("acf", help="empirical vs model autocovariances")
    p.add_argument("--data", required=True, help="input CSV")
    p.add_argument("--model", required=True, help="model JSON file")
    p.add_argument("--maxlag", type=int, default=20)
    p.add_argument("--mean", default="sample")
    p.add_argument("-o", "--output", required=True,
                   help="output CSV (lag,empirical,model)")
    _add_plot_flag(p)

    p = sub.add_parser("predict",
                       help="best linear prediction with 2-sigma bands")
    p.add_argument("data", help="input CSV")
    p.add_argument("--model", required=True, help="model JSON file")
    p.add_argument("--from", dest="t_from", type=float, default=None)
    p.add_argument("--to", dest="t_to", type=float, default=None)
    p.add_argument("--points-per-step", type=int, default=100)
    p.add_argument("--window", type=int, default=None,
                   help="condition on the last this-many observations")
    p.add_argument("-o", "--output", required=True,
                   help="output CSV (t,mean,sd,lo,hi)")
    _add_plot_flag(p)

    p = sub.add_parser("compare-ar",
                       help="OU(2) vs AR(2) third-correlation gap")
    p.add_argument("--lambda1", type=float, required=True)
    p.add_argument("--lambda2", type=float, required=True)
    p.add_argument("--lags", type=int, default=10,
                   help="length of the correlation table")
    p.add_argument("--grid", action="store_true",
                   help="emit the gap over a (0, grid-max]^2 rate grid")
    p.add_argument("--grid-max", type=float, default=3.0)
    p.add_argument("--grid-step", type=float, default=0.02)
    p.add_argument("-o", "--output",
                   help="output CSV (correlation table, or grid with --grid)")
    _add_plot_flag(p)

    return parser


def cmd_convert(args) -> int:
    if args.kappa is not None:
        kappa = parse_complex_list(args.kappa)
        model = OUModel(phi=tuple(phi_from_kappa(kappa)),
                        sigma2=args.sigma2, mu=args.mu)
    else:
        phi = [float(t) for t in args.phi.split(",") if t.strip()]
        model = OUModel(phi=tuple(phi), sigma2=args.sigma2, mu=args.mu)
    kappa = model.kappa()  # validates admissibility both ways
    doc = json.dumps(model.to_dict(), indent=2)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(doc + "\n")
    else:
        print(doc)
    print(f"p = {model.p}")
    print(f"phi = ({', '.join(f'{v:.6g}' for v in model.phi)})")
    print(f"kappa = ({format_kappa(kappa)})")
    return 0


def cmd_simulate(args) -> int:
    model = load_model(args.model)
    sample = simulate_grid(model, n=args.n, tau=args.tau, seed=args.seed)
    write_series_csv(args.output, sample)
    print(f"simulated {len(sample)} values (tau={args.tau:g}, seed={args.seed}) "
          f"-> {args.output}")
    if args.plot:
        plotting.save_series(args.plot, sample)
        print(f"figure -> {args.plot}")
    return 0


def cmd_fit(args) -> int:
    sample = ingest_csv(args.data, mean_policy=args.mean)
    if args.method == "mce":
        result = mce_fit(sample, p=args.order, T=args.T, starts=args.starts,
                         seed=args.seed)
    else:
        variant = args.method.split("-", 1)[1]
        result = mle_fit(sample, p=args.order, variant=variant,
                         seed=args.seed)
    save_model(args.output, result.model)
    kappa = result.kappa()
    print(f"method = {result.method}  (order {args.order}, "
          f"n = {len(sample)})")
    print(f"phi_hat = ({', '.join(f'{v:.6g}' for v in result.model.phi)})")
    print(f"sigma2_hat = {result.model.sigma2:.6g}   "
          f"mu = {result.model.mu:.6g}")
    print(f"kappa_hat = ({format_kappa(kappa)})")
    print(f"objective = {result.objective:.10g}  "
          f"iterations = {result.iterations}  converged = {result.converged}")
    print(f"model -> {args.output}")
    if args.report:
        report = {
            "method": result.method,
            "objective": result.objective,
            "T": result.T,
            "iterations": result.iterations,
            "converged": result.converged,
            "kappa": [[k.real, k.imag] for k in kappa],
            "model": result.model.to_dict(),
        }
        with open(args.report, "w") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
        print(f"report -> {args.report}")
    return 0


def cmd_acf(args) -> int:
    sample = ingest_csv(args.data, mean_policy=args.mean)
    model = load_model(args.model)
    maxlag = min(args.maxlag, len(sample) - 1)
    g_emp = empirical_autocovariance(sample, maxlag)
    cov = CovarianceModel.from_model(model)
    lags = np.arange(maxlag + 1)
    g_mod = model.sigma2 * CovarianceModel.from_model(
        OUModel(model.phi, 1.0, model.mu)).gamma(lags * sample.tau)
    write_table_csv(args.output, ["lag", "empirical", "model"],
                    [lags, g_emp, g_mod])
    print(f"autocovariances at lags 0..{maxlag} -> {args.output}")
    print(f"gamma_e(0) = {g_emp[0]:.6g}   gamma_model(0) = {g_mod[0]:.6g}")
    if args.plot:
        unit = CovarianceModel.from_model(OUModel(model.phi, 1.0, model.mu))
        plotting.save_acf(args.plot, lags, g_emp,
                          lambda t: model.sigma2 * unit.gamma(t), sample.tau)
        print(f"figure -> {args.plot}")
    return 0


def cmd_predict(args) -> int:
    sample = ingest_csv(args.data)
    model = load_model(args.model)
    band = predict_series(model, sample, t_from=args.t_from, t_to=args.t_to,
                          points_per_step=args.points_per_step,
                          window=args.window)
    write_table_csv(args.output, ["t", "mean", "sd", "lo", "hi"],
                    [band.times, band.mean, band.sd, band.lo, band.hi])
    print(f"predicted {len(band.times)} points on "
          f"[{band.times[0]:g}, {band.times[-1]:g}] -> {args.output}")
    if args.plot:
        plotting.save_prediction(args.plot, band, sample)
        print(f"figure -> {args.plot}")
    return 0


def cmd_compare_ar(args) -> int:
    l1, l2 = args.lambda1, args.lambda2
    gap = ar_baseline.lemma_gap(l1, l2)
    print(f"lambda = ({l1:g}, {l2:g}), tau = 1")
    print(f"r3 - rho3 = {gap:.7f}")
    if args.grid:
        lam1, lam2, gaps = ar_baseline.lemma_gap_grid(args.grid_max,
                                                      args.grid_step)
        if args.output:
            ii, jj = np.meshgrid(np.arange(len(lam1)), np.arange(len(lam2)),
                                 indexing="ij")
            write_table_csv(args.output, ["lambda1", "lambda2", "gap"],
                            [lam1[ii.ravel()], lam2[jj.ravel()],
                             gaps.ravel()])
            print(f"gap grid ({len(lam1)}x{len(lam2)}) -> {args.output}")
        if args.plot:
            plotting.save_gap_surface(args.plot, lam1, lam2, gaps)
            print(f"figure -> {args.plot}")
        return 0
    lags = np.arange(1, args.lags + 1)
    ou_rho = np.array([ar_baseline.ou2_rho(l1, l2, int(h)) for h in lags])
    ar_rho = ar_baseline.ar2_correlations(ou_rho[0], ou_rho[1], args.lags)
    if args.output:
        write_table_csv(args.output, ["lag", "ou2_rho", "ar2_rho"],
                        [lags, ou_rho, ar_rho])
        print(f"correlation table (lags 1..{args.lags}) -> {args.output}")
    if args.plot:
        plotting.save_correlation_table(args.plot, lags, ou_rho, ar_rho)
        print(f"figure -> {args.plot}")
    return 0


_COMMANDS = {
    "convert": cmd_convert,
    "simulate": cmd_simulate,
    "fit": cmd_fit,
    "acf": cmd_acf,
    "predict": cmd_predict,
    "compare-ar": cmd_compare_ar,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except OUProcessError as e:
        print(f"ERROR {e.code}: {e}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as e:
        print(f"ERROR INVALID_INPUT: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
