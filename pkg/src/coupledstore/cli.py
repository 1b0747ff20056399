"""Command-line front end: ``coupledstore {coupling,simulate,sweep}``.

By default the linewidth product ``kappa*t_p`` fixes the pulse width and
``kappa = 1``, so every time in the output is in units of ``1/kappa``.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import AnalyticPopulation
from .coupling import SystemConfig, coherent_coupling, synthesize_profile, write_profile_csv
from .dynamics import ErrorModel, integrate, trajectory_summary, write_trajectory_csv
from .errors import StorageError, Unconverged
from .output import dumps, fmt, write_json
from .pulse import DEFAULT_EDGE_THRESHOLD, GaussianPulse, SechPulse, read_pulse_csv
from .sweep import AMPLITUDE, DELAY, SweepSpec, run_sweep, summarize, write_sweep_csv

OUTPUT_DIR_ENV = "COUPLEDSTORE_OUTPUT_DIR"

EXIT_USAGE = 2
EXIT_PHYSICS = 3


class UsageError(Exception):
    pass


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _range3(text):
    parts = _float_list(text)
    if len(parts) != 3 or parts[2] != int(parts[2]) or parts[2] < 1:
        raise argparse.ArgumentTypeError("expected START,STOP,COUNT")
    return parts[0], parts[1], int(parts[2])


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("pulse")
    g.add_argument("--pulse", default="gaussian", help="gaussian, sech, or a t,amplitude CSV file")
    g.add_argument("--kappa-tp", type=float, default=20.0, help="linewidth product kappa*t_p (default 20)")
    g.add_argument("--kappa", type=float, default=1.0, help="explicit decay rate (default 1)")
    g.add_argument("--T", dest="T", type=float, help="peak arrival time (default 5 eta or 10 beta)")
    g.add_argument("--eta", type=float, help="Gaussian standard deviation, overrides --kappa-tp")
    g.add_argument("--beta", type=float, help="sech width, overrides --kappa-tp")
    g.add_argument("--edge-threshold", type=float, default=DEFAULT_EDGE_THRESHOLD)
    g = common.add_argument_group("run")
    g.add_argument("--np", dest="n_p", type=float, default=1.0, help="coherent mean photon number")
    g.add_argument("--dt", type=float, help="time step (default 1e-3/kappa)")
    g.add_argument("--t-end", type=float, help="horizon (default from the pulse, plus any delay)")
    g.add_argument("--output", "-o", help="output file (JSON sidecar gets a .json suffix)")
    g.add_argument("--format", choices=("csv", "json"), default="csv")

    parser = argparse.ArgumentParser(prog="coupledstore", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coupling", parents=[common], help="synthesize the ideal coupling profile")
    p.add_argument("--magnitude", action="store_true", help="write |g| instead of the signed coupling")

    p = sub.add_parser("simulate", parents=[common], help="integrate the storage dynamics")
    p.add_argument("--g0", type=float, default=1.0, help="coupling amplitude factor")
    p.add_argument("--delay-frac", type=float, default=0.0, help="coupling delay as a fraction of t_p")
    p.add_argument("--oracle", action="store_true", help="add the closed-form population column")

    p = sub.add_parser("sweep", parents=[common], help="efficiency versus coupling error")
    p.add_argument("--axis", choices=(AMPLITUDE, DELAY), default=AMPLITUDE)
    vals = p.add_mutually_exclusive_group()
    vals.add_argument("--values", type=_float_list, help="comma-separated axis values")
    vals.add_argument("--range", type=_range3, help="START,STOP,COUNT")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    return parser


def make_shape(args):
    kind = args.pulse
    tp = args.kappa_tp / args.kappa
    if kind == "gaussian":
        if args.beta is not None:
            raise UsageError("--beta applies to sech pulses")
        if args.eta is not None:
            return GaussianPulse(T=5.0 * args.eta if args.T is None else args.T, eta=args.eta)
        return GaussianPulse.from_duration(tp, T=args.T)
    if kind == "sech":
        if args.eta is not None:
            raise UsageError("--eta applies to Gaussian pulses")
        if args.beta is not None:
            return SechPulse(T=10.0 * args.beta if args.T is None else args.T, beta=args.beta)
        return SechPulse.from_duration(tp, T=args.T)
    if any(v is not None for v in (args.T, args.eta, args.beta)):
        raise UsageError("--T/--eta/--beta do not apply to tabulated pulses")
    path = Path(kind)
    if not path.is_file():
        raise UsageError(f"--pulse must be gaussian, sech or a readable file, got {kind!r}")
    return read_pulse_csv(path, edge_threshold=args.edge_threshold)


def make_config(args, shape, extend=0.0):
    dt = 1e-3 / args.kappa if args.dt is None else args.dt
    t_end = shape.default_t_end + abs(extend) if args.t_end is None else args.t_end
    return SystemConfig(kappa=args.kappa, t_end=t_end, dt=dt, n_p=args.n_p)


def output_paths(args):
    if args.output:
        data = Path(args.output)
    else:
        data = Path(os.environ.get(OUTPUT_DIR_ENV, ".")) / f"{args.command}.{args.format}"
    data.parent.mkdir(parents=True, exist_ok=True)
    if args.format == "json":
        return None, data
    return data, data.with_suffix(".json")


def _summary_line(pairs):
    return " ".join(f"{k}={fmt(v) if isinstance(v, float) else v}" for k, v in pairs)


def cmd_coupling(args):
    shape = make_shape(args)
    config = make_config(args, shape)
    profile = coherent_coupling(shape, config)
    csv_path, json_path = output_paths(args)
    if csv_path is not None:
        write_profile_csv(profile, csv_path, magnitude=args.magnitude)
    write_json(profile.summary(), json_path)
    s = profile.summary()
    print(_summary_line([
        ("switch_off_time", s["switch_off_time"]),
        ("min_radicand", s["min_radicand"]),
        ("linewidth_ratio", s["linewidth_ratio"]),
    ]))
    return 0


def cmd_simulate(args):
    shape = make_shape(args)
    tau = args.delay_frac * shape.duration
    errors = ErrorModel(g0=args.g0, tau=tau)
    config = make_config(args, shape, extend=tau)
    oracle = None
    if args.oracle:
        try:
            oracle = AnalyticPopulation.for_shape(shape, config.kappa)(config.times)
        except TypeError as exc:
            raise UsageError(str(exc)) from None
    profile = synthesize_profile(shape, config)
    traj = integrate(shape, config, profile, errors)
    summary = trajectory_summary(traj, n_p=config.n_p)
    summary["switch_off_time"] = profile.switch_off_time
    csv_path, json_path = output_paths(args)
    if csv_path is not None:
        write_trajectory_csv(traj, csv_path, oracle=oracle)
    write_json(summary, json_path)
    print(_summary_line([
        ("efficiency", summary["efficiency"]),
        ("max_alpha_out", summary["max_alpha_out"]),
        ("residual", summary["conservation_residual"]),
        ("mean_photon_number", summary["mean_photon_number"]),
    ]))
    if not summary["plateau_ok"]:
        raise Unconverged(summary["plateau_drift"])
    return 0


def cmd_sweep(args):
    shape = make_shape(args)
    config = make_config(args, shape)
    if args.values is not None:
        values = args.values
    elif args.range is not None:
        values = np.linspace(*args.range).tolist()
    elif args.axis == AMPLITUDE:
        values = np.linspace(0.8, 1.2, 41).tolist()
    else:
        values = np.linspace(-0.2, 0.2, 41).tolist()
    spec = SweepSpec(shape=shape, config=config, axis=args.axis, values=tuple(values), n_p=args.n_p)
    result = run_sweep(spec, jobs=args.jobs)
    summary = summarize(result)
    csv_path, json_path = output_paths(args)
    if csv_path is not None:
        write_sweep_csv(result, csv_path)
    write_json(summary, json_path)
    print(_summary_line([
        ("min_efficiency", summary["min_efficiency"]),
        ("max_efficiency", summary["max_efficiency"]),
        ("worst_value", summary["worst_value"]),
        ("monotone_ok", str(summary["monotone_ok"]).lower()),
    ]))
    return 0


COMMANDS = {"coupling": cmd_coupling, "simulate": cmd_simulate, "sweep": cmd_sweep}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ValueError) as exc:
        sys.stderr.write(dumps({"error": "UsageError", "message": str(exc)}))
        return EXIT_USAGE
    except StorageError as exc:
        rec = exc.record()
        if getattr(exc, "axis_value", None) is not None:
            rec["axis_value"] = exc.axis_value
        sys.stderr.write(dumps(rec))
        return EXIT_PHYSICS


if __name__ == "__main__":
    sys.exit(main())
