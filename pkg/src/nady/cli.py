"""Command-line entry point: ``nady simulate | spectrum | compare``."""

import argparse
import json
import sys

from . import quantum
from .errors import ConfigError, NadyError
from .integrate import Termination
from .scenarios import (
    BUILTIN_NAMES,
    SPECTRUM_COLUMNS,
    CSV_FORMAT,
    ScenarioConfig,
    apply_override,
    builtin_config,
    compare_trajectories,
    output_dir,
    read_trajectory_csv,
    run_scenario,
    write_csv,
)


def _vector(text):
    parts = [float(x) for x in text.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated numbers, got {text!r}")
    return parts


def build_parser():
    parser = argparse.ArgumentParser(prog="nady", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a scenario and write its CSV output")
    src = sim.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="path to a JSON scenario file")
    src.add_argument("--scenario", choices=BUILTIN_NAMES, help="name of a built-in scenario")
    sim.add_argument("--out", help="output directory (default: $NADY_OUT_DIR or .)")
    sim.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                     help="set a config entry, e.g. integrator.rel_tol=1e-8; repeatable")
    sim.add_argument("--dump", action="store_true", help="print the resolved config and exit")

    spec = sub.add_parser("spectrum", help="diagonalise the moving-hydrogen Hamiltonian")
    spec.add_argument("--nmax", type=int, required=True)
    spec.add_argument("--B", type=float, required=True, help="field strength along z")
    spec.add_argument("--pR", type=_vector, default=[0.0, 0.0, 0.0], help="CM momentum vx,vy,vz")
    spec.add_argument("--diamagnetic", action="store_true")
    spec.add_argument("--out", help="write the table here instead of stdout")

    cmp_ = sub.add_parser("compare", help="comparison metrics for two trajectory CSVs")
    cmp_.add_argument("--a", required=True)
    cmp_.add_argument("--b", required=True)
    return parser


def _simulate(args):
    if args.config:
        with open(args.config) as fh:
            d = json.load(fh)
    else:
        d = builtin_config(args.scenario, as_dict=True)
    for o in args.override:
        apply_override(d, o)
    cfg = ScenarioConfig.from_dict(d)
    if args.dump:
        print(json.dumps(cfg.to_dict(), indent=2))
        return 0
    result = run_scenario(cfg, out_dir=args.out)
    for f in result.files:
        print(f)
    for s, m in result.metrics:
        print(f"scale {s:g}: max_cm_deviation {m.max_cm_deviation:.6e} final_cm_deviation {m.final_cm_deviation:.6e}")
    status = result.termination
    print(f"termination: {status.value}")
    if result.trajectory is not None and result.trajectory.message:
        print(result.trajectory.message, file=sys.stderr)
    return 0 if status is Termination.COMPLETED else 1


def _spectrum(args):
    problem = quantum.assemble_hamiltonian(args.nmax, (0.0, 0.0, args.B), args.pR, args.diamagnetic)
    rows = quantum.spectrum_table(problem)
    fmt = ["%d", CSV_FORMAT, "%d", "%d", "%d", CSV_FORMAT]
    if args.out:
        print(write_csv(output_dir(args.out) / "spectrum.csv", SPECTRUM_COLUMNS, rows, fmt=fmt))
    else:
        print(",".join(SPECTRUM_COLUMNS))
        for row in rows:
            print(",".join(f % v for f, v in zip(fmt, row)))
    return 0


def _compare(args):
    m = compare_trajectories(read_trajectory_csv(args.a), read_trajectory_csv(args.b))
    for k, v in m.__dict__.items():
        print(f"{k},{v:.17g}")
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return {"simulate": _simulate, "spectrum": _spectrum, "compare": _compare}[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NadyError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
