"""Command line front end: run, converge, dump-matrices."""

import argparse
import os
import sys

from .config import ConfigError, load_config

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NONCONTRACTION = 3
EXIT_IO = 4


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="hartreefem",
        description="Conservative Crank-Nicolson Galerkin solver for the "
                    "nonlocal Hartree equation on a square domain.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="evolve one configured problem")
    p_run.add_argument("config", help="path to the config file")

    p_conv = sub.add_parser("converge", help="refinement sweep with observed orders")
    p_conv.add_argument("config", help="path to the base config file")
    p_conv.add_argument("--levels", "-L", type=int, default=3,
                        help="number of refinement levels (default 3)")
    p_conv.add_argument("--mode", "-M", default="refine-both",
                        choices=("refine-both", "refine-tau-only", "refine-h-only"))

    p_dump = sub.add_parser("dump-matrices",
                            help="write the assembled operators in coordinate text form")
    p_dump.add_argument("config", help="path to the config file")
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        spec = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO

    from .harness import converge, resolve_output_dir, run
    from .steppers import NonContractionError

    try:
        if args.command == "run":
            result = run(spec)
            print(f"wrote {result.output_dir}/diagnostics.csv "
                  f"(mass drift {result.mass_drift:.3e}, "
                  f"energy drift {result.energy_drift:.3e})")
        elif args.command == "converge":
            report = converge(spec, args.levels, args.mode)
            outdir = resolve_output_dir(spec.output_dir)
            os.makedirs(outdir, exist_ok=True)
            path = os.path.join(outdir, "convergence.csv")
            report.write_csv(path)
            for row in report.rows:
                order = "n/a" if row.order is None else f"{row.order:.3f}"
                print(f"h={row.h:.6g} tau={row.tau:.6g} "
                      f"error={row.error:.6e} order={order}")
            print(f"wrote {path}")
        elif args.command == "dump-matrices":
            from .assembly import dump_operator
            from .steppers import Operators
            ops = Operators(spec.mesh, spec.potential, spec.kernel, spec.coupling)
            outdir = resolve_output_dir(spec.output_dir)
            os.makedirs(outdir, exist_ok=True)
            for name, op in (("mass", ops.A), ("stiffness", ops.B),
                             ("potential", ops.Y)):
                dump_operator(os.path.join(outdir, f"{name}.txt"), op)
            print(f"wrote operator dumps to {outdir}")
    except NonContractionError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_NONCONTRACTION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
