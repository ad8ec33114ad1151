"""Command line runner; every subcommand writes CSV."""

import argparse
import contextlib
import sys
from dataclasses import dataclass

from .errors import D2DError, DomainError, ValidationFailure
from .performance import analytic_report
from .pointprocess import NetworkConfig
from .report import report_row, write_rows
from .simulator import simulate
from .validate import run_validate, tolerances

AXES = {
    "s_th": "max_link_distance_m",
    "sigma2": "scatter_variance",
    "lambda_p": "parent_density",
    "beta": "d2d_fraction",
    "N": "devices_per_cluster",
}
MODES = ("analytic", "simulate")


@dataclass(frozen=True)
class SweepSpec:
    base: NetworkConfig
    axis: str
    values: tuple
    modes: tuple = ("analytic",)
    trials: int = 1000
    seed: int = 0
    correlated: bool = False

    def __post_init__(self):
        if self.axis not in AXES:
            raise DomainError(f"axis must be one of {sorted(AXES)}, got {self.axis!r}")
        if not self.values:
            raise DomainError("sweep values must be nonempty")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise DomainError(f"sweep values must be strictly increasing, got {self.values}")
        if not self.modes or any(m not in MODES for m in self.modes):
            raise DomainError(f"modes must be drawn from {MODES}, got {self.modes}")
        if self.trials < 1:
            raise DomainError("trials must be at least 1")

    def configs(self):
        field = AXES[self.axis]
        for v in self.values:
            if field == "devices_per_cluster":
                if v != int(v):
                    raise DomainError(f"N must be an integer, got {v}")
                v = int(v)
            yield self.base.with_(**{field: v})


def run_analytic(config, correlated=False, seed=0):
    return report_row(config, analytic_report(config, correlated=correlated, seed=seed), "analytic")


def run_simulate(config, trials, seed):
    return report_row(config, simulate(config, trials, seed).report, "simulated")


def run_sweep(spec):
    rows = []
    for config in spec.configs():
        for mode in spec.modes:
            if mode == "analytic":
                rows.append(run_analytic(config, spec.correlated, spec.seed))
            else:
                rows.append(run_simulate(config, spec.trials, spec.seed))
    return rows


def _values(text):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise DomainError(f"cannot parse --values {text!r}") from exc


def build_parser():
    parser = argparse.ArgumentParser(
        prog="d2dmotif",
        description="Motif statistics and throughput of clustered D2D content sharing.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, trials):
        p.add_argument("--config", metavar="PATH", help="key = value file; missing keys use defaults")
        p.add_argument("--out", metavar="PATH", help="output file (default stdout)")
        p.add_argument("--seed", type=int, default=0, help="master seed")
        p.add_argument("--trials", type=int, default=trials, help="Monte Carlo trials")
        p.add_argument("--correlated-outage", action="store_true",
                       help="also evaluate the chain outage with shared interferers")

    common(sub.add_parser("analytic", help="one analytic CSV row"), 1000)
    common(sub.add_parser("simulate", help="one simulated CSV row"), 1000)
    sweep = sub.add_parser("sweep", help="one row per axis value and mode")
    common(sweep, 1000)
    sweep.add_argument("--axis", required=True, choices=sorted(AXES))
    sweep.add_argument("--values", required=True, metavar="CSVLIST")
    sweep.add_argument("--modes", default="analytic", help="comma list of analytic, simulate")
    val = sub.add_parser("validate", help="run the acceptance matrix")
    common(val, 10_000)
    val.add_argument("--quick", action="store_true", help="motif probability checks only")
    val.add_argument("--tolerance-scale", type=float, default=1.0,
                     help="multiply every tolerance band")
    return parser


def _load_config(path):
    return NetworkConfig.from_file(path) if path else NetworkConfig()


def _report_parameters(config):
    return (f"s_th={config.max_link_distance_m:g} sigma2={config.scatter_variance:g} "
            f"lambda_p={config.parent_density:g} N={config.devices_per_cluster} "
            f"beta={config.d2d_fraction:g}")


@contextlib.contextmanager
def _output(path):
    if path:
        with open(path, "w", newline="") as fh:
            yield fh
    else:
        yield sys.stdout


def _dispatch(args):
    config = _load_config(args.config)
    if args.command == "validate":
        checks = run_validate(config, args.trials, args.seed,
                              tolerances(args.tolerance_scale), quick=args.quick,
                              log=lambda line: print(line, flush=True))
        failed = [c for c in checks if not c.passed]
        with _output(args.out) as fh:
            if args.out:
                fh.write("\n".join(c.line() for c in checks) + "\n")
        if failed:
            raise ValidationFailure(f"{len(failed)} of {len(checks)} checks failed")
        return
    if args.command == "analytic":
        rows = [run_analytic(config, args.correlated_outage, args.seed)]
    elif args.command == "simulate":
        rows = [run_simulate(config, args.trials, args.seed)]
    else:
        modes = tuple(m.strip() for m in args.modes.split(",") if m.strip())
        spec = SweepSpec(config, args.axis, _values(args.values), modes, args.trials, args.seed,
                         args.correlated_outage)
        rows = run_sweep(spec)
    with _output(args.out) as fh:
        write_rows(rows, fh)


def main(argv=None):
    """Entry point; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        _dispatch(args)
    except D2DError as exc:
        params = ""
        if args.config is not None or args.command != "validate":
            with contextlib.suppress(D2DError, OSError):
                params = " [" + _report_parameters(_load_config(args.config)) + "]"
        print(f"error ({type(exc).__name__}): {exc}{params}", file=sys.stderr)
        return exc.exit_code
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
