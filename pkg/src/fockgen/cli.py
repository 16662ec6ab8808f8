"""Command-line front end.

Exit codes: 0 success, 1 infeasible schedule or failed validation, 2 bad
arguments, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from contextlib import contextmanager
from pathlib import Path

from fockgen.config import FORMATS, RunConfig, load_config, parse_quantity, worker_count
from fockgen.errors import FockgenError, InfeasibleTargetError, SlotOverflowError
from fockgen.noise import METHODS, analytic_result, monte_carlo_fidelity, quadrature_fidelity
from fockgen.protocol import compile_schedule, decoherence_budget, run_ideal, write_schedule
from fockgen import validation

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_IO = 3

SWEEP_HEADER = ("gamma", "N", "F_analytic", "F_quadrature", "F_mc", "mc_stderr")
DEFAULT_GAMMAS = tuple(k / 100 for k in range(11))
DEFAULT_NS = tuple(range(1, 11))


class UsageError(Exception):
    pass


def fmt(x: float) -> str:
    """Fixed 12-significant-digit rendering used in every CSV."""
    return format(x, ".12g")


def parse_float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def parse_int_list(text: str) -> list[int]:
    """``"1,2,5"`` or ranges like ``"1-10"``."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat 'key = value' file; flags override it")
    common.add_argument("--n", type=int, help="target photon number N")
    common.add_argument("--gamma", type=float, help="relative spread of the interaction times")
    common.add_argument("--method", choices=METHODS)
    common.add_argument("--trials", type=int, help="Monte Carlo trials")
    common.add_argument("--seed", type=int)
    common.add_argument("--quad-order", type=int, help="Gauss-Hermite order")
    common.add_argument("--out", help="output file (default: standard output)")
    common.add_argument("--format", choices=FORMATS)
    phys = common.add_argument_group("cavity parameters (SI; angular frequencies accept a '*2pi' suffix)")
    phys.add_argument("--omega0", type=parse_quantity, help="vacuum Rabi frequency at the centre, rad/s")
    phys.add_argument("--waist", type=float, help="mode waist, m")
    phys.add_argument("--velocity", type=float, help="atomic speed, m/s")
    phys.add_argument("--t-cav", type=float, help="cavity damping time, s")
    phys.add_argument("--t-switch", type=float, help="Stark switching time, s")
    phys.add_argument("--tau-bar", type=float, help="slot time per atom, s")
    phys.add_argument("--lam", type=parse_quantity, help="constant coupling of the noise model, rad/s")

    parser = argparse.ArgumentParser(
        prog="fockgen",
        description="Compile and simulate resonant Fock-state preparation in a microwave cavity.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("schedule", parents=[common], help="compile the per-atom Stark windows")
    sub.add_parser("run", parents=[common], help="simulate one (gamma, N) setting")
    sweep = sub.add_parser("sweep", parents=[common], help="fidelity over a (gamma, N) grid")
    sweep.add_argument("--gammas", type=parse_float_list, help="comma-separated gamma values")
    sweep.add_argument("--ns", type=parse_int_list, help="comma-separated N values or ranges, e.g. 1-10")
    validate = sub.add_parser("validate", parents=[common], help="run the invariant suite")
    validate.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    base = load_config(args.config) if args.config else RunConfig()
    return base.override(
        n_target=args.n,
        gamma=args.gamma,
        method=args.method,
        trials=args.trials,
        seed=args.seed,
        quad_order=args.quad_order,
        output_path=args.out,
        output_format=args.format,
        omega0=args.omega0,
        waist=args.waist,
        velocity=args.velocity,
        t_cav=args.t_cav,
        t_switch=args.t_switch,
        tau_bar=args.tau_bar,
        lam=args.lam,
    )


@contextmanager
def _output(path: str | None):
    if path is None:
        yield sys.stdout
        return
    buf = io.StringIO()
    yield buf
    Path(path).write_text(buf.getvalue())


def cmd_schedule(config: RunConfig) -> int:
    try:
        schedule = compile_schedule(config.params, config.n_target)
    except (InfeasibleTargetError, SlotOverflowError) as exc:
        print(f"fockgen: infeasible schedule: {exc}", file=sys.stderr)
        return EXIT_FAIL
    with _output(config.output_path) as fh:
        write_schedule(schedule, fh)
    report = decoherence_budget(config.params, schedule)
    print(report.summary())
    return EXIT_OK if report.feasible and report.switch_feasible else EXIT_FAIL


def simulate(config: RunConfig, workers: int = 1):
    if config.method == "analytic":
        return analytic_result(config.gamma, config.n_target)
    if config.method == "quadrature":
        return quadrature_fidelity(config.gamma, config.n_target, config.quad_order, config.coupling)
    return monte_carlo_fidelity(
        config.gamma, config.n_target, config.trials, config.seed, config.coupling, workers=workers
    )


def run_record(config: RunConfig, workers: int = 1) -> dict:
    schedule = compile_schedule(config.params, config.n_target)
    ideal = run_ideal(schedule)
    record = simulate(config, workers).to_dict()
    record["ideal_fidelity"] = ideal.fidelity
    record["total_time"] = schedule.total_time
    return record


def render_record(record: dict, fmt_name: str) -> str:
    if fmt_name == "json":
        return json.dumps(record, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    keys = list(record)
    writer.writerow(keys)
    row = []
    for k in keys:
        v = record[k]
        if isinstance(v, list):
            row.append(";".join(fmt(x) for x in v))
        elif isinstance(v, float):
            row.append(fmt(v))
        else:
            row.append(v)
    writer.writerow(row)
    return buf.getvalue()


def cmd_run(config: RunConfig) -> int:
    try:
        record = run_record(config, worker_count())
    except (InfeasibleTargetError, SlotOverflowError) as exc:
        print(f"fockgen: infeasible schedule: {exc}", file=sys.stderr)
        return EXIT_FAIL
    with _output(config.output_path) as fh:
        fh.write(render_record(record, config.output_format))
    return EXIT_OK


def sweep_rows(config: RunConfig, gammas, ns, workers: int = 1) -> list[dict]:
    """One row per (gamma, N), gamma-major, all three methods.

    Monte Carlo reuses ``config.seed`` in every cell, so the column is
    monotone in both gamma and N like the exact ones.
    """
    rows = []
    for gamma in gammas:
        for n in ns:
            quad = quadrature_fidelity(gamma, n, config.quad_order, config.coupling)
            mc = monte_carlo_fidelity(gamma, n, config.trials, config.seed, config.coupling, workers=workers)
            rows.append(
                {
                    "gamma": gamma,
                    "N": n,
                    "F_analytic": analytic_result(gamma, n).fidelity,
                    "F_quadrature": quad.fidelity,
                    "F_mc": mc.fidelity,
                    "mc_stderr": mc.mc_std_err,
                }
            )
    return rows


def render_sweep(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for r in rows:
        writer.writerow([fmt(r["gamma"]), r["N"]] + [fmt(r[k]) for k in SWEEP_HEADER[2:]])
    return buf.getvalue()


def cmd_sweep(config: RunConfig, gammas=DEFAULT_GAMMAS, ns=DEFAULT_NS) -> int:
    if not gammas or not ns:
        raise UsageError("sweep grids must be nonempty")
    if any(n < 1 for n in ns) or any(g < 0 for g in gammas):
        raise UsageError("sweep needs N >= 1 and gamma >= 0")
    rows = sweep_rows(config, gammas, ns, worker_count())
    with _output(config.output_path) as fh:
        fh.write(render_sweep(rows))
    return EXIT_OK


def cmd_validate(config: RunConfig, inject_fault: bool = False) -> int:
    results = validation.run_all(config.params, config.quad_order, config.seed, inject_fault=inject_fault)
    lines = [r.line() for r in results]
    failed = [r for r in results if not r.passed]
    with _output(config.output_path) as fh:
        fh.write("\n".join(lines) + "\n")
    if failed:
        print(f"fockgen: validation failed, first failing check: {failed[0].name}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        config = config_from_args(args)
        if args.command == "schedule":
            return cmd_schedule(config)
        if args.command == "run":
            return cmd_run(config)
        if args.command == "sweep":
            return cmd_sweep(config, args.gammas or DEFAULT_GAMMAS, args.ns or DEFAULT_NS)
        return cmd_validate(config, inject_fault=args.inject_fault)
    except OSError as exc:
        print(f"fockgen: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except FockgenError as exc:
        print(f"fockgen: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (UsageError, ValueError) as exc:
        print(f"fockgen: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
