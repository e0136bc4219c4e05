"""Command line: ``crowdcap validate|run|sweep``.

Exit codes: 0 success, 1 scenario or usage error, 2 runtime or I/O error.
"""

from __future__ import annotations

import argparse
import os
import re
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from functools import partial

from .engine import run
from .model import ValidationError
from .reporting import emit_report, emit_reports, trace_bytes
from .scenario import load_scenario

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _seed(text: str) -> int:
    if not re.fullmatch(r"\d+", text):
        raise argparse.ArgumentTypeError(f"seed must be a non-negative integer: {text!r}")
    return int(text)


def _seed_range(text: str) -> tuple[int, int]:
    m = re.fullmatch(r"(\d+)\.\.(\d+)", text)
    if not m:
        raise argparse.ArgumentTypeError(f"seed range must look like LO..HI: {text!r}")
    lo, hi = int(m.group(1)), int(m.group(2))
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty seed range {text!r}")
    return lo, hi


def _positive(text: str) -> int:
    if not re.fullmatch(r"\d+", text) or int(text) < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer: {text!r}")
    return int(text)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="crowdcap", description="Crowd knowledge-generation simulator")
    sub = p.add_subparsers(dest="command", required=True)

    def scenario_args(sp):
        sp.add_argument("scenario_pos", nargs="?", metavar="SCENARIO")
        sp.add_argument("--scenario", dest="scenario_opt", metavar="PATH")

    v = sub.add_parser("validate", help="parse and validate a scenario file")
    scenario_args(v)

    r = sub.add_parser("run", help="run one experiment")
    scenario_args(r)
    r.add_argument("--seed", type=_seed, default=0)
    r.add_argument("--format", choices=("json", "csv"), default="json")
    r.add_argument("--out", metavar="PATH")
    r.add_argument("--trace", metavar="PATH")

    s = sub.add_parser("sweep", help="run one experiment per seed in LO..HI")
    scenario_args(s)
    s.add_argument("--seeds", type=_seed_range, required=True)
    s.add_argument("--format", choices=("json", "csv"), default="csv")
    s.add_argument("--out", metavar="PATH")
    s.add_argument("--parallel", type=_positive, default=1)

    for sp in (v, r, s):
        sp.error = p.error  # route subcommand errors through UsageError
    return p


def _scenario_path(args) -> str:
    if args.scenario_pos and args.scenario_opt and args.scenario_pos != args.scenario_opt:
        raise UsageError("give the scenario either positionally or with --scenario, not both")
    path = args.scenario_opt or args.scenario_pos
    if not path:
        raise UsageError("a scenario path is required")
    return path


def write_atomic(path: str, data: bytes) -> None:
    """Write via a temporary file in the target directory, then rename."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".crowdcap-", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _sweep_one(scenario, seed):
    report, _ = run(scenario, seed)
    return report


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = build_parser().parse_args(argv)
        path = _scenario_path(args)
    except UsageError as e:
        print(f"crowdcap: error: {e}", file=sys.stderr)
        return EXIT_USAGE

    try:
        scenario = load_scenario(path)
    except ValidationError as e:
        for msg in e.errors:
            print(f"{path}: {msg}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"crowdcap: cannot read scenario {path}: {e.strerror or e}", file=sys.stderr)
        return EXIT_USAGE

    if args.command == "validate":
        print("ok")
        return EXIT_OK

    try:
        if args.command == "run":
            report, trace = run(scenario, args.seed, trace=args.trace is not None)
            outputs = [(args.out, emit_report(report, args.format))]
            if args.trace is not None:
                outputs.append((args.trace, trace_bytes(trace)))
        else:
            lo, hi = args.seeds
            seeds = range(lo, hi + 1)
            job = partial(_sweep_one, scenario)
            if args.parallel == 1:
                reports = [job(s) for s in seeds]
            else:
                with ProcessPoolExecutor(max_workers=args.parallel) as pool:
                    reports = list(pool.map(job, seeds, chunksize=max(1, len(seeds) // (4 * args.parallel))))
            outputs = [(args.out, emit_reports(reports, args.format))]
    except Exception as e:  # noqa: BLE001 - any failure mid-run is a runtime error
        print(f"crowdcap: runtime error: {e}", file=sys.stderr)
        return EXIT_RUNTIME

    # every output is fully rendered before any file is touched
    for dest, data in outputs:
        try:
            if dest is None or dest == "-":
                sys.stdout.buffer.write(data)
                sys.stdout.flush()
            else:
                write_atomic(dest, data)
        except OSError as e:
            print(f"crowdcap: cannot write {dest or 'stdout'}: {e.strerror or e}", file=sys.stderr)
            return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
