"""hodgekt command line: verify suites, generate instances, show reports.

Exit codes: 0 all instances pass, 1 verification failure, 2 usage or I/O error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time

from .config import TOL_ENV_VAR
from .errors import GenerationError, UnsatisfiableSpec
from .suites import DEGENERATE, SUITES, InstanceSpec, RunReport, generate, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _csv_ints(text: str) -> list[int]:
    if text.strip() == "":
        return []
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="hodgekt", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="generate and verify a suite of random instances")
    v.add_argument("suite", choices=SUITES)
    v.add_argument("--n", type=int, required=True)
    v.add_argument("--p", type=int, default=2)
    v.add_argument("--q", type=int, default=2)
    v.add_argument("--d", type=int, default=None)
    v.add_argument("--lambda", dest="lambdas", type=_csv_ints, default=None,
                   help="level sizes, e.g. 1,1 (default: random per instance)")
    v.add_argument("--instances", type=int, default=10)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol", type=float, default=None,
                   help=f"rank/definiteness tolerance (default: ${TOL_ENV_VAR} or 1e-9)")
    v.add_argument("--mode", default=None, help="higher-kt: witness|equality|identity; kt: inequality|equality")
    v.add_argument("--degenerate", choices=DEGENERATE, default="mixed")
    v.add_argument("--eta-rank", type=int, default=None)
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--out", default=None, help="report path (default: print JSON to stdout)")

    g = sub.add_parser("gen", help="generate instances from a spec file")
    g.add_argument("spec")
    g.add_argument("--out", required=True)

    s = sub.add_parser("show", help="print a report as a table")
    s.add_argument("report")
    return ap


def atomic_write(path: str, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".hodgekt-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _default_tol(arg):
    if arg is not None:
        return arg
    raw = os.environ.get(TOL_ENV_VAR)
    return float(raw) if raw else None


def cmd_verify(args) -> int:
    try:
        spec = InstanceSpec(suite=args.suite, n=args.n, p=args.p, q=args.q, d=args.d,
                            lambdas=args.lambdas, degenerate=args.degenerate,
                            eta_rank=args.eta_rank, mode=args.mode, seed=args.seed,
                            instances=args.instances, tol=_default_tol(args.tol))
    except ValueError as err:
        print(f"hodgekt: {err}", file=sys.stderr)
        return EXIT_USAGE
    t0 = time.perf_counter()
    try:
        report = run_suite(spec, jobs=args.jobs)
    except UnsatisfiableSpec as err:
        print(f"hodgekt: unsatisfiable spec: {err}", file=sys.stderr)
        return EXIT_USAGE
    except GenerationError as err:
        print(f"hodgekt: generation failed: {err}", file=sys.stderr)
        return EXIT_FAIL
    text = report.dumps()
    if args.out:
        try:
            atomic_write(args.out, text)
        except OSError as err:
            print(f"hodgekt: cannot write {args.out}: {err}", file=sys.stderr)
            return EXIT_USAGE
    else:
        sys.stdout.write(text)
    print(f"{spec.suite}: {report.passed} pass, {report.failed} fail, {report.degenerate} degenerate "
          f"of {report.instance_count} ({time.perf_counter() - t0:.2f} s)", file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_gen(args) -> int:
    try:
        with open(args.spec) as fh:
            spec = InstanceSpec.from_json(json.load(fh))
    except (OSError, json.JSONDecodeError) as err:
        print(f"hodgekt: cannot read {args.spec}: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (TypeError, ValueError) as err:
        print(f"hodgekt: invalid spec: {err}", file=sys.stderr)
        return EXIT_USAGE
    try:
        instances = [generate(spec, i) for i in range(max(spec.instances, 1))]
    except UnsatisfiableSpec as err:
        print(f"hodgekt: unsatisfiable spec: {err}", file=sys.stderr)
        return EXIT_USAGE
    except GenerationError as err:
        print(f"hodgekt: generation failed: {err}", file=sys.stderr)
        return EXIT_FAIL
    text = json.dumps({"spec": spec.to_json(), "instances": instances}, indent=2, sort_keys=True) + "\n"
    try:
        atomic_write(args.out, text)
    except OSError as err:
        print(f"hodgekt: cannot write {args.out}: {err}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def format_report(data: dict) -> str:
    rep = RunReport.from_json(data)
    lines = [f"suite: {rep.suite}   instances: {rep.instance_count}   "
             f"pass: {rep.passed}   fail: {rep.failed}   degenerate: {rep.degenerate}",
             f"{'index':>5}  {'status':<10}  detail"]
    for inst in rep.instances:
        detail = inst.get("detail", {})
        brief = ", ".join(f"{k}={_short(v)}" for k, v in detail.items()
                          if not isinstance(v, (dict, list)))
        lines.append(f"{inst['index']:>5}  {inst['status']:<10}  {brief}")
    return "\n".join(lines)


def _short(v):
    return f"{v:.4g}" if isinstance(v, float) else v


def cmd_show(args) -> int:
    try:
        with open(args.report) as fh:
            data = json.load(fh)
        print(format_report(data))
    except (OSError, json.JSONDecodeError, KeyError) as err:
        print(f"hodgekt: cannot read report {args.report}: {err}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return {"verify": cmd_verify, "gen": cmd_gen, "show": cmd_show}[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
