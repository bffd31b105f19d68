"""Command-line driver.

Exit codes: 0 success, 1 a verification failed, 2 I/O failure, 64 usage.

Options may also come from ``--config FILE`` holding ``key = value`` lines
(keys are the long option names, dashes or underscores); flags win.
"""
from __future__ import annotations

import argparse
from decimal import Decimal, InvalidOperation
import io
import logging
import os
import sys
import time

from . import VerificationError, __version__
from .experiments import (
    CARDINALITY_HEADER,
    CURVE_HEADER,
    FIBER_HEADER,
    cardinality_curve,
    discrepancy_curve,
    fiber_report,
    write_csv,
)
from .lemmas import all_suites
from .numtheory import primes_upto
from .progressions import max_relative_deviation, sw_equidistribution_report
from .residues import verify_prop1
from .sequence import UNCLASSIFIED, check_pq_estimate, enumerate_table

EXIT_OK, EXIT_FAIL, EXIT_IO, EXIT_USAGE = 0, 1, 2, 64
CACHE_ENV = "FRACPARTS_CACHE_DIR"

log = logging.getLogger("fracparts")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_bound(text):
    """Positive integer, accepting scientific notation such as ``1e7``."""
    try:
        d = Decimal(str(text).strip())
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if d != d.to_integral_value() or d < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return int(d)


def parse_bound_list(text):
    return [parse_bound(t) for t in str(text).split(",") if t.strip()]


def parse_int_list(text):
    try:
        return [int(t) for t in str(text).split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


# option -> (converter, default)
OPTIONS = {
    "base": (int, 2),
    "limit": (parse_bound, None),
    "limits": (parse_bound_list, [10**4, 10**5, 10**6, 10**7]),
    "q": (parse_int_list, [3, 5, 7]),
    "qmax": (int, 300),
    "modulus": (int, None),
    "seed": (int, 42),
    "cases": (int, 1000),
    "workers": (int, 1),
    "output": (str, None),
    "cache_dir": (str, None),
}


def read_config(path):
    conf = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in OPTIONS:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            conf[key] = value
    return conf


def build_parser():
    parser = _Parser(prog="fracparts", description="Fractional parts b^n mod n / n over n = pq, p > b^q.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--config", help="key=value file supplying option defaults")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def opt(p, *names, **kw):
        for name in names:
            flag = "--" + name.replace("_", "-")
            conv = OPTIONS[name][0]
            p.add_argument(flag, dest=name, type=conv, default=None, **kw)

    p = sub.add_parser("generate", help="write n,p,q,k,numerator rows for A_N")
    opt(p, "base", "limit", "workers", "output", "cache_dir")

    p = sub.add_parser("verify", help="exhaustive and randomized checks")
    p.add_argument("target", choices=["prop1", "pqbound", "lemmas"])
    opt(p, "base", "qmax", "limit", "seed", "cases", "output")

    p = sub.add_parser("curve", help="discrepancy of S_b(A_N) for several N")
    opt(p, "base", "limits", "workers", "output", "cache_dir")

    p = sub.add_parser("fibers", help="per-fiber discrepancy and its lattice idealisation")
    opt(p, "base", "limit", "q", "output", "cache_dir")

    p = sub.add_parser("cardinality", help="|A_N| against N logloglog N / log N")
    opt(p, "base", "limits", "output")

    p = sub.add_parser("progressions", help="prime counts in the unit classes mod m")
    opt(p, "modulus", "limit", "output")
    return parser


def resolve(args, parser):
    """Fill unset options from the config file, the environment, then defaults."""
    conf = {}
    if args.config:
        try:
            conf = read_config(args.config)
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None
    for name, (conv, default) in OPTIONS.items():
        if not hasattr(args, name) or getattr(args, name) is not None:
            continue
        if name in conf:
            try:
                value = conv(conf[name])
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise UsageError(f"config value for {name}: {exc}") from None
        elif name == "cache_dir":
            value = os.environ.get(CACHE_ENV)
        else:
            value = default
        setattr(args, name, value)

    if getattr(args, "base", 2) < 2:
        raise UsageError("--base must be >= 2")
    if getattr(args, "workers", 1) < 1:
        raise UsageError("--workers must be >= 1")
    if getattr(args, "cases", 1) < 1:
        raise UsageError("--cases must be >= 1")
    limits = getattr(args, "limits", None)
    if limits is not None and (not limits or limits != sorted(set(limits))):
        raise UsageError("--limits must be a nonempty strictly ascending list")
    needs_limit = args.command in ("generate", "fibers", "progressions") or (
        args.command == "verify" and args.target == "pqbound"
    )
    if needs_limit and args.limit is None:
        raise UsageError("--limit is required")
    if args.command == "progressions" and (args.modulus is None or args.modulus < 2):
        raise UsageError("--modulus >= 2 is required")
    return args


def emit(args, text):
    if args.output is None:
        sys.stdout.write(text)
        return
    with open(args.output, "w") as fh:
        fh.write(text)


def cmd_generate(args):
    table = enumerate_table(args.base, args.limit, workers=args.workers, cache_dir=args.cache_dir)
    buf = io.StringIO()
    buf.write("n,p,q,k,numerator\n")
    for n, p, q, k, num in zip(
        table.n.tolist(), table.p.tolist(), table.q.tolist(), table.k.tolist(), table.numerator.tolist()
    ):
        buf.write(f"{n},{p},{q},{'' if k == UNCLASSIFIED else k},{num}\n")
    emit(args, buf.getvalue())
    return EXIT_OK


def _verify_prop1(args):
    odd_primes = [q for q in primes_upto(args.qmax).tolist() if q > 2 and args.base % q]
    print("b q m_b phi(q-1) |Z_0| |Z_k| pass")
    rows, failed = [], []
    for q in odd_primes:
        rep = verify_prop1(args.base, q)
        print(rep.line())
        rows.append(rep)
        if not rep.passed:
            failed.append(rep)
    if args.output:
        buf = io.StringIO()
        buf.write("b,q,m_b,phi_q_minus_1,z0,zk_expected,z0_expected,total,phi_modulus,pass\n")
        for r in rows:
            buf.write(
                f"{r.b},{r.q},{r.m_b_q},{r.phi_q_minus_1},{r.sizes[0]},{r.expected_zk},"
                f"{r.expected_z0},{r.total},{r.phi_modulus},{int(r.passed)}\n"
            )
        emit(args, buf.getvalue())
    for r in failed:
        print(f"counterexample: b={r.b} q={r.q} sizes={r.sizes}", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


def _verify_pqbound(args):
    table = enumerate_table(args.base, args.limit)
    stats = {}
    failures = []
    for p, q, k in zip(table.p.tolist(), table.q.tolist(), table.k.tolist()):
        if k == UNCLASSIFIED:
            continue
        est = check_pq_estimate(args.base, p, q)
        count, worst = stats.get(q, (0, 0))
        stats[q] = (count + 1, max(worst, est.deviation * q))
        if not est.holds or est.k != k:
            failures.append(est)
    print("q pairs max(q*deviation) pass")
    for q, (count, worst) in sorted(stats.items()):
        print(f"{q} {count} {float(worst):.17g} {'pass' if worst < 1 else 'FAIL'}")
    if args.output:
        buf = io.StringIO()
        buf.write("b,N,q,pairs,max_scaled_deviation,pass\n")
        for q, (count, worst) in sorted(stats.items()):
            buf.write(f"{args.base},{args.limit},{q},{count},{float(worst):.17g},{int(worst < 1)}\n")
        emit(args, buf.getvalue())
    for est in failures[:10]:
        print(f"counterexample: p={est.p} q={est.q} value={est.value} k={est.k}", file=sys.stderr)
    return EXIT_FAIL if failures else EXIT_OK


def _verify_lemmas(args):
    suites = all_suites(args.seed, args.cases)
    for s in suites:
        print(s.line())
        for ex in s.examples:
            print(f"  counterexample: {ex}", file=sys.stderr)
    if args.output:
        buf = io.StringIO()
        buf.write("suite,seed,cases,failures,worst_margin\n")
        for s in suites:
            buf.write(f"{s.name},{args.seed},{s.cases},{s.n_failed},{s.worst_margin:.17g}\n")
        emit(args, buf.getvalue())
    return EXIT_OK if all(s.passed for s in suites) else EXIT_FAIL


def cmd_verify(args):
    return {"prop1": _verify_prop1, "pqbound": _verify_pqbound, "lemmas": _verify_lemmas}[args.target](args)


def _csv(records, header):
    buf = io.StringIO()
    write_csv(records, buf, header)
    return buf.getvalue()


def cmd_curve(args):
    records = discrepancy_curve(args.base, args.limits, workers=args.workers, cache_dir=args.cache_dir)
    emit(args, _csv(records, CURVE_HEADER))
    return EXIT_OK


def cmd_fibers(args):
    reports = [fiber_report(args.base, q, args.limit, cache_dir=args.cache_dir) for q in args.q]
    emit(args, _csv(reports, FIBER_HEADER))
    return EXIT_OK


def cmd_cardinality(args):
    emit(args, _csv(cardinality_curve(args.base, args.limits), CARDINALITY_HEADER))
    return EXIT_OK


def cmd_progressions(args):
    rows = sw_equidistribution_report(args.modulus, args.limit)
    buf = io.StringIO()
    buf.write("m,r,N,count,expected,deviation\n")
    for r in rows:
        buf.write(f"{r.modulus},{r.residue},{r.N},{r.count},{r.expected:.17g},{r.deviation:.17g}\n")
    emit(args, buf.getvalue())
    log.info("max relative deviation %.6g", max_relative_deviation(rows))
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "verify": cmd_verify,
    "curve": cmd_curve,
    "fibers": cmd_fibers,
    "cardinality": cmd_cardinality,
    "progressions": cmd_progressions,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        args = resolve(args, parser)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"fracparts: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    start = time.perf_counter()
    try:
        code = COMMANDS[args.command](args)
    except VerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        print(f"fracparts: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"fracparts: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    log.info("%s finished in %.2fs", args.command, time.perf_counter() - start)
    return code


if __name__ == "__main__":
    sys.exit(main())
