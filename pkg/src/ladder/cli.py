"""Command-line entry point: ``ladder scan | verify | verify-range``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .errors import LadderError
from .irregular import scan_irregular
from .verifier import (ERROR, MISMATCH, VerifyOptions, cached_verify, emit_report,
                       scan_verify)


def _add_verify_options(sp):
    sp.add_argument("--cache", type=Path, default=os.environ.get("LADDER_CACHE"),
                    help="cache directory (default: $LADDER_CACHE)")
    sp.add_argument("--hecke-primes", type=int, default=0, metavar="L",
                    help="use every Hecke prime up to at least L on both sides")
    sp.add_argument("--steinberg-only", action="store_true",
                    help="skip the Hecke rows on the cup-product side")
    sp.add_argument("--format", choices=["json", "csv"], default="json")
    sp.add_argument("--no-timings", action="store_true", help="omit timing fields from JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ladder", description=__doc__)
    parser.add_argument("--version", action="version", version=f"ladder {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("scan", help="list irregular pairs (p, k) with p <= pmax")
    sp.add_argument("--pmax", type=int, required=True)
    sp.add_argument("--format", choices=["json", "csv"], default="json")

    sp = sub.add_parser("verify", help="verify a single irregular pair")
    sp.add_argument("-p", type=int, required=True)
    sp.add_argument("-k", type=int, required=True)
    _add_verify_options(sp)

    sp = sub.add_parser("verify-range", help="verify every irregular pair with p <= pmax")
    sp.add_argument("--pmax", type=int, required=True)
    sp.add_argument("--jobs", type=int, default=1)
    _add_verify_options(sp)
    return parser


def _emit_pairs(pairs, fmt: str) -> bytes:
    if fmt == "json":
        return json.dumps([{"p": x.p, "k": x.k} for x in pairs]).encode()
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["p", "k"])
    writer.writerows(x.as_tuple() for x in pairs)
    return buf.getvalue().encode()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    out = sys.stdout.buffer

    if args.command == "scan":
        out.write(_emit_pairs(scan_irregular(args.pmax), args.format) + b"\n")
        return 0

    options = VerifyOptions(min_prime=args.hecke_primes, steinberg_only=args.steinberg_only)
    try:
        if args.command == "verify":
            reports = [cached_verify(args.p, args.k, options, args.cache)]
        else:
            reports = scan_verify(args.pmax, jobs=args.jobs, options=options, cache=args.cache)
    except LadderError as exc:
        print(f"ladder: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    out.write(emit_report(reports, args.format, timings=not args.no_timings) + b"\n")
    out.flush()
    return 1 if any(r.status in (MISMATCH, ERROR) for r in reports) else 0


if __name__ == "__main__":
    sys.exit(main())
