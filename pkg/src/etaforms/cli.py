"""Command-line front end: expansions, verification suites, congruence scans.

Exit codes form a contract for CI consumption:

* 0 - success / all checks passed
* 1 - a verification check failed
* 2 - usage or argument validation error
* 3 - data-integrity alarm (fractional valuation, non-integral coefficient,
      falsified fixture sign)
* 4 - insufficient precision (the minimum that would suffice is printed
      when known)

The basis cache directory is resolved from --cache-dir, then the
ETAFORMS_CACHE_DIR environment variable, then the local default
``.etaforms_cache``; pass --no-cache-dir to keep everything in memory.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .basis import BasisCache
from .errors import (
    EtaformsError,
    FractionalValuation,
    IndexBelowRange,
    InsufficientPrecision,
    IntegralityViolation,
    MixedWeight,
    NoConsistentSign,
    PrecisionExceeded,
    UnsupportedLevel,
    UnsupportedPair,
)
from .leveldata import SUPPORTED_LEVELS, validate_level
from .verify import (
    admissible_residues,
    al_identity_check,
    congruence_scan,
    duality_check,
    genfun_check,
    rows_to_csv,
    theta_check,
    up_lemma_check,
)

FIXTURE_VERSION = 2

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_INTEGRITY = 3
EXIT_PRECISION = 4

_USAGE_ERRORS = (UnsupportedLevel, UnsupportedPair, IndexBelowRange, ValueError)
_INTEGRITY_ERRORS = (IntegralityViolation, FractionalValuation, MixedWeight, NoConsistentSign)
_PRECISION_ERRORS = (InsufficientPrecision, PrecisionExceeded)


def _document(command: str, params: dict, payload: dict, summary: dict) -> dict:
    return {
        "tool_version": __version__,
        "fixture_version": FIXTURE_VERSION,
        "command": command,
        "params": params,
        **payload,
        "summary": summary,
    }


def _emit(doc: dict, text: str, args) -> None:
    if args.format == "json":
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print(text)
    if getattr(args, "report", None):
        _write_report(args.report, doc)


def _write_report(path: str, doc: dict, csv_text: str | None = None) -> None:
    if path.endswith(".csv") and csv_text is not None:
        content = csv_text
    elif path.endswith(".csv"):
        raise ValueError("CSV reports are only available for scan rows")
    else:
        content = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    with open(path, "w") as fh:
        fh.write(content)


def _resolve_cache(args) -> BasisCache:
    if getattr(args, "no_cache_dir", False):
        return BasisCache()
    directory = getattr(args, "cache_dir", None) or os.environ.get("ETAFORMS_CACHE_DIR") \
        or ".etaforms_cache"
    return BasisCache(directory=directory)


def _persist(cache: BasisCache) -> None:
    if cache.directory:
        cache.save()


def _parse_int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


# ----------------------------------------------------------------------
# subcommands

def cmd_expand(args) -> int:
    if args.prec is not None and args.prec < 16:
        print("error: --prec must be at least 16", file=sys.stderr)
        return EXIT_USAGE
    if args.terms < 1:
        print("error: --terms must be positive", file=sys.stderr)
        return EXIT_USAGE
    cache = _resolve_cache(args)
    space = "S" if args.space == "S" else "M"
    prec = args.prec if args.prec is not None else max(16, args.m + 2 * args.terms + 16)
    for _ in range(6):
        elem = cache.element(args.level, args.weight, space, args.m, prec=prec)
        series = elem.expansion.truncated(prec)
        shown = sum(1 for _ in series.terms())
        if shown >= args.terms or args.prec is not None:
            break
        prec *= 2
    for e, _ in series.terms():
        elem.integer_coeff(e)
    text = series.pretty(max_terms=args.terms)
    doc = _document(
        "expand",
        {"level": args.level, "weight": args.weight, "space": space,
         "m": args.m, "terms": args.terms, "prec": prec},
        {"coeffs": series.to_json()},
        {"pass": True, "failures": 0, "precision": prec},
    )
    _emit(doc, text, args)
    _persist(cache)
    return EXIT_PASS


def cmd_validate(args) -> int:
    report = validate_level(args.level, args.prec or 64)
    doc = _document(
        "validate", {"level": args.level, "prec": args.prec or 64},
        {"checks": report.to_json()["checks"]},
        {"pass": report.ok, "failures": sum(not c.passed for c in report.checks),
         "precision": report.prec},
    )
    _emit(doc, report.render_text(), args)
    return EXIT_PASS if report.ok else EXIT_INTEGRITY


def cmd_verify(args) -> int:
    cache = _resolve_cache(args)
    if args.check == "duality":
        report = duality_check(args.level, args.weight, args.window,
                               args.nwindow or args.window * 2, cache=cache)
    elif args.check == "genfun":
        report = genfun_check(args.level, args.weight, args.mmax, args.zprec, cache=cache)
    elif args.check == "theta":
        report = theta_check(args.level, args.mmax, cache=cache)
    elif args.check == "uplemma":
        report = up_lemma_check(args.level, args.mmax, args.zero_window, cache=cache)
    elif args.check == "al":
        r_set = _parse_int_list(args.rset) if args.rset else [1, 5, 7]
        report = al_identity_check(args.level, args.p, r_set, args.amax, cache=cache)
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(f"unknown check {args.check}")
    doc = _document(
        f"verify {args.check}", report.params,
        {"report": report.to_json()},
        {"pass": report.passed, "failures": len(report.counterexamples),
         "precision": report.precision},
    )
    _emit(doc, report.render_text(), args)
    _persist(cache)
    return EXIT_PASS if report.passed else EXIT_FAIL


def cmd_scan(args) -> int:
    cache = _resolve_cache(args)
    r_set = _parse_int_list(args.rset) if args.rset else admissible_residues(args.p)
    s_set = _parse_int_list(args.sset) if args.sset else admissible_residues(args.p)
    rows, report = congruence_scan(args.level, args.p, args.amax, args.bmax,
                                   r_set=r_set, s_set=s_set, n_cap=args.ncap, cache=cache)
    if args.require_weak:
        if (args.level, args.p) not in ((18, 2), (12, 3)):
            print(f"error: no weak congruence case for level {args.level}, p = {args.p}",
                  file=sys.stderr)
            return EXIT_USAGE
        side = 3 if args.level == 18 else 2
        rows = [row for row in rows if row.r % side]
        report.details["rows_after_weak_filter"] = len(rows)
    csv_text = rows_to_csv(rows)
    doc = _document(
        "scan", report.params,
        {"rows": [r.to_json() for r in rows]},
        {"pass": report.passed, "failures": report.details["failures"],
         "precision": report.precision},
    )
    if args.format == "csv":
        print(csv_text, end="")
    elif args.format == "json":
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print(report.render_text())
    if args.report:
        _write_report(args.report, doc, csv_text=csv_text)
    _persist(cache)
    return EXIT_PASS if report.passed else EXIT_FAIL


def cmd_cache(args) -> int:
    cache = _resolve_cache(args)
    directory = cache.directory
    if args.action == "info":
        if not directory or not os.path.isdir(directory):
            print(f"cache directory: {directory or '(memory only)'} (absent)")
            return EXIT_PASS
        files = sorted(f for f in os.listdir(directory) if f.endswith(".json"))
        total = sum(os.path.getsize(os.path.join(directory, f)) for f in files)
        print(f"cache directory: {directory}")
        print(f"families: {len(files)}, total {total} bytes")
        for f in files:
            print(f"  {f}")
    elif args.action == "clear":
        if directory and os.path.isdir(directory):
            removed = 0
            for f in os.listdir(directory):
                if f.startswith("basis_") and f.endswith(".json"):
                    os.remove(os.path.join(directory, f))
                    removed += 1
            print(f"removed {removed} cache files from {directory}")
        else:
            print("nothing to clear")
    return EXIT_PASS


# ----------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="etaforms",
        description="Exact canonical bases of weakly holomorphic modular forms "
                    "for levels 6, 10, 12, 18: expansions, identity verification, "
                    "congruence scans.",
        epilog="Cache directory resolution: --cache-dir, then ETAFORMS_CACHE_DIR, "
               "then ./.etaforms_cache (use --no-cache-dir for memory only).",
    )
    parser.add_argument("--version", action="version", version=f"etaforms {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cache-dir", help="basis cache directory")
    common.add_argument("--no-cache-dir", action="store_true", help="disable cache persistence")
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--report", help="write a JSON (or CSV for scan) report file")

    sub = parser.add_subparsers(dest="command", required=True)

    p_expand = sub.add_parser("expand", parents=[common],
                              help="print the q-expansion of a basis element")
    p_expand.add_argument("--level", type=int, required=True, choices=SUPPORTED_LEVELS)
    p_expand.add_argument("--weight", type=int, required=True)
    p_expand.add_argument("--space", choices=("M", "S"), default="M")
    p_expand.add_argument("--m", type=int, required=True, help="pole order at infinity")
    p_expand.add_argument("--terms", type=int, default=8, help="nonzero terms to print")
    p_expand.add_argument("--prec", type=int, help="fixed working precision (>= 16)")
    p_expand.set_defaults(fn=cmd_expand)

    p_validate = sub.add_parser("validate", parents=[common],
                                help="run the structural checks on one level's constants")
    p_validate.add_argument("--level", type=int, required=True, choices=SUPPORTED_LEVELS)
    p_validate.add_argument("--prec", type=int)
    p_validate.set_defaults(fn=cmd_validate)

    p_verify = sub.add_parser("verify", parents=[common], help="run an identity check")
    p_verify.add_argument("check", choices=("duality", "genfun", "theta", "uplemma", "al"))
    p_verify.add_argument("--level", type=int, required=True, choices=SUPPORTED_LEVELS)
    p_verify.add_argument("--weight", type=int, default=0)
    p_verify.add_argument("--window", type=int, default=15, help="duality: max pole order")
    p_verify.add_argument("--nwindow", type=int, help="duality: max dual index")
    p_verify.add_argument("--mmax", type=int, default=10)
    p_verify.add_argument("--zprec", type=int, default=32)
    p_verify.add_argument("--zero-window", type=int, default=40)
    p_verify.add_argument("--p", type=int, default=2)
    p_verify.add_argument("--rset", help="comma-separated residues for the al check")
    p_verify.add_argument("--amax", type=int, default=2)
    p_verify.set_defaults(fn=cmd_verify)

    p_scan = sub.add_parser("scan", parents=[common], help="congruence valuation scan")
    p_scan.add_argument("--level", type=int, required=True, choices=SUPPORTED_LEVELS)
    p_scan.add_argument("--p", type=int, required=True)
    p_scan.add_argument("--amax", type=int, default=4)
    p_scan.add_argument("--bmax", type=int, default=4)
    p_scan.add_argument("--rset", help="comma-separated residues (default: first three admissible)")
    p_scan.add_argument("--sset", help="comma-separated residues (default: first three admissible)")
    p_scan.add_argument("--ncap", type=int, default=400, help="cap on both coefficient indices")
    p_scan.add_argument("--require-weak", action="store_true",
                        help="restrict to rows where only the weak bounds apply "
                             "(levels 18/p=2 and 12/p=3)")
    p_scan.set_defaults(fn=cmd_scan)

    p_cache = sub.add_parser("cache", parents=[common], help="inspect or clear the basis cache")
    p_cache.add_argument("action", choices=("info", "clear"))
    p_cache.set_defaults(fn=cmd_cache)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        # argparse uses exit 2 for usage errors and 0 for --help/--version
        return 0 if err.code in (0, None) else EXIT_USAGE
    try:
        return args.fn(args)
    except _INTEGRITY_ERRORS as err:
        print(f"data integrity error: {err}", file=sys.stderr)
        return EXIT_INTEGRITY
    except _PRECISION_ERRORS as err:
        needed = getattr(err, "needed", None)
        hint = f" (needs precision >= {needed})" if needed else ""
        print(f"insufficient precision: {err}{hint}", file=sys.stderr)
        return EXIT_PRECISION
    except _USAGE_ERRORS as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except EtaformsError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
