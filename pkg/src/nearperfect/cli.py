"""Command-line interface: classify, scan, families, verify.

Exit codes: 0 success, 1 verification mismatch or worker failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
import time
from typing import Any, Iterable, Sequence

from . import families as fam
from .arith import check_nat64
from .classify import ClassificationReport, classify
from .errors import BudgetExceeded, DomainError, NearPerfectError
from .primality import DEFAULT_ROUNDS
from .sieve import DEFAULT_BLOCK_SIZE, RangeSpec, parse_kind, scan_classified

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2
CLASSIFY_LIMIT = 1 << 63
REPORT_COLUMNS = ("n", "sigma", "abundance", "labels", "witnesses")


class UsageError(Exception):
    pass


def _int_arg(text: str) -> int:
    try:
        return int(text, 10)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a decimal integer: {text!r}") from None


def _cell(value: Any) -> Any:
    if value is None:
        return ""
    if isinstance(value, (list, tuple)):
        return ";".join(str(v) for v in value)
    if isinstance(value, dict):
        return json.dumps(value, sort_keys=True)
    return value


def _report_row(report: ClassificationReport) -> list[Any]:
    sets = []
    for w in report.witnesses:
        members = w.omitted if hasattr(w, "omitted") else w.pair
        text = ";".join(str(d) for d in sorted(members))
        if text not in sets:
            sets.append(text)
    return [report.n, report.sigma, report.abundance, ";".join(report.labels), "|".join(sets)]


def _write_csv(out, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
        out.flush()


def _write_table(out, header: Sequence[str], rows: Iterable[Sequence[Any]], width: int = 14) -> None:
    print("  ".join(f"{h:>{width}}" for h in header), file=out)
    for row in rows:
        print("  ".join(f"{str(_cell(v)):>{width}}" for v in row), file=out)
        out.flush()


def _emit_rows(fmt: str, header: Sequence[str], rows: Iterable[Sequence[Any]], out) -> None:
    if fmt == "csv":
        _write_csv(out, header, rows)
    else:
        _write_table(out, header, rows)


def _document(command: str, params: dict, hits: list, mismatches: list, elapsed_ms: float,
              seed: int | None = None, checks: dict | None = None) -> dict:
    doc = {
        "command": command,
        "params": params,
        "hits": hits,
        "mismatches": mismatches,
        "elapsed_ms": round(elapsed_ms, 3),
    }
    if checks:
        doc["checks"] = checks
    if seed is not None:
        doc["seed"] = seed
    return doc


def _dump_json(doc: dict, out) -> None:
    json.dump(doc, out, indent=2)
    out.write("\n")


def cmd_classify(args, out) -> int:
    n = args.n
    check_nat64(n)
    if n >= CLASSIFY_LIMIT:
        raise DomainError(f"n must be < 2^63, got {n}")
    start = time.perf_counter()
    report = classify(n)
    if args.format == "json":
        _dump_json(_document("classify", {"n": n}, [report.to_dict()], [],
                             (time.perf_counter() - start) * 1000), out)
    else:
        _emit_rows(args.format, REPORT_COLUMNS, [_report_row(report)], out)
    return EXIT_OK


def cmd_scan(args, out) -> int:
    kind = parse_kind(args.kind)
    spec = RangeSpec(args.lo, args.hi, args.block_size)
    if args.jobs < 1:
        raise DomainError("--jobs must be >= 1")
    start = time.perf_counter()
    hits = scan_classified(spec, kind, jobs=args.jobs)
    if args.format == "json":
        docs = [report.to_dict() for _, report in hits]
        params = {"from": args.lo, "to": args.hi, "kind": kind.value}
        _dump_json(_document("scan", params, docs, [], (time.perf_counter() - start) * 1000), out)
    else:
        _emit_rows(args.format, REPORT_COLUMNS, (_report_row(r) for _, r in hits), out)
    return EXIT_OK


_FAMILY_BOUND = {"t1f1": "k_max", "t1f2": "k_max", "t1f3": "k_max", "t1f4": "k_max",
                 "ps1": "t_max", "ps2": "p_max", "ps3": "p_max", "s2np": "a_max"}
FAMILY_COLUMNS = ("family", "k", "a", "b", "p", "n", "omitted", "status", "primality")


def cmd_families(args, out) -> int:
    fid = fam.FamilyId.parse(args.family)
    dest = _FAMILY_BOUND[fid.value.lower()]
    bound = getattr(args, dest)
    if bound is None:
        raise UsageError(f"--family {fid.value.lower()} needs --{dest.replace('_', '-')}")
    seed = args.seed if args.seed is not None else random.SystemRandom().randrange(1 << 32)
    start = time.perf_counter()
    records = fam.generate(fid, bound, rounds=args.rounds, seed=seed)
    elapsed = (time.perf_counter() - start) * 1000
    failed = [r for r in records if r.status == "failed"]
    mismatches = [{"n": r.n, "reason": "record failed direct sigma check"} for r in failed]
    if args.format == "json":
        params = {"family": fid.value, dest: bound, "rounds": args.rounds}
        _dump_json(_document("families", params, [r.to_dict() for r in records], mismatches, elapsed, seed), out)
    else:
        rows = ([r.to_dict()[c] for c in FAMILY_COLUMNS] for r in records)
        _emit_rows(args.format, FAMILY_COLUMNS, rows, out)
    return EXIT_MISMATCH if failed else EXIT_OK


def _run_campaign(args) -> fam.CampaignResult:
    name = args.campaign
    if name == "theorem1":
        return fam.verify_theorem1(args.k_max, args.p_max, jobs=args.jobs)
    if name == "theorem2":
        return fam.verify_theorem2(args.k_max, args.p_max, jobs=args.jobs)
    if name == "strong-table":
        return fam.verify_strong_table(args.bound, jobs=args.jobs)
    if name == "lemma4":
        return fam.audit_lemma4(args.k_max)
    return fam.audit_lemma17(args.a_max, args.b_max)


def cmd_verify(args, out) -> int:
    if args.jobs < 1:
        raise DomainError("--jobs must be >= 1")
    result = _run_campaign(args)
    doc = result.to_dict()
    if args.format == "json":
        _dump_json(doc, out)
    else:
        header = list(doc["hits"][0].keys()) if doc["hits"] else ["n"]
        _emit_rows(args.format, header, ([h.get(c) for c in header] for h in doc["hits"]), out)
        status = "PASS" if result.passed else "FAIL"
        print(f"{result.name}: {len(result.hits)} hits, {len(result.mismatches)} mismatches, {status}",
              file=sys.stderr)
        for m in result.mismatches:
            print(f"mismatch: {json.dumps(m, sort_keys=True)}", file=sys.stderr)
    return EXIT_OK if result.passed else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nearperfect", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_format(p):
        p.add_argument("--format", choices=("table", "json", "csv"), default="table")

    p = sub.add_parser("classify", help="classify one integer")
    p.add_argument("n", type=_int_arg)
    add_format(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("scan", help="list every n in [from, to) of a given kind")
    p.add_argument("--from", dest="lo", type=_int_arg, required=True)
    p.add_argument("--to", dest="hi", type=_int_arg, required=True)
    p.add_argument("--kind", required=True)
    p.add_argument("--jobs", type=_int_arg, default=1)
    p.add_argument("--block-size", type=_int_arg, default=DEFAULT_BLOCK_SIZE)
    add_format(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("families", help="generate members of a parametric family")
    p.add_argument("--family", required=True, choices=sorted(_FAMILY_BOUND), type=str.lower)
    p.add_argument("--k-max", type=_int_arg)
    p.add_argument("--a-max", type=_int_arg)
    p.add_argument("--p-max", type=_int_arg)
    p.add_argument("--t-max", type=_int_arg)
    p.add_argument("--rounds", type=_int_arg, default=DEFAULT_ROUNDS)
    p.add_argument("--seed", type=_int_arg)
    add_format(p)
    p.set_defaults(func=cmd_families)

    p = sub.add_parser("verify", help="run an exhaustive verification campaign")
    vsub = p.add_subparsers(dest="campaign", required=True)
    for name, opts in (
        ("theorem1", (("--k-max", 10), ("--p-max", 10_000))),
        ("theorem2", (("--k-max", 20), ("--p-max", 10_000))),
        ("strong-table", (("--bound", 10**6),)),
        ("lemma4", (("--k-max", 200),)),
        ("lemma17", (("--a-max", 64), ("--b-max", 64))),
    ):
        q = vsub.add_parser(name)
        for flag, default in opts:
            q.add_argument(flag, type=_int_arg, default=default)
        q.add_argument("--jobs", type=_int_arg, default=1)
        add_format(q)
        q.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None, out: io.TextIOBase | None = None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except (DomainError, UsageError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BudgetExceeded, NearPerfectError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except Exception as exc:  # worker crash in a parallel scan
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
