"""Command line: ``endotrivial compute`` and ``endotrivial verify-table1``.

Exit codes for ``compute``: 0 when K (and so T(G,S)) is determined, 2 when
the report is UNDETERMINED, 1 on any error.  ``verify-table1`` exits 0 when
every requested row passes and 1 otherwise.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from typing import Sequence

from . import __version__
from .caps import DEFAULT_CAPS, CapExceeded, Caps
from .catalog import TABLE1, UnknownGroup, canonical_name, load_catalog, table_row
from .fileio import ParseError, ReportRecord, input_digest, load_group
from .kgroup import KResult, t_group_report
from .structure import find_isomorphism, quotient_group

log = logging.getLogger("endotrivial")


class UsageError(Exception):
    pass


def _caps(args) -> Caps:
    kw = {}
    if args.cap_states is not None:
        kw["bfs_states"] = args.cap_states
    if args.cap_enum is not None:
        kw["enum"] = args.cap_enum
    return DEFAULT_CAPS.with_(**kw) if kw else DEFAULT_CAPS


def build_record(result: KResult, G, p: int, mode: str, caps: Caps) -> ReportRecord:
    return ReportRecord(
        report=result.report.to_dict(),
        caps=caps.as_dict(),
        input_digest=input_digest(G, p, mode),
        tool_version=__version__,
    )


def format_text(result: KResult) -> str:
    r = result.report
    t = "undetermined" if r.t_group == "undetermined" else (" x ".join(f"C{q}" for q in r.t_group) or "1")
    lines = [
        f"group            {r.group_name}",
        f"prime            {r.prime}",
        f"|S|              {r.sylow_order}",
        f"|N_G(S)|         {r.normalizer_order}",
        f"|K°|             {r.k_circle_order if r.k_circle_order is not None else 'not computed'}",
    ]
    if isinstance(r.k_order, list):
        lines.append(f"|K|              between {r.k_order[0]} and {r.k_order[1]}")
    else:
        lines.append(f"|K|              {r.k_order}")
    lines += [
        f"tag              {r.tag}",
        f"T(G,S)           {t}   invariants {r.t_group}",
    ]
    if r.bfs_states is not None:
        lines.append(f"BFS states       {r.bfs_states}")
    for f in r.failed_criteria:
        lines.append(f"  not applicable: {f}")
    for n in r.notes:
        lines.append(f"  note: {n}")
    lines.append(f"time             {r.timing_ms:.1f} ms")
    return "\n".join(lines)


def cmd_compute(args) -> int:
    caps = _caps(args)
    mode = args.mode.replace("-", "_")
    G, name = load_group(args.group)
    result = t_group_report(G, args.prime, mode=mode, caps=caps, name=name, backend=args.backend)
    if args.format == "json":
        print(build_record(result, G, args.prime, mode, caps).to_json())
    else:
        print(format_text(result))
    return 0 if result.report.determined else 2


def parse_rows(text: str) -> list[tuple[str, int]]:
    rows = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        name, sep, p = item.rpartition(":")
        if not sep or not name:
            raise UsageError(f"row {item!r} is not NAME:PRIME")
        try:
            rows.append((canonical_name(name), int(p)))
        except ValueError:
            raise UsageError(f"row {item!r}: prime is not an integer") from None
    if not rows:
        raise UsageError("empty row list")
    return rows


def check_row(name: str, p: int, caps: Caps = DEFAULT_CAPS, backend: str | None = None) -> tuple[bool, str, KResult]:
    """Run one table row; returns (pass, detail, result)."""
    row = table_row(name, p)
    if row is None:
        raise UsageError(f"{name}:{p} is not a row of the embedded table")
    G = load_catalog(name)
    result = t_group_report(G, p, caps=caps, name=name, backend=backend)
    rep = result.report
    problems = []
    if rep.tag != row.tag:
        problems.append(f"tag {rep.tag} != {row.tag}")
    if rep.t_group == "undetermined" or tuple(rep.t_group) != row.t_group:
        problems.append(f"T {rep.t_group} != {list(row.t_group)}")
    if result.K is not None:
        NK = quotient_group(result.N, result.K, caps)
        if row.quotient.isdigit():
            if NK.order() != int(row.quotient):
                problems.append(f"|N/K| = {NK.order()} != {row.quotient}")
        elif find_isomorphism(load_catalog(row.quotient), NK) is None:
            problems.append(f"N/K is not isomorphic to {row.quotient}")
    detail = "; ".join(problems) if problems else f"{rep.tag}, T = {list(rep.t_group)}, N/K = {row.quotient}"
    return not problems, detail, result


def cmd_verify(args) -> int:
    caps = _caps(args)
    if args.rows is None:
        rows = [k for k, r in TABLE1.items() if not r.derived and (args.extended or not r.extended)]
    else:
        rows = parse_rows(args.rows)
        for name, p in rows:
            if table_row(name, p) is None:
                raise UsageError(f"{name}:{p} is not a row of the embedded table")
    failures = 0
    print(f"{'row':10s} {'status':6s} {'time':>8s}  detail")
    for name, p in rows:
        t0 = time.perf_counter()
        try:
            ok, detail, _ = check_row(name, p, caps, args.backend)
        except CapExceeded as exc:
            ok, detail = False, f"cap exceeded: {exc}"
        dt = time.perf_counter() - t0
        failures += not ok
        print(f"{name + ':' + str(p):10s} {'PASS' if ok else 'FAIL':6s} {dt:7.2f}s  {detail}", flush=True)
    print(f"{len(rows) - failures}/{len(rows)} rows pass")
    return 0 if failures == 0 else 1


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="endotrivial", description="Compute T(G,S) = (N_G(S)/K_G)^ab for permutation groups.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--cap-states", type=int, default=None, help="BFS state cap")
        sp.add_argument("--cap-enum", type=int, default=None, help="element enumeration cap")
        sp.add_argument("--backend", choices=["cython", "numpy"], default=None, help="kernel backend")

    c = sub.add_parser("compute", help="compute K and T(G,S) for one group and prime")
    c.add_argument("--group", required=True, help="group file path or catalog:NAME")
    c.add_argument("--prime", required=True, type=int)
    c.add_argument("--mode", choices=["auto", "criteria-only", "bfs"], default="auto")
    c.add_argument("--format", choices=["json", "text"], default="json")
    common(c)
    c.set_defaults(func=cmd_compute)

    v = sub.add_parser("verify-table1", help="check rows of the embedded table")
    v.add_argument("--rows", default=None, help="comma-separated NAME:PRIME rows (default: all main rows)")
    v.add_argument("--extended", action="store_true", help="include the extended rows in the default set")
    common(v)
    v.set_defaults(func=cmd_verify)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = make_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags; 2 is reserved for UNDETERMINED
        return 0 if exc.code == 0 else 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except UnknownGroup as exc:
        print(f"error: unknown catalog group {exc.args[0]}", file=sys.stderr)
        return 1
    except (ParseError, OSError, ValueError, CapExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
