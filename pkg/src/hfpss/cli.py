"""Command-line driver: ``hfpss run | list | cohomology``."""
from __future__ import annotations

import argparse
import json
import re
import sys
import time
from pathlib import Path

from .abgroup import FgAbGroup, IntMatrix
from .c2cohomology import C2Module, cohomology_periodic
from .chart import render_chart
from .errors import HfpssError, ParseError
from .runner import RunResult, report, run_scenario
from .scenarios import builtin_names, resolve_ref
from .specseq import Provenance

EXIT_OK, EXIT_ERROR, EXIT_MISMATCH = 0, 1, 2


# ---------------------------------------------------------------------------
# module specs for the cohomology subcommand


_SUMMAND = re.compile(r"^(Z_2|Z2|Z)(?:/(\d+))?$|^(\d+)$")


def parse_module(spec: str) -> C2Module:
    """``"Z sign"``, ``"Z/4 trivial"``, ``"Z+Z swap"``, ``"Z/2+Z_2 [[1,0],[0,1]]"``.

    Summands are ``Z``, ``Z_2`` (2-adic), ``Z/n`` or a bare order ``n``
    (0 = free); the action is ``trivial``, ``sign``, ``swap`` or a JSON
    matrix whose column ``j`` is the image of summand ``j``.
    """
    parts = spec.strip().split(None, 1)
    if len(parts) != 2:
        raise ParseError(f"module spec {spec!r} needs summands and an action")
    orders, pro2 = [], []
    for item in parts[0].split("+"):
        m = _SUMMAND.match(item.strip())
        if not m:
            raise ParseError(f"cannot parse summand {item!r}")
        if m.group(3) is not None:
            d = int(m.group(3))
            orders.append(d)
            pro2.append(False)
        elif m.group(2) is not None:
            orders.append(int(m.group(2)))
            pro2.append(False)
        else:
            orders.append(0)
            pro2.append(m.group(1) != "Z")
    if any(d == 1 for d in orders):
        raise ParseError("summand of order 1 is trivial; leave it out")
    if any(a == 0 and b != 0 for a, b in zip(orders, orders[1:])):
        raise ParseError("list torsion summands before free ones")
    names = [f"e{i}" for i in range(len(orders))]
    group = FgAbGroup.from_orders(orders, names, [p for p, d in zip(pro2, orders)])
    action = parts[1].strip()
    n = len(orders)
    if action == "trivial":
        sigma = IntMatrix.identity(n)
    elif action == "sign":
        sigma = IntMatrix.diag([-1] * n)
    elif action == "swap":
        if n != 2:
            raise ParseError("swap needs exactly two summands")
        sigma = IntMatrix.from_rows([[0, 1], [1, 0]])
    else:
        try:
            rows = json.loads(action)
            sigma = IntMatrix.from_rows(rows, n)
        except (json.JSONDecodeError, TypeError, ValueError) as e:
            raise ParseError(f"cannot parse action {action!r}: {e}") from None
    return C2Module(group, sigma)


def parse_range(text: str) -> range:
    m = re.fullmatch(r"\s*(\d+)\s*\.\.\s*(\d+)\s*", text)
    if not m:
        raise ParseError(f"range must look like 0..4, got {text!r}")
    lo, hi = int(m.group(1)), int(m.group(2))
    if hi < lo:
        raise ParseError("empty range")
    return range(lo, hi + 1)


# ---------------------------------------------------------------------------
# run


def _chart(res: RunResult, fmt: str, page_arg: str) -> str:
    if res.run is None:
        raise HfpssError("charts need a spectral sequence scenario")
    if page_arg == "infinity":
        page = res.run.e_infinity
        arrows = [(r, m) for r, m in res.run.unknown_slots()]
        label = "E_infinity"
    else:
        r = int(page_arg)
        if not 2 <= r <= len(res.run.differentials) + 1:
            raise HfpssError(f"page {r} was not computed")
        page = res.run.page(r)
        arrows = []
        if r - 2 < len(res.run.differentials):
            d = res.run.differentials[r - 2]
            arrows = [
                (r, m)
                for m in d.maps.values()
                if m.provenance == Provenance.UNKNOWN or not m.is_zero(page.group(*m.target).orders)
            ]
        label = f"E_{r}"
    return render_chart(page, fmt, arrows, f"{res.scenario.name}: {label}")


def _summary(res: RunResult) -> list[str]:
    lines = []
    for note in res.notes:
        lines.append(f"note: {note}")
    for n, v in sorted(res.verdicts.items()):
        if not v.ok:
            lines.append(f"stem {n}: {v.kind.value}: {v.detail}")
    if res.bound is not None:
        lines.append(f"conclusion: {res.bound.conclusion.label()}")
    return lines


def cmd_run(args) -> int:
    sc = resolve_ref(args.scenario)
    start = time.perf_counter()
    res = run_scenario(sc, args.max_page)
    elapsed = time.perf_counter() - start
    if args.format == "report":
        text = json.dumps(report(res), indent=2, ensure_ascii=False, sort_keys=False) + "\n"
    else:
        text = _chart(res, args.format, args.page)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    for line in _summary(res):
        print(line, file=sys.stderr)
    if args.timing:
        print(f"time: {elapsed:.3f}s", file=sys.stderr)
    return EXIT_OK if res.ok else EXIT_MISMATCH


def cmd_list(args) -> int:
    for name in builtin_names():
        print(name)
    return EXIT_OK


def cmd_cohomology(args) -> int:
    M = parse_module(args.module)
    for s in parse_range(args.range):
        print(f"H^{s} = {cohomology_periodic(M, s).label()}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hfpss", description="C2 homotopy fixed point and Picard spectral sequences")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a built-in scenario or a scenario file")
    run.add_argument("scenario", help="built-in name or path to a JSON scenario")
    run.add_argument("--format", choices=("report", "chart-ascii", "chart-svg"), default="report")
    run.add_argument("--page", default="infinity", help="page to chart: a number or 'infinity'")
    run.add_argument("--out", help="write the artifact here instead of stdout")
    run.add_argument("--max-page", type=int, default=None, help="last differential page to compute")
    run.add_argument("--timing", action="store_true", help="print wall time to stderr")
    run.set_defaults(func=cmd_run)

    ls = sub.add_parser("list", help="list built-in scenarios")
    ls.set_defaults(func=cmd_list)

    coh = sub.add_parser("cohomology", help="tabulate H^s(C2; M)")
    coh.add_argument("--module", required=True, help='e.g. "Z sign", "Z/4 trivial", "Z+Z swap"')
    coh.add_argument("--range", default="0..4", help="degrees, e.g. 0..4")
    coh.set_defaults(func=cmd_cohomology)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (HfpssError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
