"""Command-line interface.

Exit status: 0 on success (whatever the test decision), 2 for usage, I/O and
validation errors, 3 when the sample size is outside the table's rows.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import re
import sys

import numpy as np

from . import __version__
from .errors import BsppccError, DataError, OutOfRangeError, SampleSizeError
from .gof import critical_row, run_test
from .montecarlo import (
    PAPER_LEVELS,
    CriticalValueTable,
    SimConfig,
    accuracy_bound,
    alpha_sensitivity,
    build_table,
    paper_table,
)
from .plotting import MIN_N, linearize
from .sample import Sample

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_RANGE = 3
EXIT_INTERRUPTED = 130

MAX_TABLE_N = 10**6
TABLE_ENV = "BSPPCC_TABLE"

_SPLIT = re.compile(r"[\s,]+")


def read_sample(path) -> Sample:
    """Read observations from a text file.

    Numbers are separated by whitespace and/or commas; ``#`` starts a comment.
    """
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.split("#", 1)[0]
            for token in _SPLIT.split(body.strip()):
                if not token:
                    continue
                try:
                    x = float(token)
                except ValueError:
                    raise DataError(f"{path}:{lineno}: cannot parse {token!r} as a number",
                                    line=lineno) from None
                if not (np.isfinite(x) and x > 0):
                    raise DataError(f"{path}:{lineno}: observation {token} must be finite and > 0",
                                    line=lineno)
                values.append(x)
    if len(values) < MIN_N:
        raise SampleSizeError(f"{path}: need at least {MIN_N} observations, got {len(values)}")
    return Sample(values)


def _float_list(text):
    try:
        return tuple(float(g) for g in text.split(",") if g.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number list {text!r}")


def load_table(path=None) -> CriticalValueTable:
    """Table at ``path``, else ``$BSPPCC_TABLE``, else the published table."""
    path = path or os.environ.get(TABLE_ENV) or None
    if path is None:
        return paper_table()
    return CriticalValueTable.read(path)


def _format_report_text(report) -> str:
    meta = report.table_meta
    lines = [
        f"statistic r  {report.r:.6f}",
        f"sample size  {report.n}",
        f"p-value      {report.p_value}",
        f"table        {meta.get('source')} (I={meta.get('I')})",
        "",
        f"{'level':>8}  {'r_crit':>8}  decision",
    ]
    for d in report.decisions:
        verdict = "reject" if d.reject else "do not reject"
        lines.append(f"{d.level:>8g}  {d.critical:8.6f}  {verdict}")
    return "\n".join(lines)


def cmd_test(args) -> int:
    sample = read_sample(args.data)
    table = load_table(args.table)
    report = run_test(sample, args.levels, table)
    if args.format == "json":
        print(json.dumps(report.to_dict(), indent=2))
    else:
        print(_format_report_text(report))
    return EXIT_OK


def _svg(points) -> str:
    u, v = points.u, points.v
    slope, intercept = np.polyfit(u, v, 1)
    w, h, pad = 480, 360, 40
    ulo, uhi = float(u.min()), float(u.max())
    vlo, vhi = float(v.min()), float(v.max())
    uspan = (uhi - ulo) or 1.0
    vspan = (vhi - vlo) or 1.0

    def sx(x):
        return pad + (x - ulo) / uspan * (w - 2 * pad)

    def sy(y):
        return h - pad - (y - vlo) / vspan * (h - 2 * pad)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">',
        f'<rect x="{pad}" y="{pad}" width="{w - 2 * pad}" height="{h - 2 * pad}" '
        'fill="none" stroke="#888"/>',
        f'<line x1="{sx(ulo):.2f}" y1="{sy(intercept + slope * ulo):.2f}" '
        f'x2="{sx(uhi):.2f}" y2="{sy(intercept + slope * uhi):.2f}" stroke="#c33"/>',
    ]
    parts += [f'<circle cx="{sx(a):.2f}" cy="{sy(b):.2f}" r="3" fill="#236"/>'
              for a, b in zip(u, v)]
    parts.append(f'<text x="{w / 2}" y="{h - 8}" text-anchor="middle">u = t(i)</text>')
    parts.append(f'<text x="12" y="{h / 2}" transform="rotate(-90 12 {h / 2})" '
                 'text-anchor="middle">v = sqrt(t(i)) z(p_i)</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_plot(args) -> int:
    points = linearize(read_sample(args.data))
    with open(f"{args.out}.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["i", "p", "u", "v"])
        for i, (p, u, v) in enumerate(points.entries, start=1):
            writer.writerow([i, f"{p:.6f}", repr(u), f"{v:.6f}"])
    if args.svg:
        with open(f"{args.out}.svg", "w", encoding="utf-8") as fh:
            fh.write(_svg(points))
    return EXIT_OK


def cmd_gen_table(args) -> int:
    if not (MIN_N <= args.n_from <= args.n_to <= MAX_TABLE_N) or args.n_step < 1:
        raise ValueError(f"need {MIN_N} <= n-from <= n-to <= {MAX_TABLE_N} and n-step >= 1")
    if args.iterations < 1000:
        raise ValueError("--iterations must be at least 1000")
    levels = args.levels or PAPER_LEVELS
    template = SimConfig(args.n_from, args.iterations, args.seed, args.alpha, levels)
    err = sys.stderr
    print(f"accuracy bound 0.5/sqrt(I) = {accuracy_bound(args.iterations):.6g}", file=err)

    def progress(n, row):
        print(f"n={n} done", file=err, flush=True)

    n_set = range(args.n_from, args.n_to + 1, args.n_step)
    try:
        table = build_table(n_set, template, workers=args.workers,
                            partial_path=args.out, progress=progress)
    except KeyboardInterrupt:
        print(f"interrupted; completed rows flushed to {args.out}", file=err)
        return EXIT_INTERRUPTED
    table.write(args.out)
    return EXIT_OK


def cmd_show_table(args) -> int:
    table = load_table(args.table)
    if args.n is None:
        sys.stdout.write(table.to_text())
        return EXIT_OK
    row = critical_row(table, args.n)
    tabulated = "" if args.n in table.rows else " (interpolated)"
    print(f"# n={args.n}{tabulated}")
    for g, r in zip(table.levels, row):
        print(f"{g:<6g} {r:.6f}")
    return EXIT_OK


def cmd_alpha_sensitivity(args) -> int:
    report = alpha_sensitivity(args.n, args.iterations, args.alphas,
                               seed=args.seed, workers=args.workers)
    sys.stdout.write(report.to_text())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bsppcc",
        description="Birnbaum-Saunders probability-plot correlation goodness-of-fit test",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", help="test a data file for Birnbaum-Saunders fit")
    p.add_argument("--data", required=True)
    p.add_argument("--levels", type=_float_list, default=None,
                   help="comma-separated levels (default: every table level)")
    p.add_argument("--table", default=None, help="table file (default: published table)")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("plot", help="export probability-plot points")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True, help="output prefix; writes <prefix>.csv")
    p.add_argument("--svg", action="store_true", help="also write <prefix>.svg")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("gen-table", help="simulate a critical-value table")
    p.add_argument("--n-from", type=int, required=True)
    p.add_argument("--n-to", type=int, required=True)
    p.add_argument("--n-step", type=int, default=1)
    p.add_argument("--iterations", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--alpha", type=float, default=1.0, help="generator shape (default 1)")
    p.add_argument("--levels", type=_float_list, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_table)

    p = sub.add_parser("show-table", help="print the table or one row of it")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--table", default=None)
    p.set_defaults(func=cmd_show_table)

    p = sub.add_parser("alpha-sensitivity",
                       help="compare critical values simulated under several shapes")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--iterations", type=int, default=100_000)
    p.add_argument("--alphas", type=_float_list, default=(0.5, 1.0, 2.0))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_alpha_sensitivity)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except OutOfRangeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RANGE
    except (BsppccError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
