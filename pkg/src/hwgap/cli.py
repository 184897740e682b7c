"""Command-line front end; every subcommand writes CSV (or JSON with ``--json``).

Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 precondition
violated, 4 validation suite ran but a criterion failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import NumericalFailure, PreconditionViolated
from .gap import bstar_finite, gap_finite
from .limit import bstar, gamma_limit, zeta
from .model import make_params
from .quadrature import QuadratureConfig
from .transient import (
    TransientQuery,
    explicit_bounds,
    km_cdf_diff,
    km_transient,
    literature_bounds,
    oracle_gap_report,
    t_star,
)

EXIT_USAGE, EXIT_NUMERICAL, EXIT_PRECONDITION, EXIT_CRITERIA = 1, 2, 3, 4
SWEEP_QUANTITIES = ("zeta", "gamma_limit", "gap_finite", "bstar_finite")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass(frozen=True)
class SweepSpec:
    start: float
    end: float
    steps: int
    quantity: str

    def __post_init__(self):
        if not self.start < self.end:
            raise UsageError("sweep needs start < end")
        if self.steps < 2:
            raise UsageError("sweep needs steps >= 2")
        if self.quantity not in SWEEP_QUANTITIES:
            raise UsageError(f"unknown sweep quantity {self.quantity}")

    def points(self) -> list[float]:
        return [float(v) for v in np.linspace(self.start, self.end, self.steps)]


Table = tuple[list[str], list[list]]


# ------------------------------------------------------------------- output

def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    return str(v)


def _json_value(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, np.integer):
        return int(v)
    return v


def render(table: Table, as_json: bool) -> str:
    header, rows = table
    if as_json:
        records = [{k: _json_value(v) for k, v in zip(header, row)} for row in rows]
        payload = records[0] if len(records) == 1 else records
        return json.dumps(payload, sort_keys=False) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows([_cell(v) for v in row] for row in rows)
    return buf.getvalue()


# ----------------------------------------------------------------- commands

def _params(args, strict: bool = True):
    if args.n is None or args.B is None:
        raise UsageError("--n and --B are required")
    return make_params(args.n, args.B, strict=strict)


def _need(args, *names):
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError("missing required option(s): " + " ".join(missing))


def _gap_row(n: int, B: float):
    r = gap_finite(make_params(n, B))
    return [n, B, r.gap, r.regime.value]


def cmd_gap(args, cfg) -> Table:
    p = _params(args)
    return ["n", "B", "gap", "regime"], [_gap_row(p.n, p.B)]


def _limit_row(B: float, tol: float, cfg):
    g = gamma_limit(B, tol, cfg)
    return [B, g.gamma, g.complement, g.regime.value]


def cmd_limit_gap(args, cfg) -> Table:
    _need(args, "B")
    return ["B", "gamma", "complement", "regime"], [_limit_row(args.B, args.tol or 1e-12, cfg)]


def cmd_zeta(args, cfg) -> Table:
    _need(args, "B")
    return ["B", "zeta"], [[args.B, zeta(args.B, cfg)]]


def cmd_bstar(args, cfg) -> Table:
    return ["bstar"], [[bstar(args.tol or 1e-10, cfg)]]


def cmd_bstar_finite(args, cfg) -> Table:
    _need(args, "n")
    b, rho = bstar_finite(args.n, args.tol or 1e-8)
    return ["n", "B_star", "rho_star"], [[args.n, b, rho]]


def _transient_query(args) -> TransientQuery:
    _need(args, "i", "j", "t")
    return TransientQuery(_params(args), args.i, args.j, args.t)


def cmd_transient(args, cfg) -> Table:
    q = _transient_query(args)
    return ["n", "B", "i", "j", "t", "value"], [[q.p.n, q.p.B, q.i, q.j, q.t, km_transient(q, cfg)]]


def cmd_cdf_diff(args, cfg) -> Table:
    q = _transient_query(args)
    return ["n", "B", "i", "j", "t", "bound"], [[q.p.n, q.p.B, q.i, q.j, q.t, km_cdf_diff(q, cfg)]]


def cmd_bounds(args, cfg) -> Table:
    p = _params(args)
    _need(args, "t")
    a1 = args.a1 or 0.0
    a2 = args.a2 or 0.0
    r = explicit_bounds(p, a1, a2, args.t)
    header = ["n", "B", "a1", "a2", "t", "alpha", "pmf_bound", "cdf_bound", "valid_caveat"]
    return header, [[p.n, p.B, a1, a2, args.t, r.alpha, r.pmf_bound, r.cdf_bound, r.valid_caveat]]


def cmd_tstar(args, cfg) -> Table:
    _need(args, "B", "eps")
    a = args.a if args.a is not None else (args.a1 or 0.0)
    return ["a", "B", "eps", "t_star"], [[a, args.B, args.eps, t_star(a, args.B, args.eps)]]


def cmd_literature_bounds(args, cfg) -> Table:
    p = _params(args)
    _need(args, "t")
    zeif, chen = literature_bounds(p, args.t)
    return ["n", "B", "t", "zeif", "chen"], [[p.n, p.B, args.t, zeif, chen]]


def cmd_oracle_gap(args, cfg) -> Table:
    p = _params(args, strict=False)
    rep = oracle_gap_report(p, args.trunc or 2000)
    rows = [[p.n, p.B, m, v] for m, v in zip(rep.truncations, rep.values)]
    rows.append([p.n, p.B, "extrapolated", rep.extrapolated])
    return ["n", "B", "trunc", "gap"], rows


def _sweep_table(spec: SweepSpec, args, cfg) -> Table:
    tol = args.tol
    q = spec.quantity
    if q == "zeta":
        header, fn = ["B", "zeta"], lambda B: [B, zeta(B, cfg)]
    elif q == "gamma_limit":
        header, fn = ["B", "gamma", "complement", "regime"], lambda B: _limit_row(B, tol or 1e-12, cfg)
    elif q == "gap_finite":
        _need(args, "n")
        header, fn = ["n", "B", "gap", "regime"], lambda B: _gap_row(args.n, B)
    else:
        def fn(x):
            n = int(round(x))
            b, rho = bstar_finite(n, tol or 1e-8)
            return [n, b, rho]
        header = ["n", "B_star", "rho_star"]
    points = spec.points()
    if args.workers > 1:
        with ThreadPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(fn, points))     # map keeps input order
    else:
        rows = [fn(x) for x in points]
    return header, rows


def cmd_sweep(args, cfg) -> Table:
    _need(args, "quantity", "start", "end", "steps")
    spec = SweepSpec(args.start, args.end, args.steps, args.quantity)
    return _sweep_table(spec, args, cfg)


def cmd_validate(args, cfg) -> Table:
    from .validation import run_suite

    results = run_suite(args.suite)
    args._failed = any(not r.passed for r in results)
    for r in results:
        print(r.line(), file=sys.stderr)
    header = ["criterion", "title", "passed", "detail"]
    return header, [[r.number, r.title, r.passed, r.detail] for r in results]


COMMANDS: dict[str, Callable] = {
    "gap": cmd_gap,
    "limit-gap": cmd_limit_gap,
    "zeta": cmd_zeta,
    "bstar": cmd_bstar,
    "bstar-finite": cmd_bstar_finite,
    "transient": cmd_transient,
    "cdf-diff": cmd_cdf_diff,
    "bounds": cmd_bounds,
    "tstar": cmd_tstar,
    "literature-bounds": cmd_literature_bounds,
    "oracle-gap": cmd_oracle_gap,
    "sweep": cmd_sweep,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--n", type=int)
    common.add_argument("--B", type=float)
    common.add_argument("--i", type=int)
    common.add_argument("--j", type=int)
    common.add_argument("--t", type=float)
    common.add_argument("--a", type=float, help="displacement for tstar")
    common.add_argument("--a1", type=float)
    common.add_argument("--a2", type=float)
    common.add_argument("--eps", type=float)
    common.add_argument("--tol", type=float)
    common.add_argument("--trunc", type=int)
    common.add_argument("--out", help="write output to this path instead of stdout")
    common.add_argument("--json", action="store_true", help="emit JSON instead of CSV")

    parser = _Parser(prog="hwgap", description="Spectral gap of M/M/n queues in the Halfin-Whitt regime.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "sweep":
            sp.add_argument("--quantity", choices=SWEEP_QUANTITIES)
            sp.add_argument("--start", type=float)
            sp.add_argument("--end", type=float)
            sp.add_argument("--steps", type=int)
            sp.add_argument("--workers", type=int, default=4)
        if name == "validate":
            sp.add_argument("--suite", choices=("quick", "full"), default="quick")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = QuadratureConfig.from_env()
        table = COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except PreconditionViolated as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except ValueError as exc:                   # bad env tolerances and the like
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    text = render(table, args.json)
    if args.out:
        with open(args.out, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_CRITERIA if getattr(args, "_failed", False) else 0


run = main


if __name__ == "__main__":
    sys.exit(main())
