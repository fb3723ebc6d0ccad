"""Command-line front end.

Four subcommands: ``solve`` finds an optimal cycle for one instance,
``eval`` scores a given activity order, ``export-lp`` writes a
formulation in LP format, and ``bench`` sweeps the uniform family and
reports per-formulation tables.

Exit codes: 0 success, 1 solver budget exhausted, 2 malformed input,
3 benchmark check mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Optional, Sequence, TextIO

from .bench import (
    METHODS,
    BenchConfig,
    emit_plot_data,
    render_csv,
    render_markdown,
    run_benchmark,
)
from .cell import InstanceError, canonical_order, load_instance
from .engine.branch_bound import BnbOptions, solve_milp, warm_start
from .exact import SearchOptions, solve_exact
from .milp.decode import DecodeError, decode_solution
from .milp.formulations import build_model
from .milp.model import ModelError, write_lp
from .schedule import InvalidOrderError, evaluate_cycle, schedule_to_json, timeline

__all__ = ["main"]

EXIT_OK = 0
EXIT_LIMIT = 1
EXIT_INPUT = 2
EXIT_MISMATCH = 3

# rough compiled-kernel throughput, used to turn --timeout into a
# deterministic node budget for the exhaustive search
_ENUM_NODES_PER_SECOND = 5_000_000


class _InputError(Exception):
    """Bad instance, order, or flag combination; exits 2."""


class _Parser(argparse.ArgumentParser):
    # flag errors must exit 2 with a single diagnostic line
    def error(self, message: str) -> None:  # type: ignore[override]
        raise _InputError(message)


def _num(x) -> object:
    v = float(x)
    return int(v) if v.is_integer() else v


def _load(source: str):
    try:
        return load_instance(source)
    except (InstanceError, ValueError, OSError) as exc:
        raise _InputError(f"bad instance {source!r}: {exc}") from exc


def _emit(doc: dict, out: TextIO) -> None:
    json.dump(doc, out, indent=2, sort_keys=True)
    out.write("\n")


def _solve_enum(inst, timeout: Optional[float], long: bool) -> tuple[int, dict]:
    if inst.m >= 6 and not long:
        raise _InputError(
            "exhaustive search at m >= 6 is gated; pass --long or use a "
            "MILP method")
    budget = None if timeout is None else max(
        1, int(timeout * _ENUM_NODES_PER_SECOND))
    opts = SearchOptions(node_limit=budget, partial=budget is not None)
    t0 = time.perf_counter()
    res = solve_exact(inst, opts)
    seconds = time.perf_counter() - t0
    doc = {
        "v": 1,
        "method": "enum",
        "status": "optimal" if res.proven else "limit",
        "C": _num(res.cycle_time),
        "order": res.order.to_text(),
        "nodes": res.nodes,
        "seconds": round(seconds, 6),
    }
    return (EXIT_OK if res.proven else EXIT_LIMIT), doc


def _solve_milp(inst, method: str, variant: str,
                timeout: Optional[float]) -> tuple[int, dict]:
    if method == "flow" and variant != "base":
        raise _InputError("the flow formulation has no waits variant")
    model = build_model(inst, method, variant=variant, cuts=True)
    incumbent = warm_start(model, canonical_order(inst.m))
    t0 = time.perf_counter()
    sol = solve_milp(model, options=BnbOptions(time_limit=timeout),
                     incumbent=incumbent)
    seconds = time.perf_counter() - t0
    doc = {
        "v": 1,
        "method": method,
        "variant": variant,
        "status": sol.status,
        "nodes": sol.nodes,
        "seconds": round(seconds, 6),
    }
    if sol.status == "optimal":
        order, sched = decode_solution(model, sol)
        doc["C"] = _num(sched.cycle_time)
        doc["order"] = order.to_text()
        return EXIT_OK, doc
    doc["C_best"] = None if sol.objective is None else _num(sol.objective)
    return EXIT_LIMIT, doc


def _cmd_solve(args) -> int:
    inst = _load(args.instance)
    if args.method == "enum":
        code, doc = _solve_enum(inst, args.timeout, args.long)
    else:
        code, doc = _solve_milp(inst, args.method, args.variant, args.timeout)
    if args.json:
        _emit(doc, sys.stdout)
        return code
    if "C" in doc:
        print(f"C = {doc['C']}")
        print(f"order = {doc['order']}")
    else:
        best = doc.get("C_best")
        print(f"best known C = {'-' if best is None else best}")
    print(f"status = {doc['status']} ({doc['method']}, "
          f"{doc['nodes']} nodes, {doc['seconds']:.3f}s)")
    return code


def _cmd_eval(args) -> int:
    inst = _load(args.instance)
    try:
        sched = evaluate_cycle(inst, args.order)
    except InvalidOrderError as exc:
        raise _InputError(f"bad order {args.order!r}: {exc}") from exc
    if args.json:
        _emit(schedule_to_json(inst, sched, include_timeline=args.timeline),
              sys.stdout)
        return EXIT_OK
    print(f"C = {_num(sched.cycle_time)}")
    print(f"total wait = {_num(sched.total_wait)}")
    for a, b, w in sched.waits():
        if w:
            print(f"wait {a}->{b} = {_num(w)}")
    if args.timeline:
        for seg in timeline(inst, sched):
            span = f"[{_num(seg['start']):>5} .. {_num(seg['end']):>5}]"
            if seg["action"] == "move":
                print(f"{span} move {seg['from']} -> {seg['to']}")
            else:
                print(f"{span} {seg['action']} @ {seg['from']}")
    return EXIT_OK


def _cmd_export_lp(args) -> int:
    inst = _load(args.instance)
    if args.formulation == "flow" and args.variant != "base":
        raise _InputError("the flow formulation has no waits variant")
    model = build_model(inst, args.formulation, variant=args.variant,
                        cuts=args.cuts)
    if args.output:
        write_lp(model, args.output)
    else:
        write_lp(model, sys.stdout)
    return EXIT_OK


def _parse_values(text: str, what: str) -> tuple:
    """Comma list of numbers and a..b/s ranges, e.g. ``0..250/25``."""
    values: list = []
    for token in text.split(","):
        token = token.strip()
        try:
            if ".." in token:
                span, _, step_s = token.partition("/")
                lo_s, _, hi_s = span.partition("..")
                lo, hi = float(lo_s), float(hi_s)
                step = float(step_s) if step_s else 1.0
                if step <= 0 or hi < lo:
                    raise ValueError("empty range")
                x = lo
                while x <= hi + 1e-9:
                    values.append(_num(x))
                    x += step
            else:
                values.append(_num(token))
        except ValueError as exc:
            raise _InputError(f"bad {what} value {token!r}: {exc}") from exc
    if not values:
        raise _InputError(f"no {what} values given")
    return tuple(values)


def _cmd_bench(args) -> int:
    methods = tuple(x.strip() for x in args.methods.split(",") if x.strip())

    def progress(row) -> None:
        note = row.verdict or "done"
        print(f"bench m={row.m} p={row.p:g}: {note}", file=sys.stderr)

    try:
        config = BenchConfig(
            m_values=_parse_values(args.m, "m"),
            p_values=_parse_values(args.p, "p"),
            methods=methods,
            check=args.check,
            long=args.long,
            force=args.force,
            workers=args.workers,
            time_limit=args.timeout,
            progress=progress if not args.quiet else None,
        )
    except ValueError as exc:
        raise _InputError(str(exc)) from exc
    rows, overall = run_benchmark(config)

    text = render_markdown(rows) if args.out == "md" else render_csv(rows)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)

    if args.plot_data:
        with open(args.plot_data, "w", encoding="utf-8") as fh:
            json.dump(emit_plot_data(rows, methods), fh, indent=2)
            fh.write("\n")

    if args.check:
        for row in rows:
            for key, val in sorted(row.diagnostics.items()):
                print(f"info m={row.m} p={row.p:g}: {key} = {val:.6g}",
                      file=sys.stderr)
        print(f"check: {overall or 'no reference rows'}", file=sys.stderr)
        if overall == "MISMATCH":
            return EXIT_MISMATCH
    return EXIT_OK


def _build_parser() -> _Parser:
    parser = _Parser(prog="robocell",
                     description="Cyclic robotic-cell scheduling toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="find an optimal cycle")
    ps.add_argument("instance", help="instance JSON file or literal")
    ps.add_argument("--method", choices=METHODS, default="enum")
    ps.add_argument("--variant", choices=("base", "waits"), default="base")
    ps.add_argument("--timeout", type=float, default=None,
                    help="budget in seconds; exceeded -> exit 1")
    ps.add_argument("--long", action="store_true",
                    help="allow the exhaustive search at m >= 6")
    ps.add_argument("--json", action="store_true")

    pe = sub.add_parser("eval", help="score a given activity order")
    pe.add_argument("instance", help="instance JSON file or literal")
    pe.add_argument("order", help='activity order, e.g. "L2 L3 U1 U2 U3"')
    pe.add_argument("--timeline", action="store_true")
    pe.add_argument("--json", action="store_true")

    px = sub.add_parser("export-lp", help="write a formulation as LP")
    px.add_argument("instance", help="instance JSON file or literal")
    px.add_argument("formulation", choices=("mtz", "vajda", "flow"))
    px.add_argument("--variant", choices=("base", "waits"), default="base")
    px.add_argument("--cuts", action="store_true",
                    help="include the bound-strengthening rows")
    px.add_argument("-o", "--output", default=None)

    pb = sub.add_parser("bench", help="sweep the uniform family")
    pb.add_argument("--m", default="4,5,6", help="e.g. 4,5 or 2..6")
    pb.add_argument("--p", default="0..250/25", help="e.g. 0..250/25 or 0,125")
    pb.add_argument("--methods", default=",".join(METHODS))
    pb.add_argument("--out", choices=("csv", "md"), default="csv")
    pb.add_argument("-o", "--output", default=None, help="write table here")
    pb.add_argument("--plot-data", default=None,
                    help="write solve-seconds series JSON here")
    pb.add_argument("--check", action="store_true",
                    help="compare against the embedded reference table")
    pb.add_argument("--long", action="store_true",
                    help="allow the exhaustive search at m >= 6")
    pb.add_argument("--force", action="store_true",
                    help="allow m outside 1..6")
    pb.add_argument("--timeout", type=float, default=20.0,
                    help="wall seconds per integer solve")
    pb.add_argument("--workers", type=int, default=1)
    pb.add_argument("--quiet", action="store_true",
                    help="suppress per-cell progress lines")

    return parser


_HANDLERS = {
    "solve": _cmd_solve,
    "eval": _cmd_eval,
    "export-lp": _cmd_export_lp,
    "bench": _cmd_bench,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _HANDLERS[args.command](args)
    except _InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InstanceError, InvalidOrderError, DecodeError, ModelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
