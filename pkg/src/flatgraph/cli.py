"""Command-line front end: every subcommand prints one JSON document."""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import decider, edm, graph, minors, rigidity, solver, spaces
from .schemas import SCHEMA_VERSION

EX_USAGE = 64
EX_DATAERR = 65
EX_SOFTWARE = 70

DECIDE_CODES = {decider.FLATTENABLE: 0, decider.NOT_FLATTENABLE: 1, decider.UNKNOWN: 2}


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


_DATA_ERRORS = (DataError, graph.GraphError, edm.MatrixError, edm.NotAnEDMError, spaces.SpaceError,
                spaces.NotAMetricError, json.JSONDecodeError, KeyError, OSError)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _num(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else str(x)
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _points(arr) -> list[list]:
    return [[_num(v) for v in row] for row in (arr.tolist() if isinstance(arr, np.ndarray) else arr)]


def _load(path: str):
    return json.loads(Path(path).read_text())


def _load_graph(path: str) -> graph.Graph:
    return graph.Graph.from_json(_load(path))


def _load_lengths(path: str) -> dict:
    data = _load(path)
    try:
        items = data["lengths"]
    except (TypeError, KeyError) as exc:
        raise graph.GraphError("lengths JSON needs a 'lengths' list of [u, v, length]") from exc
    out = {}
    for item in items:
        if len(item) != 3:
            raise graph.GraphError(f"bad length entry {item!r}")
        u, v, val = item
        out[graph.norm_edge(int(u), int(v))] = float(Fraction(val) if isinstance(val, str) else val)
    return out


def lengths_json(lengths: dict) -> list[list]:
    return [[u, v, _num(val)] for (u, v), val in sorted(lengths.items())]


def _space(text: str) -> spaces.SpaceDescriptor:
    try:
        return spaces.SpaceDescriptor.parse(text)
    except spaces.SpaceError as exc:
        raise UsageError(str(exc)) from exc


def _exponent(text: str) -> float:
    try:
        p = math.inf if text.strip() == "inf" else float(text)
    except ValueError as exc:
        raise UsageError(f"bad exponent {text!r}") from exc
    if not p >= 1:
        raise UsageError(f"exponent must be >= 1, got {text}")
    return p


def _cfg(args) -> solver.SolveConfig:
    try:
        return solver.SolveConfig(restarts=args.restarts, max_iters=args.max_iters, tol=args.tol,
                                  seed=args.seed, threads=args.threads)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_minor(args):
    g = _load_graph(args.graph)
    if args.k4_free:
        return {"k4_minor_free": minors.is_k4_minor_free(g)}, 0
    if args.pattern_file:
        h, name = _load_graph(args.pattern_file), args.pattern_file
    elif args.pattern:
        h, name = graph.pattern_graph(args.pattern), args.pattern
    else:
        raise UsageError("minor needs --pattern, --pattern-file or --k4-free")
    found, model = minors.has_minor(g, h, args.budget)
    return {"has_minor": found, "pattern": name, "model": model.to_json() if model else None}, 0


def cmd_decide(args):
    g = _load_graph(args.graph)
    x, y = _space(args.X), _space(args.Y)
    v = decider.decide(g, x, y, args.budget)
    return {"X": str(x), "Y": str(y), "verdict": v.to_json()}, DECIDE_CODES[v.status]


def cmd_independent(args):
    g = _load_graph(args.graph)
    sp = _space(args.space)
    res = rigidity.independence_search(g, sp, args.trials, args.tol, args.seed,
                                       threads=args.threads)
    return {
        "independent": res.independent,
        # a positive answer is certified by its witness; a negative one is not a proof
        "evidence": "certificate" if res.independent else "evidence",
        "trials": res.trials,
        "best_rank": res.best_rank,
        "edges": g.m,
        "witness": _points(res.witness) if res.witness is not None else None,
    }, 0


def cmd_forests(args):
    g = _load_graph(args.graph)
    parts = rigidity.forest_partition(g, args.d)
    return {"d": args.d, "partition": [[list(e) for e in p] for p in parts] if parts is not None else None}, 0


def cmd_edm(args):
    if args.action == "certificate":
        if not args.target:
            raise UsageError("edm certificate needs a name (W4 or K4eK4)")
        cert = edm.certificate(args.target)
        return {"action": "certificate", "graph": cert.graph.to_json(), "matrix": cert.matrix.to_json(),
                "lengths": lengths_json(cert.lengths),
                "completed_entries": [list(e) for e in cert.completed_entries()],
                "is_edm": edm.is_edm(cert.matrix)}, 0
    path = args.matrix or args.target
    if not path:
        raise UsageError(f"edm {args.action} needs --matrix FILE")
    m = edm.ExactMatrix.from_json(_load(path))
    if args.action == "check":
        out = {"action": "check", "is_edm": edm.is_edm(m)}
        if m.n >= 2:
            out["schoenberg"] = edm.schoenberg_transform(m).to_json()
        return out, 0
    pts = edm.edm_realize(m, args.tol)
    return {"action": "realize", "is_edm": True, "points": _points(pts)}, 0


def cmd_embed_frechet(args):
    data = _load(args.metric)
    rows = data["entries"] if isinstance(data, dict) else data
    pts = spaces.frechet_embed(rows)
    return {"points": _points(pts), "dim": len(pts)}, 0


def cmd_norlander(args):
    p = _exponent(args.p)
    lo, hi = spaces.norlander_range(p, args.eps, args.samples)
    return {"p": _num(p), "eps": args.eps, "lo": lo, "hi": hi, "reference": math.sqrt(4 - args.eps ** 2)}, 0


def cmd_solve(args):
    g = _load_graph(args.graph)
    sp = _space(args.space)
    target = _load_lengths(args.lengths)
    real, res = solver.solve_realization(g, sp, target, _cfg(args))
    return {"space": str(sp), "residual": res, "realization": _points(real),
            "evidence": "realization found" if res < args.tol else "no realization found (evidence, not proof)"}, 0


def cmd_sweep(args):
    g = _load_graph(args.graph)
    x = _space(args.X)
    grid = [_exponent(t) for t in args.grid.split(",") if t.strip()]
    rows = solver.p_sweep(g, x, grid, _cfg(args), samples=args.samples)
    return {"X": str(x), "results": [{"p": _num(p), "residual": r} for p, r in rows],
            "evidence": "empirical residuals; large values are evidence, not proof"}, 0


def cmd_explain(args):
    if args.verdict:
        data = _load(args.verdict)
        try:
            v = decider.Verdict.from_json(data.get("verdict", data))
        except (AttributeError, KeyError, TypeError, ValueError) as exc:
            raise DataError(f"not a verdict document: {exc}") from exc
    elif args.graph and args.X and args.Y:
        v = decider.decide(_load_graph(args.graph), _space(args.X), _space(args.Y), args.budget)
    else:
        raise UsageError("explain needs --verdict FILE or --graph/--X/--Y")
    return {"text": decider.explain(v), "verdict": v.to_json()}, 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="flatgraph", description="Graph flattenability between lp spaces.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, func, help):
        p = sub.add_parser(name, help=help)
        p.set_defaults(func=func)
        return p

    def solver_opts(p):
        p.add_argument("--restarts", type=int, default=20)
        p.add_argument("--max-iters", type=int, default=3000)
        p.add_argument("--tol", type=float, default=1e-9)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--threads", type=int, default=1)

    p = add("minor", cmd_minor, "minor containment / K4-minor-freeness")
    p.add_argument("--graph", required=True)
    p.add_argument("--pattern")
    p.add_argument("--pattern-file")
    p.add_argument("--k4-free", action="store_true")
    p.add_argument("--budget", type=int, default=minors.DEFAULT_BUDGET)

    p = add("decide", cmd_decide, "flattenability verdict")
    p.add_argument("--graph", required=True)
    p.add_argument("--X", required=True)
    p.add_argument("--Y", required=True)
    p.add_argument("--budget", type=int, default=minors.DEFAULT_BUDGET)

    p = add("independent", cmd_independent, "numeric rigidity-matroid independence")
    p.add_argument("--graph", required=True)
    p.add_argument("--space", required=True)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--tol", type=float, default=rigidity.RANK_RTOL)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)

    p = add("forests", cmd_forests, "partition edges into d forests")
    p.add_argument("--graph", required=True)
    p.add_argument("--d", type=int, required=True)

    p = add("edm", cmd_edm, "Euclidean distance matrices")
    p.add_argument("action", choices=["check", "realize", "certificate"])
    p.add_argument("target", nargs="?", help="certificate name, or matrix file")
    p.add_argument("--matrix")
    p.add_argument("--tol", type=float, default=1e-9)

    p = add("embed-frechet", cmd_embed_frechet, "isometric embedding of a metric into linf^n")
    p.add_argument("--metric", required=True)

    p = add("norlander", cmd_norlander, "sampled range of |a+b| for unit pairs with |a-b| = eps")
    p.add_argument("--p", required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--samples", type=int, default=720)

    p = add("solve", cmd_solve, "search for a realization with given edge lengths")
    p.add_argument("--graph", required=True)
    p.add_argument("--space", required=True)
    p.add_argument("--lengths", required=True)
    solver_opts(p)

    p = add("sweep", cmd_sweep, "residuals of flattening random lp realizations over a grid of p")
    p.add_argument("--graph", required=True)
    p.add_argument("--X", required=True)
    p.add_argument("--grid", required=True)
    p.add_argument("--samples", type=int, default=3)
    solver_opts(p)

    p = add("explain", cmd_explain, "human-readable account of a verdict")
    p.add_argument("--verdict")
    p.add_argument("--graph")
    p.add_argument("--X")
    p.add_argument("--Y")
    p.add_argument("--budget", type=int, default=minors.DEFAULT_BUDGET)
    return parser


def run(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout

    def emit(doc: dict):
        out.write(json.dumps(doc, indent=2) + "\n")

    def fail(message: str, code: int) -> int:
        emit({"schema_version": SCHEMA_VERSION, "error": message, "exit_code": code})
        return code

    try:
        args = build_parser().parse_args(argv)
        if not getattr(args, "func", None):
            raise UsageError("a subcommand is required")
        doc, code = args.func(args)
    except UsageError as exc:
        return fail(str(exc), EX_USAGE)
    except graph.UnknownPatternError as exc:
        return fail(str(exc), EX_USAGE)
    except _DATA_ERRORS as exc:
        return fail(f"{type(exc).__name__}: {exc}", EX_DATAERR)
    except Exception as exc:  # noqa: BLE001
        return fail(f"internal error: {type(exc).__name__}: {exc}", EX_SOFTWARE)
    emit({"schema_version": SCHEMA_VERSION, "command": args.command, **doc})
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
