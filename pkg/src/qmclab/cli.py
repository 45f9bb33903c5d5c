"""Command-line entry point: `qmclab <subcommand> [flags]`.

Every run writes one JSON document (schema qmclab/1) or, for flat tables, CSV.
Exit codes: 0 success, 2 a check reported violations, 1 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .errors import QmclabError
from .fourier import (BooleanVectorFunction, dictator_test_parameters, embedded_dictator, hypercube_value,
                      influences, majority, notable_coordinates, random_function, stab)
from .graph import WeightedGraph, bh_error_bound, bh_stats, read_graph, write_graph
from .instances import (identity_ug_instance, noisy_hypercube, random_graph, read_ug,
                        standard_graph, ug_dictator_assignment, ug_reduction_graph)
from .quantum import build_hamiltonian, max_energy, product_state_value
from .rounding import empirical_rounding_ratio, hypercube_gap
from .sdp import PROD, UnitVectorAssignment, graph_value, objective, solve_vector_program
from .special import all_constants, find_alpha_rho
from .spherical import borell_nk_check, candidate_library, check_key_lemma, alpha_of

SCHEMA = "qmclab/1"


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    """ArgumentParser that exits with status 1 on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# ---- output -----------------------------------------------------------------

def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set)):
        items = sorted(obj) if isinstance(obj, set) else obj
        return [_jsonable(v) for v in items]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        body = ",\n".join(f"{pad}{json.dumps(k)}: {dumps(v, indent, _level + 1)}" for k, v in obj.items())
        return "{\n" + body + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        body = ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj)
        return "[\n" + body + "\n" + end + "]"
    if isinstance(obj, float):
        if math.isnan(obj) or math.isinf(obj):
            return "null"
        text = format(obj, ".17g")
        return text if any(c in text for c in ".en") else text + ".0"
    return json.dumps(obj)


def to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    fields = list(rows[0])
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: format(v, ".17g") if isinstance(v, float) else v for k, v in row.items()})
    return buf.getvalue()


def envelope(command: str, args, result: dict, chunk_count: int = 1) -> dict:
    return {"schema": SCHEMA, "command": command,
            "metadata": {"seed": args.seed, "chunk_count": chunk_count, "version": __version__,
                         "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())},
            "result": result}


def emit(args, doc: dict, table: list[dict] | None = None) -> None:
    if args.format == "csv":
        if table is None:
            raise UsageError(f"{doc['command']} has no flat table; use --format json")
        text = to_csv(table)
    else:
        text = dumps(_jsonable(doc)) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


# ---- graph specs ------------------------------------------------------------

def load_graph(spec: str) -> WeightedGraph:
    """single_edge | complete:N | cycle:N | hypercube:n:rho[:noloops] | random:n:p:seed | file path."""
    parts = spec.split(":")
    try:
        if spec == "single_edge":
            return standard_graph("single_edge")
        if parts[0] in ("complete", "cycle") and len(parts) == 2:
            return standard_graph(parts[0], int(parts[1]))
        if parts[0] == "hypercube" and len(parts) in (3, 4):
            loops = not (len(parts) == 4 and parts[3] == "noloops")
            return noisy_hypercube(int(parts[1]), float(parts[2]), loops=loops)
        if parts[0] == "random" and len(parts) == 4:
            return random_graph(int(parts[1]), float(parts[2]), np.random.default_rng(int(parts[3])))
    except ValueError as exc:
        raise UsageError(f"bad graph spec {spec!r}: {exc}") from None
    path = Path(spec)
    if not path.exists():
        raise UsageError(f"graph spec {spec!r} is neither a known family nor a file")
    return read_graph(path)


# ---- subcommands ------------------------------------------------------------

def cmd_constants(args):
    reports = all_constants(args.grid_step, args.refine_tol)
    for k in args.extra_k or []:
        reports.append(find_alpha_rho("kMC", k, args.grid_step, args.refine_tol))
    rows = [{"kind": r.kind, "k": r.k, "alpha": r.alpha, "rho_star": r.rho_star} for r in reports]
    if args.curve:
        rep = find_alpha_rho(args.curve, args.curve_k, args.grid_step, args.refine_tol)
        table = [{"rho": x, "ratio": y} for x, y in rep.grid]
        return envelope("constants", args, {"curve": rep.kind, "rows": table}), table, 0
    return envelope("constants", args, {"constants": rows}), rows, 0


def cmd_solve_sdp(args):
    g = load_graph(args.graph)
    obj = objective(args.objective)
    sol = solve_vector_program(g, obj, r=args.rank, tol=args.tol, restarts=args.restarts, seed=args.seed)
    result = {"objective": obj.kind, "value": sol.value, "iterations": sol.iterations,
              "residual": sol.residual, "n": g.n, "rank": sol.assignment.r}
    if args.assignment_out:
        Path(args.assignment_out).write_text(sol.assignment.to_json())
        result["assignment_path"] = args.assignment_out
    return envelope("solve-sdp", args, result), None, 0


def cmd_round(args):
    g = load_graph(args.graph)
    obj = objective(args.objective)
    sol = None
    if args.assignment:
        sol = UnitVectorAssignment.from_json(Path(args.assignment).read_text())
    rep = empirical_rounding_ratio(g, obj, args.k, args.trials, seed=args.seed, solution=sol,
                                   graph_id=args.graph)
    return envelope("round", args, rep.to_dict(), chunk_count=args.trials), [rep.to_dict()], 0


def cmd_exact_diag(args):
    g = load_graph(args.graph)
    h = build_hamiltonian(g)
    value, psi = max_energy(h, args.method, tol=args.tol, seed=args.seed)
    result = {"max_energy": value, "n": g.n, "method": args.method}
    if args.state_out:
        rows = [{"index": i, "re": float(np.real(a)), "im": float(np.imag(a))}
                for i, a in enumerate(psi) if abs(a) > 1e-14]
        Path(args.state_out).write_text(to_csv(rows))
        result["state_path"] = args.state_out
    return envelope("exact-diag", args, result), None, 0


def cmd_prod_opt(args):
    g = load_graph(args.graph)
    value, f = product_state_value(g, restarts=args.restarts, seed=args.seed)
    result = {"product_value": value, "n": g.n, "bloch": f.to_dict()}
    return envelope("prod-opt", args, result), None, 0


def cmd_gap_instance(args):
    """Dictator, identity-SDP and rounding values on the loop-free noisy hypercube."""
    rep = hypercube_gap(args.n, args.rho, args.k, args.trials, seed=args.seed)
    result = rep.to_dict()
    return envelope("gap-instance", args, result, chunk_count=args.trials), None, 0 if rep.passed else 2


def cmd_ug_reduce(args):
    if args.ug:
        inst = read_ug(args.ug)
    else:
        inst = identity_ug_instance(args.left, args.right, args.labels)
    g = ug_reduction_graph(inst, args.rho, loops=not args.no_loops)
    result = {"vertices": g.n, "edges": g.edge_count, "M": inst.M, "rho": args.rho,
              "loops": not args.no_loops}
    if not args.ug or args.labeling == "identity":
        labeling = {v: 1 for v in inst.left + inst.right}
        rows = ug_dictator_assignment(inst, labeling, k=3)
        result["dictator_value"] = graph_value(g, rows, PROD)
        result["completeness_target"] = 0.25 - args.rho / 4.0
    if args.graph_out:
        write_graph(g, args.graph_out)
        result["graph_path"] = args.graph_out
    return envelope("ug-reduce", args, result), None, 0


def _function_from_spec(spec: str, n: int, k: int, seed: int) -> BooleanVectorFunction:
    parts = spec.split(":")
    if parts[0] == "dictator":
        return embedded_dictator(n, k, int(parts[1]) if len(parts) > 1 else 1)
    if parts[0] == "majority":
        m = majority(n, 1)
        t = np.zeros((1 << n, k))
        t[:, 0] = m.table[:, 0]
        return BooleanVectorFunction(n, t, True, f"maj{n}")
    if parts[0] == "random":
        s = int(parts[1]) if len(parts) > 1 else seed
        return random_function(n, k, np.random.default_rng(s))
    path = Path(spec)
    if path.exists():
        table = np.loadtxt(path, delimiter=",", ndmin=2)
        bits = int(round(math.log2(len(table))))
        return BooleanVectorFunction(bits, table, True, path.name)
    raise UsageError(f"unknown function spec {spec!r}")


def cmd_dictator_test(args):
    f = _function_from_spec(args.function, args.n, args.k, args.seed)
    s = stab(f, args.rho)
    notables = notable_coordinates(f, args.m, args.delta)
    result = {"function": f.name, "n": f.n, "k": f.k, "rho": args.rho, "stab": s,
              "hypercube_value": hypercube_value(f, args.rho), "influences": influences(f).tolist(),
              "low_degree_influences": influences(f, args.m).tolist(), "notables": sorted(notables),
              "m": args.m, "delta": args.delta}
    if args.eps is not None:
        result["parameters"] = dictator_test_parameters(args.eps, args.rho, args.k, args.c_k).to_dict()
    return envelope("dictator-test", args, result), None, 0


def cmd_gegenbauer_check(args):
    rep = check_key_lemma(alpha_of(args.n), args.dmax, args.grid_step)
    return envelope("gegenbauer-check", args, rep.to_dict()), None, 0 if rep.passed else 2


def cmd_borell_check(args):
    names = args.candidates.split(",") if args.candidates else None
    rep = borell_nk_check(args.n, args.rho, names, args.samples, args.seed)
    ok = rep.passed and rep.opt_matches_f_star
    table = [{"candidate": k, **v} for k, v in rep.candidates.items()]
    return envelope("borell-check", args, rep.to_dict()), table, 0 if ok else 2


def cmd_bh_bound(args):
    g = load_graph(args.graph)
    st = bh_stats(g)
    result = {"n": st.n, "p_max": st.p_max, "a_max": st.a_max, "bound": bh_error_bound(st)}
    if args.compare:
        lam, _ = max_energy(build_hamiltonian(g), "dense" if g.n <= 12 else "iterative", seed=args.seed)
        prod, _ = product_state_value(g, seed=args.seed)
        result.update(max_energy=lam, product_value=prod, gap=lam - prod,
                      within_bound=lam - prod <= result["bound"] + 1e-9)
        code = 0 if result["within_bound"] else 2
    else:
        code = 0
    return envelope("bh-bound", args, result), None, code


def build_parser() -> Parser:
    def global_flags(suppress: bool) -> Parser:
        # subcommands accept the same flags; SUPPRESS keeps them from clobbering top-level values
        d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        g = Parser(add_help=False)
        g.add_argument("--seed", type=int, default=d(0), help="RNG seed (default 0)")
        g.add_argument("--out", default=d(None), help="write output here instead of stdout")
        g.add_argument("--format", choices=("json", "csv"), default=d("json"))
        return g

    common = global_flags(True)
    p = Parser(prog="qmclab", description=__doc__.splitlines()[0], parents=[global_flags(False)])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=Parser)

    def add(name, fn, help_text):
        sp = sub.add_parser(name, help=help_text, description=help_text, parents=[common])
        sp.set_defaults(func=fn)
        return sp

    sp = add("constants", cmd_constants, "worst-case rounding ratios and their minimizers")
    sp.add_argument("--grid-step", type=float, default=1e-3)
    sp.add_argument("--refine-tol", type=float, default=1e-8)
    sp.add_argument("--extra-k", type=int, nargs="*", help="also report kMC for these k")
    sp.add_argument("--curve", choices=("1MC", "2MC", "BOV", "GP", "kMC"), help="emit this ratio curve")
    sp.add_argument("--curve-k", type=int, default=None, help="rank for --curve kMC")

    graph_help = "single_edge | complete:N | cycle:N | hypercube:n:rho[:noloops] | random:n:p:seed | path"
    sp = add("solve-sdp", cmd_solve_sdp, "solve the vector relaxation by sphere coordinate ascent")
    sp.add_argument("--graph", required=True, help=graph_help)
    sp.add_argument("--objective", default="QMC", help="MC, PROD or QMC")
    sp.add_argument("--rank", type=int, default=None, help="vector dimension (default |V|)")
    sp.add_argument("--restarts", type=int, default=5)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--assignment-out", help="save the unit-vector assignment as JSON")

    sp = add("round", cmd_round, "empirical projection-rounding ratio")
    sp.add_argument("--graph", required=True, help=graph_help)
    sp.add_argument("--objective", default="PROD")
    sp.add_argument("--k", type=int, default=3)
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--assignment", help="JSON assignment to round (default: solve first)")

    sp = add("exact-diag", cmd_exact_diag, "maximum energy of the Quantum Max-Cut Hamiltonian")
    sp.add_argument("--graph", required=True, help=graph_help)
    sp.add_argument("--method", choices=("dense", "iterative"), default="dense")
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--state-out", help="dump the top eigenvector as index,re,im CSV")

    sp = add("prod-opt", cmd_prod_opt, "best product state by Bloch-vector ascent")
    sp.add_argument("--graph", required=True, help=graph_help)
    sp.add_argument("--restarts", type=int, default=5)

    sp = add("gap-instance", cmd_gap_instance, "dictator, SDP and rounding values on the noisy hypercube")
    sp.add_argument("--n", type=int, default=10)
    sp.add_argument("--rho", type=float, default=None, help="default: the BOV minimizer")
    sp.add_argument("--k", type=int, default=3)
    sp.add_argument("--trials", type=int, default=200)

    sp = add("ug-reduce", cmd_ug_reduce, "build the reduction graph of a Unique Games instance")
    sp.add_argument("--ug", help="instance file (default: identity instance)")
    sp.add_argument("--left", type=int, default=4)
    sp.add_argument("--right", type=int, default=4)
    sp.add_argument("--labels", type=int, default=3)
    sp.add_argument("--rho", type=float, default=-0.584)
    sp.add_argument("--no-loops", action="store_true")
    sp.add_argument("--labeling", choices=("identity", "none"), default="none",
                    help="evaluate the label-1 dictator assignment on a file instance")
    sp.add_argument("--graph-out", help="write the reduction graph here")

    sp = add("dictator-test", cmd_dictator_test, "noise stability and influences of a Boolean function")
    sp.add_argument("--function", default="dictator:1", help="dictator:i | majority | random[:seed] | CSV table")
    sp.add_argument("--n", type=int, default=5)
    sp.add_argument("--k", type=int, default=3)
    sp.add_argument("--rho", type=float, default=-0.584)
    sp.add_argument("--m", type=int, default=3, help="degree cap for low-degree influence")
    sp.add_argument("--delta", type=float, default=0.1, help="notable-coordinate threshold")
    sp.add_argument("--eps", type=float, default=None, help="also report soundness parameters")
    sp.add_argument("--c-k", type=float, default=1.0)

    sp = add("gegenbauer-check", cmd_gegenbauer_check, "check |nu_d| < -nu_1 on a grid")
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--dmax", type=int, default=10)
    sp.add_argument("--grid-step", type=float, default=1e-3)

    sp = add("borell-check", cmd_borell_check, "noise stability of candidate maps against x/|x|")
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--rho", type=float, default=-0.584)
    sp.add_argument("--samples", type=int, default=200_000)
    sp.add_argument("--candidates", help="comma list from: " + ",".join(candidate_library(2)))

    sp = add("bh-bound", cmd_bh_bound, "high-degree bound on the product-state gap")
    sp.add_argument("--graph", required=True, help=graph_help)
    sp.add_argument("--compare", action="store_true", help="also compute both sides (small graphs)")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        doc, table, code = args.func(args)
        emit(args, doc, table)
    except UsageError as exc:
        print(f"qmclab: error: {exc}", file=sys.stderr)
        return 1
    except (QmclabError, ValueError) as exc:
        print(f"qmclab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return code


if __name__ == "__main__":
    sys.exit(main())
