"""Command-line front end: one graph file in, one JSON document out.

Exit status 0 on success, 2 when a precondition fails (bad input, dimension
beyond a pole, non-primitive subgraph), 1 on any other failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import __version__
from .corpus import exhaustive, random_corpus
from .filk import genus_lines, nice_crossings, rosette, spanning_tree
from .numeric import integrate_graph, integrate_renormalized
from .parametric import check_factorization, check_inverse_block, hu, leading_terms, ring_for
from .power_counting import analyticity_strip, classify, fmt_rational, poles
from .renormalization import forests, renormalized_blueprint
from .ribbon import (
    Ext,
    LineEnd,
    RibbonGraph,
    load_graph,
    subgraph,
    topology,
    validate,
)


class UsageError(ValueError):
    pass


def _relabel(g: RibbonGraph) -> RibbonGraph:
    """Line ids -> 1..L and leg ids -> 1..N, keeping their relative order."""
    lmap = {l: k for k, l in enumerate(sorted(g.line_ids), 1)}
    emap = {e: k for k, e in enumerate(sorted(g.ext_ids), 1)}
    verts = tuple(
        tuple(LineEnd(lmap[a.line], a.end) if isinstance(a, LineEnd) else Ext(emap[a.ext]) for a in v)
        for v in g.vertices
    )
    return RibbonGraph(verts, g.root)


def parse_graph_file(path: str) -> RibbonGraph:
    """Load, relabel and validate a graph file.  Vertices of any even valence
    are accepted so that quotient graphs can be read back."""
    g = _relabel(load_graph(path))
    validate(g, strict=False).raise_if_invalid()
    return g


def _with_root(g: RibbonGraph, root) -> RibbonGraph:
    if root is None:
        return g
    if not 0 <= root < g.n:
        raise UsageError(f"root {root} out of range 0..{g.n - 1}")
    return g.with_root(root)


def _lines(g: RibbonGraph, text: str | None, required: bool = True) -> list[int]:
    if text is None:
        if required:
            raise UsageError("--subgraph is required")
        return list(g.line_ids)
    try:
        ids = sorted({int(x) for x in text.split(",") if x.strip()})
    except ValueError as exc:
        raise UsageError(f"bad --subgraph list {text!r}") from exc
    if not ids:
        raise UsageError("--subgraph is empty")
    return ids


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a rational or decimal number: {text!r}") from exc


# ---------------------------------------------------------------------------
# commands


def cmd_topology(args, g):
    out = {"topology": topology(g).as_dict(), "root": g.root}
    if args.rosette:
        tree = spanning_tree(g)
        r = rosette(g, tree)
        out["rosette"] = {
            "tree": sorted(tree),
            "word": r.word_string(),
            "loop_lines": sorted(r.loop_lines),
            "crossings": sorted(sorted(p) for p in r.crossing_pairs),
            "nice_crossings": sorted(sorted(p) for p in nice_crossings(r)),
            "genus_lines": sorted(genus_lines(r)),
        }
    return out


def cmd_hu(args, g):
    p = hu(g, args.method, ring_for(g))
    e, lead = leading_terms(p, g.line_ids)
    return {
        "method": args.method,
        "polynomial": str(p),
        "leading": {"rho_exponent": e, "polynomial": str(lead)},
        "root": g.root,
    }


def cmd_leading(args, g):
    lines = _lines(g, args.subgraph, required=False)
    e, part = leading_terms(hu(g, args.method, ring_for(g)), lines)
    return {"subgraph": lines, "rho_exponent": e, "leading": str(part), "root": g.root}


def cmd_factorize(args, g):
    rep = check_factorization(g, subgraph(g, _lines(g, args.subgraph)))
    return {
        "factorizes": rep.holds,
        "subgraph": _lines(g, args.subgraph),
        "rho_exponent": rep.exponent,
        "expected_exponent": rep.expected_exponent,
        "lhs": str(rep.lhs),
        "rhs": str(rep.rhs),
        "subgraph_leading": str(rep.subgraph_leading),
        "quotient_hu": str(rep.quotient_hu),
        "quotient": rep.quotient.to_json(),
    }


def cmd_inverse_block(args, g):
    rep = check_inverse_block(g, subgraph(g, _lines(g, args.subgraph)))
    return {
        "holds": rep.holds,
        "subgraph": _lines(g, args.subgraph),
        "indices": list(rep.indices),
        "mismatches": list(rep.mismatches),
        "divergent": list(rep.divergent),
    }


def cmd_divergences(args, g):
    rep = classify(g)
    return {
        "subgraphs": [s.as_dict() for s in rep.subgraphs],
        "primitive": [sorted(s.lines) for s in rep.primitive],
        "analyticity": analyticity_strip(rep).as_dict(),
        "poles": poles(rep).as_dict(),
    }


def cmd_poles(args, g):
    return {"poles": [fmt_rational(p) for p in poles(classify(g)).locations()]}


def cmd_forests(args, g):
    rep = classify(g)
    fs = forests(rep)
    return {
        "primitive": [sorted(s.lines) for s in rep.primitive],
        "forests": [sorted(sorted(x) for x in f) for f in fs],
        "count": len(fs),
    }


def cmd_renorm_plan(args, g):
    return renormalized_blueprint(g).as_dict()


def cmd_integrate(args, g):
    if args.dim is None:
        raise UsageError("--dim is required")
    D = _fraction(args.dim)
    s = _fraction(args.s)
    if args.renormalized:
        res = integrate_renormalized(g, D, s, args.rel_tol)
    else:
        res = integrate_graph(g, D, s, args.rel_tol)
    res.settings["s"] = fmt_rational(s)
    res.settings["renormalized"] = bool(args.renormalized)
    return res.as_dict()


def cmd_gen_corpus(args):
    if args.seed is None:
        if args.max_lines > 6:
            raise UsageError("exhaustive mode supports --max-lines up to 6")
        graphs = exhaustive(args.max_lines)
    else:
        graphs = random_corpus(args.count, args.max_lines, args.seed)
    if args.out is None:
        return {"count": len(graphs), "graphs": [g.to_json() for g in graphs]}
    os.makedirs(args.out, exist_ok=True)
    width = max(4, len(str(len(graphs))))
    files = []
    for k, g in enumerate(graphs, 1):
        path = os.path.join(args.out, f"graph_{k:0{width}d}.json")
        with open(path, "w") as fh:
            fh.write(g.dumps() + "\n")
        files.append(path)
    return {"count": len(graphs), "files": files}


GRAPH_COMMANDS = {
    "topology": cmd_topology,
    "hu": cmd_hu,
    "leading": cmd_leading,
    "factorize": cmd_factorize,
    "inverse-block": cmd_inverse_block,
    "divergences": cmd_divergences,
    "poles": cmd_poles,
    "forests": cmd_forests,
    "renorm-plan": cmd_renorm_plan,
    "integrate": cmd_integrate,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ncpoly", description="Non-commutative Symanzik polynomials of ribbon graphs.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pretty", action="store_true", help="indent the JSON output")
    for name in GRAPH_COMMANDS:
        c = sub.add_parser(name, parents=[common])
        c.add_argument("graph", help="graph JSON file")
        c.add_argument("--root", type=int, default=None, help="root vertex id (default: the file's root)")
        if name in ("hu", "leading"):
            c.add_argument("--method", choices=("det", "pfaffian"), default="det")
        if name in ("leading", "factorize", "inverse-block"):
            c.add_argument("--subgraph", default=None, help="comma separated line ids")
        if name == "topology":
            c.add_argument("--rosette", action="store_true", help="include the rosette of the BFS tree")
        if name == "integrate":
            c.add_argument("--dim", default=None, help="dimension D, rational or decimal")
            c.add_argument("--rel-tol", type=float, default=1e-6)
            c.add_argument("--renormalized", action="store_true")
            c.add_argument("--s", default="1", help="value of s (default 1)")
    g = sub.add_parser("gen-corpus", parents=[common])
    g.add_argument("--max-lines", type=int, required=True)
    g.add_argument("--seed", type=int, default=None, help="random mode with this seed; exhaustive when omitted")
    g.add_argument("--count", type=int, default=50, help="graphs in random mode")
    g.add_argument("--out", default=None, help="directory for one file per graph")
    return p


def run(argv=None) -> tuple[int, dict]:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "gen-corpus":
            out = cmd_gen_corpus(args)
        else:
            g = _with_root(parse_graph_file(args.graph), args.root)
            out = GRAPH_COMMANDS[args.command](args, g)
        return 0, out
    except (ValueError, OSError) as exc:
        # format, validation, usage and convergence errors are all ValueErrors
        return 2, {"error": str(exc), "kind": type(exc).__name__}
    except Exception as exc:  # noqa: BLE001
        return 1, {"error": str(exc), "kind": type(exc).__name__}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    code, out = run(argv)
    pretty = "--pretty" in argv
    text = json.dumps(out, indent=2 if pretty else None, sort_keys=False)
    print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
