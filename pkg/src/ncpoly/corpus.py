"""Enumeration of connected orientable quartic ribbon graphs.

Graphs are grown one line at a time, either by joining two legs of
opposite sign or by hanging a new vertex on a leg.  Every connected graph
arises this way (remove a cycle line, or a line to a leaf vertex), and
duplicates are dropped by a canonical code of the combinatorial map.
"""

from __future__ import annotations

import random
from typing import Iterator

from .ribbon import Ext, LineEnd, RibbonGraph, corner_sign


def _darts(g: RibbonGraph):
    return [(v, p) for v in range(g.n) for p in range(1, len(g.vertices[v]) + 1)]


def canonical_code(g: RibbonGraph) -> tuple:
    """Breadth-first relabelling of darts, minimized over "+" starting darts.

    Invariant under vertex renumbering, sign-preserving rotations and
    line/leg relabelling.  Assumes a connected graph.
    """
    alpha = g.alpha()
    sizes = [len(v) for v in g.vertices]
    best = None
    for start in _darts(g):
        if corner_sign(start[1]) < 0:
            continue
        label = {start: 0}
        order = [start]
        k = 0
        while k < len(order):
            d = order[k]
            k += 1
            for nb in ((d[0], d[1] % sizes[d[0]] + 1), alpha[d]):
                if nb not in label:
                    label[nb] = len(order)
                    order.append(nb)
        code = tuple((label[(d[0], d[1] % sizes[d[0]] + 1)], label[alpha[d]]) for d in order)
        if best is None or code < best:
            best = code
    return best


def _from_words(words) -> RibbonGraph:
    """Words of ("L", id) / ("E",) corners -> graph with src on the "-" end."""
    verts = []
    for w in words:
        out = []
        for p, c in enumerate(w, 1):
            if c[0] == "L":
                out.append(LineEnd(c[1], "src" if corner_sign(p) < 0 else "tgt"))
            else:
                out.append(Ext(0))
        verts.append(out)
    k = 0
    for w in verts:
        for i, a in enumerate(w):
            if isinstance(a, Ext):
                k += 1
                w[i] = Ext(k)
    return RibbonGraph(tuple(tuple(w) for w in verts), 0).normalized()


def _words(g: RibbonGraph):
    return [[("L", a.line) if isinstance(a, LineEnd) else ("E",) for a in v] for v in g.vertices]


def _children(g: RibbonGraph) -> Iterator[RibbonGraph]:
    words = _words(g)
    new = max(g.line_ids, default=0) + 1
    legs = [(v, p) for v in range(g.n) for p in range(1, 5) if words[v][p - 1][0] == "E"]
    for a in range(len(legs)):
        for b in range(a + 1, len(legs)):
            (va, pa), (vb, pb) = legs[a], legs[b]
            if corner_sign(pa) != corner_sign(pb):
                w = [list(x) for x in words]
                w[va][pa - 1] = ("L", new)
                w[vb][pb - 1] = ("L", new)
                yield _from_words(w)
    for v, p in legs:
        w = [list(x) for x in words]
        w[v][p - 1] = ("L", new)
        fresh = [("E",)] * 4
        fresh[0 if corner_sign(p) < 0 else 1] = ("L", new)
        w.append(fresh)
        yield _from_words(w)


def exhaustive(max_lines: int) -> list[RibbonGraph]:
    """All connected orientable quartic graphs with ``1 <= L <= max_lines``,
    one per isomorphism class, in a deterministic order."""
    level = {canonical_code(g): g for g in [_from_words([[("E",)] * 4])]}
    out = []
    for _ in range(max_lines):
        nxt = {}
        for code in sorted(level):
            for child in _children(level[code]):
                c = canonical_code(child)
                if c not in nxt:
                    nxt[c] = child
        level = nxt
        out.extend(level[c] for c in sorted(level))
    return out


def random_graph(rng: random.Random, lines: int, max_vertices: int | None = None) -> RibbonGraph:
    """Grow a random connected graph with exactly ``lines`` lines."""
    g = _from_words([[("E",)] * 4])
    while g.L < lines:
        # closing the last leg early would leave nothing to grow from
        kids = [k for k in _children(g) if k.ext_ids or k.L == lines]
        if max_vertices is not None and g.n >= max_vertices:
            kids = [k for k in kids if k.n == g.n] or kids
        g = rng.choice(kids)
    return g


def random_corpus(count: int, max_lines: int, seed: int, min_lines: int = 1, max_vertices: int | None = None):
    rng = random.Random(seed)
    return [random_graph(rng, rng.randint(min_lines, max_lines), max_vertices) for _ in range(count)]


# ---------------------------------------------------------------------------
# insertions of primitive pieces


def _leg_order(piece: RibbonGraph) -> list[int]:
    """Leg ids of ``piece`` in the cyclic order of its one-vertex quotient."""
    from .ribbon import quotient, subgraph

    q = quotient(piece, subgraph(piece, piece.line_ids))
    return [a.ext for a in q.vertices[0]]


def _place(piece: RibbonGraph, offset: int, legs: dict[int, object]) -> list[tuple]:
    out = []
    for v in piece.vertices:
        out.append(
            tuple(LineEnd(a.line + offset, a.end) if isinstance(a, LineEnd) else legs[a.ext] for a in v)
        )
    return out


def insert_at_vertex(host: RibbonGraph, vertex: int, piece: RibbonGraph) -> tuple[RibbonGraph, frozenset[int]]:
    """Replace a four-corner vertex of ``host`` by a four-point ``piece``.

    The piece's legs take over the vertex's corners so that shrinking the
    piece gives the vertex back.  Returns the graph and the piece's lines.
    """
    order = _leg_order(piece)
    word = host.vertices[vertex]
    if len(order) != len(word):
        raise ValueError(f"piece has {len(order)} legs, vertex {vertex} has {len(word)} corners")
    offset = max(host.line_ids, default=0)
    new = _place(piece, offset, dict(zip(order, word)))
    verts = list(host.vertices)
    verts[vertex] = new[0]
    verts.extend(new[1:])
    return RibbonGraph(tuple(verts), host.root), frozenset(l + offset for l in piece.line_ids)


def insert_on_line(host: RibbonGraph, line: int, piece: RibbonGraph) -> tuple[RibbonGraph, frozenset[int]]:
    """Cut ``line`` and splice in a two-point ``piece``.

    ``line`` keeps its "-" end and enters the piece; a new line leaves the
    piece toward the old "+" end.
    """
    order = _leg_order(piece)
    if len(order) != 2:
        raise ValueError("piece must have two legs")
    offset = max(host.line_ids)
    out_line = offset + max(piece.line_ids) + 1
    plus_leg, minus_leg = order  # the quotient word starts on a "+" corner
    legs = {plus_leg: LineEnd(line, "tgt"), minus_leg: LineEnd(out_line, "src")}
    verts = []
    for v in host.vertices:
        verts.append(
            tuple(LineEnd(out_line, "tgt") if a == LineEnd(line, "tgt") else a for a in v)
        )
    verts.extend(_place(piece, offset, legs))
    return RibbonGraph(tuple(verts), host.root), frozenset(l + offset for l in piece.line_ids)
