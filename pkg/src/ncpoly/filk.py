"""Tree contractions, rosettes and the line-subset conditions built on them."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .ribbon import (
    Ext,
    GraphValidationError,
    LineEnd,
    RibbonGraph,
    corner_sign,
    face_of_darts,
)


def filk_contract(g: RibbonGraph, line: int) -> RibbonGraph:
    """Contract a line hooked to the root, gluing its far vertex into the root.

    The root corner of the line is replaced by the far vertex's remaining
    corners, read cyclically starting just after the glued corner.
    """
    (va, pa), (vb, pb) = g.line_ends()[line]
    if va == vb:
        raise GraphValidationError(f"line {line} is a self-loop and cannot be contracted")
    if g.root == va:
        i, other, j = pa, vb, pb
    elif g.root == vb:
        i, other, j = pb, va, pa
    else:
        raise GraphValidationError(f"line {line} does not touch the root vertex {g.root}")
    r = g.vertices[g.root]
    w = g.vertices[other]
    merged = r[: i - 1] + w[j:] + w[: j - 1] + r[i:]
    verts = []
    root = 0
    for vi, v in enumerate(g.vertices):
        if vi == other:
            continue
        if vi == g.root:
            root = len(verts)
            verts.append(merged)
        else:
            verts.append(v)
    return RibbonGraph(tuple(verts), root)


def is_spanning_tree(g: RibbonGraph, tree: Iterable[int]) -> bool:
    tree = set(tree)
    if len(tree) != g.n - 1 or not tree <= set(g.line_ids):
        return False
    return _connects(g.n, [g.endpoints(l) for l in tree])


def spanning_tree(g: RibbonGraph) -> frozenset[int]:
    """Breadth-first spanning tree from the root, smallest line ids first."""
    ends = g.line_ends()
    adj: dict[int, list[tuple[int, int]]] = {v: [] for v in range(g.n)}
    for l in sorted(ends):
        a, b = ends[l][0][0], ends[l][1][0]
        if a != b:
            adj[a].append((l, b))
            adj[b].append((l, a))
    seen = {g.root}
    tree = set()
    queue = deque([g.root])
    while queue:
        v = queue.popleft()
        for l, w in adj[v]:
            if w not in seen:
                seen.add(w)
                tree.add(l)
                queue.append(w)
    if len(seen) != g.n:
        raise GraphValidationError("graph is disconnected")
    return frozenset(tree)


def spanning_trees(g: RibbonGraph) -> list[frozenset[int]]:
    edges = [l for l in g.line_ids if len(set(g.endpoints(l))) == 2]
    return [frozenset(c) for c in combinations(edges, g.n - 1) if is_spanning_tree(g, c)]


def contraction_order(g: RibbonGraph, tree: Iterable[int]) -> list[int]:
    """Tree lines by increasing distance from the root."""
    tree = sorted(set(tree))
    ends = {l: (e[0][0], e[1][0]) for l, e in g.line_ends().items()}
    order = []
    seen = {g.root}
    queue = deque([g.root])
    while queue:
        v = queue.popleft()
        for l in tree:
            a, b = ends[l]
            w = b if a == v else a if b == v else None
            if w is not None and w not in seen:
                seen.add(w)
                order.append(l)
                queue.append(w)
    return order


@dataclass(frozen=True)
class Rosette:
    """Single vertex left after contracting a spanning tree."""

    graph: RibbonGraph
    tree: frozenset[int]

    @property
    def word(self) -> tuple:
        return self.graph.vertices[0]

    @property
    def loop_lines(self) -> dict[int, tuple[int, int]]:
        """Loop line -> (position of its "-" corner, position of its "+" corner)."""
        pos: dict[int, list[int]] = {}
        for p, a in enumerate(self.word, 1):
            if isinstance(a, LineEnd):
                pos.setdefault(a.line, []).append(p)
        return {l: tuple(sorted(ps, key=corner_sign)) for l, ps in pos.items()}

    @property
    def crossing_pairs(self) -> frozenset[frozenset[int]]:
        loops = {l: sorted(ps) for l, ps in self.loop_lines.items()}
        out = set()
        for a, b in combinations(sorted(loops), 2):
            a1, a2 = loops[a]
            b1, b2 = loops[b]
            if a1 < b1 < a2 < b2 or b1 < a1 < b2 < a2:
                out.add(frozenset((a, b)))
        return frozenset(out)

    def word_string(self) -> str:
        parts = []
        for a in self.word:
            parts.append(f"l{a.line}" if isinstance(a, LineEnd) else f"e{a.ext}")
        return " ".join(parts)


def rosette(g: RibbonGraph, tree: Iterable[int] | None = None, order: Sequence[int] | None = None) -> Rosette:
    """Contract ``tree`` toward the root.

    ``order`` overrides the default breadth-first order; every line in it
    must touch the merged root when its turn comes.
    """
    tree = spanning_tree(g) if tree is None else frozenset(tree)
    if not is_spanning_tree(g, tree):
        raise GraphValidationError(f"{sorted(tree)} is not a spanning tree")
    order = contraction_order(g, tree) if order is None else list(order)
    if sorted(order) != sorted(tree):
        raise GraphValidationError("contraction order must list each tree line once")
    cur = g
    for l in order:
        cur = filk_contract(cur, l)
    return Rosette(cur, tree)


def nice_crossings(r: Rosette) -> frozenset[frozenset[int]]:
    """Crossing pairs where the "+" end of one line directly follows the "-"
    end of the other among the loop-line ends of the word (legs skipped)."""
    ends = [a for a in r.word if isinstance(a, LineEnd)]
    size = len(ends)
    pos: dict[int, dict[str, int]] = {}
    for p, a in enumerate(ends, 1):
        pos.setdefault(a.line, {})[a.end] = p
    out = set()
    for pair in r.crossing_pairs:
        a, b = sorted(pair)
        pa, pb = pos[a], pos[b]
        if pa["tgt"] == pb["src"] % size + 1 or pb["tgt"] == pa["src"] % size + 1:
            out.add(pair)
    return frozenset(out)


def genus_lines(r: Rosette) -> frozenset[int]:
    return frozenset(l for pair in nice_crossings(r) for l in pair)


# ---------------------------------------------------------------------------
# line-subset conditions


def _connects(count: int, edges: Iterable[tuple[int, int]]) -> bool:
    parent = list(range(count))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    comps = count
    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            comps -= 1
    return comps <= 1


def dual_edges(g: RibbonGraph) -> dict[int, tuple[int, int]]:
    """Line -> the two faces it separates."""
    fmap = face_of_darts(g)
    return {l: (fmap[e[0]], fmap[e[1]]) for l, e in g.line_ends().items()}


def contains_dual_tree(g: RibbonGraph, J: Iterable[int]) -> bool:
    de = dual_edges(g)
    return _connects(len(g.faces()), [de[l] for l in J])


def complement_contains_tree(g: RibbonGraph, J: Iterable[int]) -> bool:
    J = set(J)
    return _connects(g.n, [g.endpoints(l) for l in g.line_ids if l not in J])


def is_dual_tree(g: RibbonGraph, J: Iterable[int]) -> bool:
    """``J`` is a spanning tree of the dual graph."""
    J = frozenset(J)
    return len(J) == len(g.faces()) - 1 and contains_dual_tree(g, J)


def admissible(g: RibbonGraph, J: Iterable[int]) -> bool:
    """``J`` is a dual spanning tree and its complement holds a spanning tree."""
    J = frozenset(J)
    return is_dual_tree(g, J) and complement_contains_tree(g, J)


def pseudo_admissible(g: RibbonGraph, J: Iterable[int], l_tilde: int, l2: int) -> bool:
    """Complement of ``J`` is a spanning tree plus ``l2``, the tree avoiding
    both ``l_tilde`` and ``l2``."""
    if l_tilde == l2:
        raise ValueError("l_tilde and l2 must be distinct lines")
    J = frozenset(J)
    rest = set(g.line_ids) - J
    if l2 not in rest or l_tilde in rest:
        return False
    return is_spanning_tree(g, rest - {l2})


def separating_lines(g: RibbonGraph, s_lines: Iterable[int], l_tilde: int) -> list[int]:
    """Loop lines of the rosette of ``S`` that cross or enclose ``l_tilde``.

    ``l_tilde`` is a line outside ``S`` with at least one end on ``S``.  A
    loop line qualifies when one arc of the rosette it cuts holds an end of
    ``l_tilde`` and the other arc holds an external corner of ``S`` that is
    not an end of ``l_tilde``.  Every such line is returned.
    """
    from .ribbon import subgraph

    s = subgraph(g, s_lines)
    if l_tilde in s.lines:
        raise ValueError("l_tilde must lie outside S")
    r = rosette(s.graph)
    marks = []
    for a in r.word:
        if isinstance(a, Ext):
            parent = s.legs[a.ext]
            marks.append("t" if isinstance(parent, LineEnd) and parent.line == l_tilde else "o")
        else:
            marks.append(None)
    if "t" not in marks:
        raise ValueError(f"line {l_tilde} has no end on S")
    out = []
    for l, (p, q) in sorted(r.loop_lines.items()):
        lo, hi = sorted((p, q))
        inner = {m for m in marks[lo : hi - 1] if m}
        outer = {m for m in marks[: lo - 1] + marks[hi:] if m}
        if ("t" in inner and "o" in outer) or ("t" in outer and "o" in inner):
            out.append(l)
    return out
