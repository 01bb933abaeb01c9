"""Orientable Moyal ribbon graphs.

A graph is a list of vertices, each a cyclic word of corners.  A corner is
attached either to one end of an internal line or to an external leg.  The
sign of a corner is fixed by its position, ``(-1)**(position + 1)``, so
positions 1, 3, ... are "+" and 2, 4, ... are "-".

Vertices produced by contractions (rosettes, quotients) may carry any even
number of corners; the alternation of signs is preserved by those
operations, so the positional sign rule stays valid for them.

Faces are the cycles of ``phi = sigma . alpha`` on corners, where ``sigma``
steps to the next corner of the same vertex and ``alpha`` swaps the two ends
of a line (an external leg is a fixed point of ``alpha``).
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence


class GraphFormatError(ValueError):
    """Input does not follow the graph schema."""


class GraphValidationError(ValueError):
    """Graph violates a structural invariant."""


class LineEnd(NamedTuple):
    line: int
    end: str  # "src" or "tgt"


class Ext(NamedTuple):
    ext: int


Dart = tuple[int, int]  # (vertex index, 1-based position)


def corner_sign(position: int) -> int:
    return 1 if position % 2 == 1 else -1


@dataclass(frozen=True)
class Corner:
    vertex: int
    position: int
    attachment: LineEnd | Ext

    @property
    def sign(self) -> int:
        return corner_sign(self.position)


@dataclass(frozen=True)
class Topology:
    n: int
    L: int
    F: int
    g: int
    B: int
    N: int
    components: int = 1

    def as_dict(self) -> dict:
        return {"n": self.n, "L": self.L, "F": self.F, "g": self.g, "B": self.B, "N": self.N}


@dataclass
class ValidationReport:
    ok: bool
    errors: list[str] = field(default_factory=list)

    def raise_if_invalid(self) -> None:
        if not self.ok:
            raise GraphValidationError("; ".join(self.errors))


@dataclass(frozen=True)
class RibbonGraph:
    vertices: tuple[tuple[LineEnd | Ext, ...], ...]
    root: int = 0

    def __post_init__(self):
        verts = tuple(tuple(v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if verts and not 0 <= self.root < len(verts):
            raise GraphValidationError(f"root {self.root} is not a vertex")

    # -- basic counts ------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def L(self) -> int:
        return len(self.line_ids)

    @property
    def N(self) -> int:
        return len(self.ext_ids)

    @property
    def line_ids(self) -> tuple[int, ...]:
        return tuple(sorted({a.line for v in self.vertices for a in v if isinstance(a, LineEnd)}))

    @property
    def ext_ids(self) -> tuple[int, ...]:
        return tuple(a.ext for v in self.vertices for a in v if isinstance(a, Ext))

    def corners(self) -> list[Corner]:
        return [Corner(vi, p, a) for vi, v in enumerate(self.vertices) for p, a in enumerate(v, 1)]

    def line_ends(self) -> dict[int, list[Dart]]:
        """Line id -> the darts holding its ends, ``src`` end first."""
        ends: dict[int, list[tuple[str, Dart]]] = {}
        for vi, v in enumerate(self.vertices):
            for p, a in enumerate(v, 1):
                if isinstance(a, LineEnd):
                    ends.setdefault(a.line, []).append((a.end, (vi, p)))
        return {l: [d for _, d in sorted(e)] for l, e in ends.items()}

    def endpoints(self, line: int) -> tuple[int, int]:
        a, b = self.line_ends()[line]
        return a[0], b[0]

    def with_root(self, root: int) -> RibbonGraph:
        return RibbonGraph(self.vertices, root)

    # -- combinatorial map ---------------------------------------------------

    def alpha(self) -> dict[Dart, Dart]:
        out: dict[Dart, Dart] = {}
        for vi, v in enumerate(self.vertices):
            for p, a in enumerate(v, 1):
                if isinstance(a, Ext):
                    out[(vi, p)] = (vi, p)
        for ends in self.line_ends().values():
            if len(ends) == 2:
                out[ends[0]] = ends[1]
                out[ends[1]] = ends[0]
        return out

    def faces(self) -> list[list[Dart]]:
        """Boundary walks: cycles of ``sigma . alpha``; every dart lies on exactly one."""
        alpha = self.alpha()
        seen: set[Dart] = set()
        faces = []
        for vi, v in enumerate(self.vertices):
            for p in range(1, len(v) + 1):
                start = (vi, p)
                if start in seen:
                    continue
                walk = []
                d = start
                while d not in seen:
                    seen.add(d)
                    walk.append(d)
                    w, q = alpha[d]
                    d = (w, q % len(self.vertices[w]) + 1)
                faces.append(walk)
        return faces

    def attachment(self, dart: Dart) -> LineEnd | Ext:
        return self.vertices[dart[0]][dart[1] - 1]

    # -- connectivity --------------------------------------------------------

    def components(self) -> list[set[int]]:
        adj: dict[int, set[int]] = {v: set() for v in range(self.n)}
        for ends in self.line_ends().values():
            if len(ends) == 2:
                a, b = ends[0][0], ends[1][0]
                adj[a].add(b)
                adj[b].add(a)
        seen: set[int] = set()
        comps = []
        for v in range(self.n):
            if v in seen:
                continue
            comp = {v}
            queue = deque([v])
            while queue:
                x = queue.popleft()
                for y in adj[x]:
                    if y not in comp:
                        comp.add(y)
                        queue.append(y)
            seen |= comp
            comps.append(comp)
        return comps

    def is_connected(self) -> bool:
        return self.n > 0 and len(self.components()) == 1

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        verts = []
        for v in self.vertices:
            verts.append(
                [{"line": a.line, "end": a.end} if isinstance(a, LineEnd) else {"ext": a.ext} for a in v]
            )
        return {"vertices": verts, "root": self.root}

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, data) -> RibbonGraph:
        if not isinstance(data, dict) or "vertices" not in data:
            raise GraphFormatError("top level must be an object with a 'vertices' array")
        raw = data["vertices"]
        if not isinstance(raw, list) or not raw:
            raise GraphFormatError("'vertices' must be a non-empty array")
        seen: dict[tuple, tuple[int, int]] = {}
        verts = []
        for vi, v in enumerate(raw):
            if not isinstance(v, list):
                raise GraphFormatError(f"vertices[{vi}] must be an array of corners")
            word = []
            for p, c in enumerate(v, 1):
                where = f"vertices[{vi}][{p - 1}]"
                if not isinstance(c, dict):
                    raise GraphFormatError(f"{where}: corner must be an object")
                if "line" in c:
                    if set(c) != {"line", "end"} or c["end"] not in ("src", "tgt"):
                        raise GraphFormatError(f"{where}: expected {{'line': id, 'end': 'src'|'tgt'}}")
                    if not isinstance(c["line"], int) or isinstance(c["line"], bool) or c["line"] < 1:
                        raise GraphFormatError(f"{where}: line id must be a positive integer")
                    a = LineEnd(c["line"], c["end"])
                elif "ext" in c:
                    if set(c) != {"ext"} or not isinstance(c["ext"], int) or isinstance(c["ext"], bool):
                        raise GraphFormatError(f"{where}: expected {{'ext': id}}")
                    a = Ext(c["ext"])
                else:
                    raise GraphFormatError(f"{where}: corner needs 'line' or 'ext'")
                if a in seen:
                    pv, pp = seen[a]
                    raise GraphFormatError(
                        f"{where}: corner {_describe(a)} already referenced at vertices[{pv}][{pp - 1}]"
                    )
                seen[a] = (vi, p)
                word.append(a)
            verts.append(tuple(word))
        root = data.get("root", 0)
        if not isinstance(root, int) or not 0 <= root < len(verts):
            raise GraphFormatError(f"root {root!r} is not a vertex index")
        return cls(tuple(verts), root)

    @classmethod
    def loads(cls, text: str) -> RibbonGraph:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise GraphFormatError(f"invalid JSON: {exc}") from exc
        return cls.from_json(data)

    def normalized(self) -> RibbonGraph:
        """Relabel lines 1..L and legs 1..N in order of first appearance."""
        lmap: dict[int, int] = {}
        emap: dict[int, int] = {}
        verts = []
        for v in self.vertices:
            word = []
            for a in v:
                if isinstance(a, LineEnd):
                    lmap.setdefault(a.line, len(lmap) + 1)
                    word.append(LineEnd(lmap[a.line], a.end))
                else:
                    emap.setdefault(a.ext, len(emap) + 1)
                    word.append(Ext(emap[a.ext]))
            verts.append(tuple(word))
        return RibbonGraph(tuple(verts), self.root)


def _describe(a) -> str:
    if isinstance(a, LineEnd):
        return f"(line {a.line}, {a.end})"
    return f"(ext {a.ext})"


def graph(vertices: Sequence[Sequence], root: int = 0) -> RibbonGraph:
    """Build a graph from a compact notation.

    Each corner is ``("L", id)`` or ``("E", id)``.  A line's end on a "-"
    corner is its ``src`` end; if both ends carry the same sign (an invalid
    graph, kept constructible for testing) the first one is ``src``.
    """
    pos: dict[int, list[int]] = {}
    for v in vertices:
        for p, (kind, ident) in enumerate(v, 1):
            if kind == "L":
                pos.setdefault(ident, []).append(corner_sign(p))
    seen: set[int] = set()
    verts = []
    for v in vertices:
        word = []
        for p, (kind, ident) in enumerate(v, 1):
            if kind == "L":
                signs = pos[ident]
                if len(set(signs)) == 2:
                    end = "src" if corner_sign(p) < 0 else "tgt"
                else:
                    end = "tgt" if ident in seen else "src"
                seen.add(ident)
                word.append(LineEnd(ident, end))
            elif kind == "E":
                word.append(Ext(ident))
            else:
                raise GraphFormatError(f"unknown corner kind {kind!r}")
        verts.append(tuple(word))
    return RibbonGraph(tuple(verts), root)


# ---------------------------------------------------------------------------
# validation and topology


def validate(g: RibbonGraph, *, strict: bool = True) -> ValidationReport:
    """Check orientability, corner usage and connectedness.

    ``strict`` also requires every vertex to have exactly four corners; the
    relaxed mode accepts any even valence (rosettes and quotient vertices).
    """
    errors = []
    if g.n == 0:
        return ValidationReport(False, ["graph has no vertices"])
    for vi, v in enumerate(g.vertices):
        if strict and len(v) != 4:
            errors.append(f"vertex {vi} has {len(v)} corners, expected 4")
        elif len(v) % 2 or not v:
            errors.append(f"vertex {vi} has odd valence {len(v)}")
    used: dict[object, Dart] = {}
    ends: dict[int, list[tuple[str, Dart]]] = {}
    for c in g.corners():
        a = c.attachment
        if a in used:
            errors.append(f"corner reused: {_describe(a)} at vertex {c.vertex} position {c.position}")
            continue
        used[a] = (c.vertex, c.position)
        if isinstance(a, LineEnd):
            ends.setdefault(a.line, []).append((a.end, (c.vertex, c.position)))
    for line, e in sorted(ends.items()):
        labels = sorted(x for x, _ in e)
        if labels != ["src", "tgt"]:
            errors.append(f"line {line} must have exactly one src and one tgt end, found {labels}")
            continue
        s1, s2 = (corner_sign(d[1]) for _, d in e)
        if s1 == s2:
            kind = "+" if s1 > 0 else "-"
            errors.append(f"non-orientable: line {line} joins two '{kind}' corners")
    if not errors and not g.is_connected():
        errors.append("graph is disconnected")
    if strict and not errors and 4 * g.n != 2 * g.L + g.N:
        errors.append(f"corner count mismatch: 4n={4 * g.n} but 2L+N={2 * g.L + g.N}")
    return ValidationReport(not errors, errors)


def topology(g: RibbonGraph) -> Topology:
    """Face count by boundary walks, genus from the Euler relation.

    For a disconnected graph the Euler relation is applied per component,
    ``2k - 2g = n - L + F`` with ``k`` components.
    """
    faces = g.faces()
    F = len(faces)
    B = sum(1 for f in faces if any(isinstance(g.attachment(d), Ext) for d in f))
    k = len(g.components()) if g.n else 0
    chi2 = 2 * k - (g.n - g.L + F)
    if chi2 % 2 or chi2 < 0:
        raise GraphValidationError(f"inconsistent face count (n={g.n}, L={g.L}, F={F})")
    return Topology(g.n, g.L, F, chi2 // 2, B, g.N, k)


def is_primitive_shape(t: Topology) -> bool:
    return t.g == 0 and t.B == 1 and t.N in (2, 4) and t.components == 1


# ---------------------------------------------------------------------------
# subgraphs, quotients, differences


@dataclass(frozen=True)
class Subgraph:
    """Lines of a parent graph with every vertex they touch.

    ``graph`` is the standalone ribbon graph: corners of induced vertices not
    attached to the chosen lines become external legs with fresh ids, and
    ``legs`` maps those ids back to the parent attachment.
    """

    parent: RibbonGraph
    lines: frozenset[int]
    vertex_ids: tuple[int, ...]
    graph: RibbonGraph
    legs: dict

    @property
    def connected(self) -> bool:
        return self.graph.is_connected()

    @property
    def N(self) -> int:
        return self.graph.N

    def topology(self) -> Topology:
        return topology(self.graph)


def subgraph(g: RibbonGraph, line_ids: Iterable[int]) -> Subgraph:
    lines = frozenset(line_ids)
    if not lines:
        raise ValueError("empty line set")
    unknown = lines - set(g.line_ids)
    if unknown:
        raise ValueError(f"lines {sorted(unknown)} are not in the graph")
    ends = g.line_ends()
    vids = sorted({d[0] for l in lines for d in ends[l]})
    legs: dict[int, LineEnd | Ext] = {}
    verts = []
    for vi in vids:
        word = []
        for a in g.vertices[vi]:
            if isinstance(a, LineEnd) and a.line in lines:
                word.append(a)
            else:
                eid = len(legs) + 1
                legs[eid] = a
                word.append(Ext(eid))
        verts.append(tuple(word))
    root = vids.index(g.root) if g.root in vids else 0
    return Subgraph(g, lines, tuple(vids), RibbonGraph(tuple(verts), root), legs)


def quotient(g: RibbonGraph, s: Subgraph) -> RibbonGraph:
    """Shrink a primitively divergent ``s`` to one Moyal vertex.

    The new vertex carries the external corners of ``s`` in the cyclic order
    they have on the rosette of ``s``.  For a two-point ``s`` this is a
    two-corner vertex: both lines hooked to ``s`` keep their own parameters.
    """
    from .filk import rosette, spanning_tree

    t = s.topology()
    if not is_primitive_shape(t):
        raise GraphValidationError(
            f"quotient needs a connected planar subgraph with one broken face and N in (2, 4); "
            f"got g={t.g}, B={t.B}, N={t.N}, components={t.components}"
        )
    ros = rosette(s.graph, spanning_tree(s.graph))
    outer = [(p, s.legs[a.ext]) for p, a in enumerate(ros.word, 1) if isinstance(a, Ext)]
    signs = [corner_sign(p) for p, _ in outer]
    if any(signs[k] == signs[k - 1] for k in range(len(signs))):
        raise GraphValidationError("external corners of the subgraph do not alternate in sign")
    start = signs.index(1)
    word = tuple(a for _, a in outer[start:] + outer[:start])
    inside = set(s.vertex_ids)
    anchor = min(inside)
    verts = []
    root = None
    for vi, v in enumerate(g.vertices):
        if vi == anchor:
            if g.root in inside:
                root = len(verts)
            verts.append(word)
        elif vi not in inside:
            if vi == g.root:
                root = len(verts)
            verts.append(v)
    out = RibbonGraph(tuple(verts), root)
    _check_bookkeeping(out)
    return out


def difference(g: RibbonGraph, s: Subgraph) -> tuple[RibbonGraph, bool]:
    """Erase the lines and vertices of ``s``; returns ``(G - S, connected)``.

    Lines with an end on an erased vertex leave their other end behind as a
    new external leg.  Lines with both ends erased disappear.
    """
    erased = set(s.vertex_ids)
    next_ext = max(g.ext_ids, default=0) + 1
    ends = g.line_ends()
    cut = {l for l, e in ends.items() if any(d[0] in erased for d in e)}
    verts = []
    root = 0
    for vi, v in enumerate(g.vertices):
        if vi in erased:
            continue
        if vi == g.root:
            root = len(verts)
        word = []
        for a in v:
            if isinstance(a, LineEnd) and a.line in cut:
                word.append(Ext(next_ext))
                next_ext += 1
            else:
                word.append(a)
        verts.append(tuple(word))
    out = RibbonGraph(tuple(verts), root)
    return out, out.is_connected() if out.n else True


def _check_bookkeeping(g: RibbonGraph) -> None:
    total = sum(len(v) for v in g.vertices)
    if total != 2 * g.L + g.N:
        raise GraphValidationError(f"corner bookkeeping broken: {total} corners, 2L+N={2 * g.L + g.N}")
    topology(g)


def dual(g: RibbonGraph) -> RibbonGraph:
    """Faces become vertices; each line keeps its two ends, now on the faces
    they border.  The cyclic order at a dual vertex is the boundary walk."""
    verts = tuple(tuple(g.attachment(d) for d in f) for f in g.faces())
    return RibbonGraph(verts, 0)


def face_of_darts(g: RibbonGraph) -> dict[Dart, int]:
    return {d: k for k, f in enumerate(g.faces()) for d in f}


def load_graph(path) -> RibbonGraph:
    with open(path) as fh:
        return RibbonGraph.loads(fh.read())


def fixture(name: str) -> RibbonGraph:
    """A bundled graph: ``bubble``, ``sunshine``, ``three-line`` or ``hyper``."""
    from importlib.resources import files

    return RibbonGraph.loads((files("ncpoly") / "data" / f"{name}.json").read_text())
