"""Power counting from the polynomial HU: the exponent b', the topological
case table, analyticity strips and pole locations in the dimension D."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable

from .algebra import Poly
from .parametric import hu_det, max_lines, ring_for, tvar
from .ribbon import RibbonGraph, Topology, is_primitive_shape, subgraph


def b_prime(hu: Poly, lines: Iterable[int]) -> int:
    """Lowest total degree of HU in the parameters of ``lines``."""
    lines = list(lines)
    if not lines:
        raise ValueError("b' needs a non-empty line set")
    return hu.min_degree_in([tvar(l) for l in lines])


def case_bound(t: Topology) -> tuple[str, int]:
    """Topological prediction for b': ``("le", x)`` or ``("eq", x)``."""
    if t.g > 0:
        return "le", t.L - (t.n - 1) - 2 * t.g
    if t.B > 1:
        return "le", t.L - t.n
    return "eq", t.L - t.n + 1


@dataclass
class Pole:
    location: Fraction
    lines: frozenset[int]
    kind: str  # "leading" or "subleading"


@dataclass
class SubgraphReport:
    lines: frozenset[int]
    topology: Topology
    b_prime: int
    bound: tuple[str, int]
    primitive: bool
    poles: list[Pole] = field(default_factory=list)

    @property
    def bound_ok(self) -> bool:
        kind, x = self.bound
        return self.b_prime == x if kind == "eq" else self.b_prime <= x

    @property
    def saturates(self) -> bool:
        t = self.topology
        return self.b_prime == t.L - t.n + 1

    def as_dict(self) -> dict:
        return {
            "lines": sorted(self.lines),
            **self.topology.as_dict(),
            "b_prime": self.b_prime,
            "bound": {"relation": self.bound[0], "value": self.bound[1], "ok": self.bound_ok},
            "primitive": self.primitive,
            "poles": [fmt_rational(p.location) for p in self.poles],
        }


@dataclass
class DivergenceReport:
    graph: RibbonGraph
    hu: Poly
    subgraphs: list[SubgraphReport]

    @property
    def primitive(self) -> list[SubgraphReport]:
        return [s for s in self.subgraphs if s.primitive]

    def get(self, lines: Iterable[int]) -> SubgraphReport:
        key = frozenset(lines)
        for s in self.subgraphs:
            if s.lines == key:
                return s
        raise KeyError(sorted(key))


def fmt_rational(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def connected_line_subsets(g: RibbonGraph) -> list[frozenset[int]]:
    if g.L > max_lines():
        raise ValueError(f"L={g.L} exceeds the enumeration guard {max_lines()} (set NCPOLY_MAX_L)")
    out = []
    lines = g.line_ids
    for r in range(1, len(lines) + 1):
        for c in combinations(lines, r):
            if subgraph(g, c).connected:
                out.append(frozenset(c))
    return out


def subgraph_poles(lines: frozenset[int], t: Topology) -> list[Pole]:
    b = t.L - t.n + 1
    out = [Pole(Fraction(2 * t.L, b), lines, "leading")]
    if t.N == 2:
        out.append(Pole(Fraction(2 * t.L + 2, b), lines, "subleading"))
    return out


def classify(g: RibbonGraph, hu: Poly | None = None) -> DivergenceReport:
    hu = hu_det(g, ring_for(g)) if hu is None else hu
    reports = []
    for lines in connected_line_subsets(g):
        t = subgraph(g, lines).topology()
        prim = is_primitive_shape(t)
        reports.append(
            SubgraphReport(lines, t, b_prime(hu, lines), case_bound(t), prim, subgraph_poles(lines, t) if prim else [])
        )
    return DivergenceReport(g, hu, reports)


@dataclass
class AnalyticityStrip:
    lower: Fraction
    always: Fraction
    extended: Fraction | None  # None: no subgraph ever limits convergence
    limiting: frozenset[int] | None

    def as_dict(self) -> dict:
        return {
            "strip": [fmt_rational(self.lower), fmt_rational(self.always)],
            "extended_bound": None if self.extended is None else fmt_rational(self.extended),
            "limiting_subgraph": None if self.limiting is None else sorted(self.limiting),
        }


def analyticity_strip(report: DivergenceReport) -> AnalyticityStrip:
    """``0 < Re D < 2`` always; the integral converges up to the smallest
    ``2 L(S) / b'(S)`` over connected subgraphs with ``b' > 0``."""
    best = None
    for s in report.subgraphs:
        if s.b_prime > 0:
            x = Fraction(2 * s.topology.L, s.b_prime)
            if best is None or x < best[0]:
                best = (x, s.lines)
    return AnalyticityStrip(
        Fraction(0), Fraction(2), None if best is None else best[0], None if best is None else best[1]
    )


@dataclass
class PoleSet:
    poles: list[Pole]

    def locations(self) -> list[Fraction]:
        return sorted({p.location for p in self.poles})

    def as_dict(self) -> dict:
        return {
            "poles": [fmt_rational(x) for x in self.locations()],
            "origins": [
                {"location": fmt_rational(p.location), "subgraph": sorted(p.lines), "kind": p.kind} for p in self.poles
            ],
        }


def poles(report: DivergenceReport) -> PoleSet:
    return PoleSet([p for s in report.primitive for p in s.poles])
