"""Leading Pfaffian terms of HU: admissible pairs and the pseudo-admissible
pairs attached to a subgraph with an extra broken face."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .filk import admissible, genus_lines, rosette, separating_lines, spanning_trees
from .parametric import build_matrices, pfaffian_term
from .ribbon import RibbonGraph, subgraph, topology


@dataclass(frozen=True)
class PfaffianTerm:
    """One ``(I, J)`` summand of HU: ``s**s_power * n2 * prod t``."""

    I: frozenset[int]
    J: frozenset[int]
    n2: int
    s_power: int

    def degree(self, lines) -> int:
        return len(set(lines) - self.I) + len(self.J)


def _s_power(g: RibbonGraph, I, J) -> int:
    t = topology(g)
    return 2 * t.g - (len(I) + len(J) - t.L - t.F + 1)


def admissible_terms(g: RibbonGraph) -> list[PfaffianTerm]:
    """Terms with ``I`` = all lines and ``J`` admissible."""
    pm = build_matrices(g)
    lines = frozenset(g.line_ids)
    out = []
    for k in range(len(lines) + 1):
        for J in combinations(sorted(lines), k):
            if admissible(g, J):
                pf = pfaffian_term(pm, lines, J)
                out.append(PfaffianTerm(lines, frozenset(J), pf * pf, _s_power(g, lines, J)))
    return out


@dataclass(frozen=True)
class PseudoTerm:
    l_tilde: int
    l2: int
    tree: frozenset[int]
    term: PfaffianTerm
    genus_line: bool  # l_tilde is a genus line of the rosette of G over ``tree``

    @property
    def expected(self) -> int:
        return 4 if self.genus_line else 16

    @property
    def holds(self) -> bool:
        return self.term.n2 == self.expected


def pseudo_admissible_terms(g: RibbonGraph, s_lines, l_tilde: int) -> list[PseudoTerm]:
    """``I0 = all - l_tilde`` with every pseudo-admissible ``J0``, over all
    separating lines ``l2`` of ``S`` and all spanning trees avoiding both."""
    s = subgraph(g, s_lines)
    t = s.topology()
    if t.g != 0 or t.B < 2:
        raise ValueError(f"subgraph {sorted(s.lines)} must be planar with at least two broken faces")
    pm = build_matrices(g)
    lines = frozenset(g.line_ids)
    I0 = lines - {l_tilde}
    out = []
    for l2 in separating_lines(g, s.lines, l_tilde):
        for tree in spanning_trees(g):
            if l_tilde in tree or l2 in tree:
                continue
            J0 = lines - tree - {l2}
            pf = pfaffian_term(pm, I0, J0)
            term = PfaffianTerm(I0, J0, pf * pf, _s_power(g, I0, J0))
            out.append(PseudoTerm(l_tilde, l2, tree, term, l_tilde in genus_lines(rosette(g, tree))))
    return out
