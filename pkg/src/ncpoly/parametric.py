"""Parametric matrices of a ribbon graph and the polynomial HU.

Index layout of every matrix: ``u`` variables of the lines (sorted by id),
then ``v`` variables in the same order, then one hypermomentum per non-root
vertex.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping

from .algebra import Poly, PolyRing, RationalFn, det_bareiss, inverse_block, pfaffian
from .ribbon import (
    GraphValidationError,
    LineEnd,
    RibbonGraph,
    Subgraph,
    corner_sign,
    is_primitive_shape,
    quotient,
    subgraph,
    validate,
)


def max_lines() -> int:
    return int(os.environ.get("NCPOLY_MAX_L", "12"))


def tvar(line: int) -> str:
    return f"t{line}"


def ring_for(g: RibbonGraph, extra: Iterable[str] = ()) -> PolyRing:
    return PolyRing([tvar(l) for l in g.line_ids] + ["s", *extra])


def _omega(i: int, j: int) -> int:
    return (i < j) - (i > j)


@dataclass(frozen=True)
class ParametricMatrices:
    graph: RibbonGraph
    lines: tuple[int, ...]
    others: tuple[int, ...]  # non-root vertices, one hypermomentum column each
    epsilon: tuple[tuple[tuple[int, ...], ...], ...]  # [vertex][line index][position - 1]
    E: tuple[tuple[int, ...], ...]  # 2L x 2L, blocks uu uv / vu vv
    C: tuple[tuple[int, ...], ...]  # 2L x (n - 1)

    @property
    def L(self) -> int:
        return len(self.lines)

    @property
    def dim(self) -> int:
        return 2 * self.L + len(self.others)

    @property
    def eta(self):
        return tuple(tuple(tuple(abs(x) for x in row) for row in v) for v in self.epsilon)

    def block(self, name: str) -> list[list[int]]:
        L = self.L
        r = 0 if name[0] == "u" else L
        c = 0 if name[1] == "u" else L
        return [list(self.E[r + a][c : c + L]) for a in range(L)]

    def b_matrix(self, s=1) -> list[list]:
        """``[[s E, C], [-C^t, 0]]``; with ``s = 1`` this is the integer matrix B'."""
        L2, m = 2 * self.L, len(self.others)
        out = [[0] * self.dim for _ in range(self.dim)]
        for a in range(L2):
            for b in range(L2):
                if self.E[a][b]:
                    out[a][b] = s * self.E[a][b]
            for k in range(m):
                if self.C[a][k]:
                    out[a][L2 + k] = self.C[a][k]
                    out[L2 + k][a] = -self.C[a][k]
        return out

    def b_prime(self) -> list[list[int]]:
        return self.b_matrix(1)

    def a_diagonal(self, t: Mapping[int, object]) -> list:
        """Diagonal of A for numeric ``t``: ``1/t`` (u), ``t`` (v), ``0`` (p)."""
        return [Fraction(1) / t[l] for l in self.lines] + [t[l] for l in self.lines] + [0] * len(self.others)

    def m_numeric(self, t: Mapping[int, object], s) -> list[list]:
        m = self.b_matrix(s)
        for k, x in enumerate(self.a_diagonal(t)):
            m[k][k] = m[k][k] + x
        return m

    def scaled_m(self, ring: PolyRing, t: Mapping[int, Poly] | None = None, s: Poly | None = None) -> list[list[Poly]]:
        """``D M`` with ``D = diag(t)`` on the u rows, so every entry is polynomial."""
        t = t or {l: ring.gen(tvar(l)) for l in self.lines}
        s = ring.gen("s") if s is None else s
        L = self.L
        zero = ring.zero
        m = [[zero] * self.dim for _ in range(self.dim)]
        for a, row in enumerate(self.b_matrix(1)):
            for b, x in enumerate(row):
                if x:
                    m[a][b] = s * x if a < 2 * L and b < 2 * L else ring.const(x)
        for a, l in enumerate(self.lines):
            m[a] = [x * t[l] if x else x for x in m[a]]
            m[a][a] = m[a][a] + ring.one
            m[L + a][L + a] = m[L + a][L + a] + t[l]
        return m


def build_matrices(g: RibbonGraph, *, check: bool = True) -> ParametricMatrices:
    if check:
        validate(g, strict=False).raise_if_invalid()
    lines = g.line_ids
    index = {l: k for k, l in enumerate(lines)}
    L = len(lines)
    eps = []
    for v in g.vertices:
        rows = [[0] * len(v) for _ in lines]
        for p, a in enumerate(v, 1):
            if isinstance(a, LineEnd):
                rows[index[a.line]][p - 1] = corner_sign(p)
        eps.append(tuple(tuple(r) for r in rows))
    E = [[0] * (2 * L) for _ in range(2 * L)]
    for v in g.vertices:
        hooks = [(index[a.line], p, corner_sign(p)) for p, a in enumerate(v, 1) if isinstance(a, LineEnd)]
        for a, i, ea in hooks:
            for b, j, eb in hooks:
                w = (-1) ** (i + j + 1) * _omega(i, j)
                if w:
                    E[a][b] += w * ea * eb
                    E[a][L + b] += w * ea
                    E[L + a][b] += w * eb
                    E[L + a][L + b] += w
    others = tuple(v for v in range(g.n) if v != g.root)
    C = [[0] * len(others) for _ in range(2 * L)]
    for k, vi in enumerate(others):
        for p, a in enumerate(g.vertices[vi], 1):
            if isinstance(a, LineEnd):
                C[index[a.line]][k] += 1
                C[L + index[a.line]][k] += corner_sign(p)
    pm = ParametricMatrices(
        g, lines, others, tuple(eps), tuple(tuple(r) for r in E), tuple(tuple(r) for r in C)
    )
    if check:
        bp = pm.b_prime()
        if any(bp[a][b] != -bp[b][a] for a in range(pm.dim) for b in range(pm.dim)):
            raise AssertionError("B' is not antisymmetric")
    return pm


# ---------------------------------------------------------------------------
# HU two ways


def hu_det(g: RibbonGraph, ring: PolyRing | None = None) -> Poly:
    """``det M * prod t`` computed as ``det(D M)`` with ``D`` scaling the u rows by t."""
    ring = ring or ring_for(g)
    pm = build_matrices(g)
    if pm.dim == 0:
        return ring.one
    return det_bareiss(pm.scaled_m(ring))


def pfaffian_term(pm: ParametricMatrices, I: Iterable[int], J: Iterable[int], bp=None) -> int:
    """``Pf(B'_{I^ J^})`` with the u rows of ``I`` and the v rows of ``J`` deleted."""
    index = {l: k for k, l in enumerate(pm.lines)}
    deleted = [index[l] for l in I] + [pm.L + index[l] for l in J]
    return pfaffian(bp if bp is not None else pm.b_prime(), deleted, check=False)


def hu_pfaffian_sum(g: RibbonGraph, ring: PolyRing | None = None) -> Poly:
    """Sum over line subsets ``I, J`` of ``s^(2L-|I|-|J|-n+1) Pf^2 prod_{not I} t prod_J t``."""
    if g.L > max_lines():
        raise ValueError(f"L={g.L} exceeds the enumeration guard {max_lines()} (set NCPOLY_MAX_L)")
    ring = ring or ring_for(g)
    pm = build_matrices(g)
    bp = pm.b_prime()
    L, lines = pm.L, pm.lines
    ti = [ring.index[tvar(l)] for l in lines]
    si = ring.index["s"]
    subsets = [c for r in range(L + 1) for c in combinations(range(L), r)]
    terms: dict = {}
    for I in subsets:
        for J in subsets:
            rest = pm.dim - len(I) - len(J)
            if rest % 2:
                continue
            pf = pfaffian(bp, list(I) + [L + j for j in J], check=False)
            if not pf:
                continue
            exps = [0] * ring.nvars
            for k in range(L):
                if k not in I:
                    exps[ti[k]] += 1
            for k in J:
                exps[ti[k]] += 1
            e = 2 * L - len(I) - len(J) - len(pm.others)
            if e < 0:
                raise AssertionError(f"negative s exponent for I={I}, J={J}")
            exps[si] = e
            key = ring.pack(exps)
            terms[key] = terms.get(key, 0) + pf * pf
    return Poly(ring, {k: c for k, c in terms.items() if c})


def hu(g: RibbonGraph, method: str = "det", ring: PolyRing | None = None) -> Poly:
    if method == "det":
        return hu_det(g, ring)
    if method == "pfaffian":
        return hu_pfaffian_sum(g, ring)
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# leading terms and factorization


def leading_terms(p: Poly, lines: Iterable[int]) -> tuple[int, Poly]:
    """Rescale ``t_l -> rho^2 t_l`` for ``l`` in ``lines``; return the lowest
    power of rho and its coefficient."""
    names = [tvar(l) for l in lines]
    if p.is_zero():
        raise ValueError("zero polynomial has no leading terms")
    d = p.min_degree_in(names)
    return 2 * d, p.part_of_degree_in(names, d)


def _as_subgraph(g: RibbonGraph, s) -> Subgraph:
    return s if isinstance(s, Subgraph) else subgraph(g, s)


def require_primitive(s: Subgraph) -> None:
    t = s.topology()
    if not is_primitive_shape(t):
        raise GraphValidationError(
            f"subgraph {sorted(s.lines)} is not primitively divergent (g={t.g}, B={t.B}, N={t.N})"
        )


@dataclass
class FactorizationReport:
    holds: bool
    exponent: int
    expected_exponent: int
    lhs: Poly
    rhs: Poly
    subgraph_leading: Poly
    quotient_hu: Poly
    quotient: RibbonGraph

    @property
    def difference(self) -> Poly:
        return self.lhs - self.rhs


def check_factorization(g: RibbonGraph, s, *, hu_g: Poly | None = None) -> FactorizationReport:
    """Leading part of ``HU_G`` under ``t_S -> rho^2 t_S`` against
    ``HU^l_S * HU_{G/S}``."""
    s = _as_subgraph(g, s)
    require_primitive(s)
    ring = ring_for(g)
    hu_g = hu_det(g, ring) if hu_g is None else hu_g
    nu, lhs = leading_terms(hu_g, s.lines)
    hu_s = hu_det(s.graph)
    _, lead_s = leading_terms(hu_s, s.lines)
    q = quotient(g, s)
    hu_q = hu_det(q)
    rhs = lead_s.to_ring(ring) * hu_q.to_ring(ring)
    t = s.topology()
    return FactorizationReport(
        lhs == rhs and nu == 2 * (t.L - t.n + 1),
        nu,
        2 * (t.L - t.n + 1),
        lhs,
        rhs,
        lead_s.to_ring(ring),
        hu_q.to_ring(ring),
        q,
    )


# ---------------------------------------------------------------------------
# blocks of the inverse matrix


@dataclass
class InverseBlockReport:
    holds: bool
    indices: list[str]
    mismatches: list[str]
    divergent: list[str]
    limit: list[list[RationalFn]] | None = None
    quotient_block: list[list[RationalFn]] | None = None


def _labels(pm: ParametricMatrices) -> list[str]:
    return [f"u{l}" for l in pm.lines] + [f"v{l}" for l in pm.lines] + [f"p{v}" for v in pm.others]


def _inverse_of_m(pm: ParametricMatrices, ring: PolyRing, rows, cols, t=None):
    """Block of ``M^{-1}`` from ``(D M)^{-1} D``."""
    dm = pm.scaled_m(ring, t)
    t = t or {l: ring.gen(tvar(l)) for l in pm.lines}
    blk = inverse_block(dm, rows, cols)
    out = []
    for row in blk:
        new = []
        for c, x in zip(cols, row):
            new.append(x * t[pm.lines[c]] if c < pm.L else x)
        out.append(new)
    return out


def check_inverse_block(g: RibbonGraph, s) -> InverseBlockReport:
    """``lim_{rho->0} (M_G^{-1})_{G-S,G-S}`` against ``(M_{G/S}^{-1})`` on the same indices.

    The lines of ``S`` carry ``t -> rho^2 t``.  Indices are the u and v
    variables of lines outside ``S`` and the hypermomenta of non-root vertices
    outside ``S``.
    """
    s = _as_subgraph(g, s)
    require_primitive(s)
    if any(not isinstance(a, LineEnd) for a in s.legs.values()):
        raise GraphValidationError("subgraph has an external leg of the whole graph (not completely internal)")
    q = quotient(g, s)
    pm_g = build_matrices(g)
    pm_q = build_matrices(q)
    ring = ring_for(g, ["rho"])
    rho = ring.gen("rho")
    t = {l: ring.gen(tvar(l)) * (rho * rho if l in s.lines else 1) for l in pm_g.lines}

    inside = set(s.vertex_ids)
    anchor = min(inside)
    qindex = {}
    k = 0
    for vi in range(g.n):
        if vi == anchor:
            k += 1
        elif vi not in inside:
            qindex[vi] = k
            k += 1
    keep_lines = [l for l in pm_g.lines if l not in s.lines]
    keep_vertices = [v for v in pm_g.others if v not in inside]
    gi = {l: k for k, l in enumerate(pm_g.lines)}
    qi = {l: k for k, l in enumerate(pm_q.lines)}
    g_idx = (
        [gi[l] for l in keep_lines]
        + [pm_g.L + gi[l] for l in keep_lines]
        + [2 * pm_g.L + pm_g.others.index(v) for v in keep_vertices]
    )
    q_idx = (
        [qi[l] for l in keep_lines]
        + [pm_q.L + qi[l] for l in keep_lines]
        + [2 * pm_q.L + pm_q.others.index(qindex[v]) for v in keep_vertices]
    )
    labels = [_labels(pm_g)[i] for i in g_idx]
    blk_g = _inverse_of_m(pm_g, ring, g_idx, g_idx, t)
    qring = ring_for(q)
    blk_q = _inverse_of_m(pm_q, qring, q_idx, q_idx)
    mismatches, divergent = [], []
    limit = []
    for a, row in enumerate(blk_g):
        lrow = []
        for b, x in enumerate(row):
            lim = x.limit_zero("rho")
            name = f"({labels[a]},{labels[b]})"
            if lim is None:
                divergent.append(name)
                lrow.append(None)
                continue
            expect = RationalFn(blk_q[a][b].num.to_ring(ring), blk_q[a][b].den.to_ring(ring))
            if lim != expect:
                mismatches.append(name)
            lrow.append(lim)
        limit.append(lrow)
    return InverseBlockReport(not mismatches and not divergent, labels, mismatches, divergent, limit, blk_q)


# ---------------------------------------------------------------------------
# det Q = (det M)^D at D = 2


SIGMAS = {
    # Hermitian: eigenvalues +1 and -1
    "hermitian": ((0, -1j), (1j, 0)),
    # real antisymmetric unit
    "antisymmetric": ((0, 1), (-1, 0)),
}


@dataclass
class DetQReport:
    holds: bool
    det_q: object
    det_m_squared: Fraction
    sigma: str


def check_detQ(g: RibbonGraph, t_values: Mapping[int, object], s_value, sigma: str = "hermitian") -> DetQReport:
    """Assemble ``Q = A (x) 1_2 - B (x) sigma`` and compare ``det Q`` with ``(det M)^2``."""
    from sympy import QQ_I, I, Rational
    from sympy.polys.matrices import DomainMatrix

    pm = build_matrices(g)
    t = {l: Fraction(t_values[l]) for l in pm.lines}
    s_value = Fraction(s_value)
    det_m = det_bareiss(pm.m_numeric(t, s_value)) if pm.dim else Fraction(1)
    a = pm.a_diagonal(t)
    b = pm.b_matrix(s_value)
    sig = SIGMAS[sigma]
    n = pm.dim
    rows = [[QQ_I.zero] * (2 * n) for _ in range(2 * n)]

    def conv(x):
        if isinstance(x, complex):
            return QQ_I.from_sympy(int(x.real) + int(x.imag) * I)
        x = Fraction(x)
        return QQ_I.from_sympy(Rational(x.numerator, x.denominator))

    for i in range(n):
        for j in range(n):
            for p in range(2):
                for r in range(2):
                    val = QQ_I.zero
                    if i == j and p == r and a[i]:
                        val += conv(a[i])
                    if b[i][j] and sig[p][r]:
                        val -= conv(b[i][j]) * conv(sig[p][r])
                    rows[2 * i + p][2 * j + r] = val
    det_q = DomainMatrix(rows, (2 * n, 2 * n), QQ_I).det() if n else QQ_I.one
    target = det_m * det_m
    return DetQReport(det_q == conv(target), det_q, Fraction(target), sigma)
