"""Generalized Taylor operators, forests of primitively divergent subgraphs
and the signed subtraction plan built from them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .algebra import Poly
from .parametric import check_factorization, hu_det, leading_terms, ring_for
from .power_counting import DivergenceReport, classify, fmt_rational
from .ribbon import GraphValidationError, RibbonGraph, is_primitive_shape, subgraph


class InsufficientOrder(ValueError):
    """The series is not known to the order the operator needs."""


def ceil_exponent(nu) -> int:
    """Smallest integer ``>= nu`` for an exact rational ``nu``."""
    return math.ceil(Fraction(nu))


@dataclass(frozen=True)
class Truncated:
    """``rho**nu * (c0 + c1 rho + ...)``; ``coeffs`` empty means zero."""

    nu: Fraction
    coeffs: tuple

    @property
    def is_zero(self) -> bool:
        return not any(self.coeffs)


def taylor_apply(n: int, nu, coeffs: Sequence, known_order: int | None = None) -> Truncated:
    """``tau^n [rho^nu g] = rho^nu T^(n - E(nu)) g`` with ``T^q = 0`` for ``q < 0``.

    ``coeffs`` are the Taylor coefficients of ``g`` at 0, valid through
    ``known_order`` (default ``len(coeffs) - 1``).
    """
    nu = Fraction(nu)
    known = len(coeffs) - 1 if known_order is None else known_order
    q = n - ceil_exponent(nu)
    if q < 0:
        return Truncated(nu, ())
    if q > known:
        raise InsufficientOrder(f"need the series of g through order {q}, have {known}")
    out = list(coeffs[: q + 1]) + [0] * max(0, q + 1 - len(coeffs))
    return Truncated(nu, tuple(out))


# ---------------------------------------------------------------------------
# forests


def compatible(a: frozenset, b: frozenset) -> bool:
    """Nested or line-disjoint."""
    return a <= b or b <= a or not (a & b)


def forests(report: DivergenceReport) -> list[frozenset[frozenset[int]]]:
    """All families of pairwise compatible primitive subgraphs, the empty one first."""
    prims = sorted((s.lines for s in report.primitive), key=lambda x: (len(x), sorted(x)))
    out: list[frozenset] = []

    def rec(k: int, chosen: list):
        if k == len(prims):
            out.append(frozenset(chosen))
            return
        rec(k + 1, chosen)
        cand = prims[k]
        if all(compatible(cand, c) for c in chosen):
            rec(k + 1, chosen + [cand])

    rec(0, [])
    out.sort(key=lambda f: (len(f), sorted(sorted(x) for x in f)))
    return out


# ---------------------------------------------------------------------------
# counterterms


@dataclass
class Counterterm:
    """Data of ``-tau_S^(-2 L(S))`` in factorized form."""

    lines: frozenset[int]
    L: int
    n: int
    N: int
    leading: Poly  # HU^l_S
    quotient: RibbonGraph
    quotient_hu: Poly
    denominators: list[tuple[int, int]]  # (a, b) for a - b D

    @property
    def b(self) -> int:
        return self.L - self.n + 1

    @property
    def taylor_order(self) -> int:
        return -2 * self.L

    def nu(self, D) -> Fraction:
        return -Fraction(D) * self.b

    def active_order(self, D) -> int:
        """Order ``q`` of the Taylor part kept at dimension ``D``; negative
        means the operator vanishes."""
        return self.taylor_order - ceil_exponent(self.nu(D))

    def poles(self) -> list[Fraction]:
        return [Fraction(a, b) for a, b in self.denominators]

    @property
    def mass_divergence(self) -> bool:
        return self.N == 2

    def as_dict(self) -> dict:
        return {
            "subgraph": sorted(self.lines),
            "L": self.L,
            "n": self.n,
            "N": self.N,
            "taylor_order": self.taylor_order,
            "leading": str(self.leading),
            "quotient": self.quotient.to_json(),
            "quotient_hu": str(self.quotient_hu),
            "denominators": [f"{a} - {b}*D" for a, b in self.denominators],
            "poles": [fmt_rational(p) for p in self.poles()],
            "operator_slot": "O_S" if self.N == 2 else None,
        }


def subtraction_operator(g: RibbonGraph, lines, hu: Poly | None = None) -> Counterterm:
    s = subgraph(g, lines)
    t = s.topology()
    if not is_primitive_shape(t):
        raise GraphValidationError(f"subgraph {sorted(s.lines)} is not primitively divergent")
    rep = check_factorization(g, s, hu_g=hu)
    if not rep.holds:
        raise GraphValidationError(f"factorization fails for subgraph {sorted(s.lines)}")
    _, lead = leading_terms(hu_det(s.graph), s.lines)
    b = t.L - t.n + 1
    dens = [(2 * t.L, b)]
    if t.N == 2:
        dens.append((2 * t.L + 2, b))
    return Counterterm(s.lines, t.L, t.n, t.N, lead, rep.quotient, hu_det(rep.quotient), dens)


@dataclass
class BlueprintTerm:
    forest: frozenset[frozenset[int]]
    sign: int

    def as_dict(self) -> dict:
        return {"sign": self.sign, "forest": [sorted(x) for x in sorted(self.forest, key=sorted)]}


@dataclass
class Blueprint:
    graph: RibbonGraph
    terms: list[BlueprintTerm]
    counterterms: dict[frozenset[int], Counterterm]

    def as_dict(self) -> dict:
        return {
            "terms": [t.as_dict() for t in self.terms],
            "counterterms": [c.as_dict() for _, c in sorted(self.counterterms.items(), key=lambda kv: sorted(kv[0]))],
        }


def renormalized_blueprint(g: RibbonGraph, report: DivergenceReport | None = None) -> Blueprint:
    """``R = 1 + sum_F prod_{S in F} (-tau_S)`` as signed forest terms."""
    hu = hu_det(g, ring_for(g))
    report = classify(g, hu) if report is None else report
    fs = forests(report)
    cts = {s.lines: subtraction_operator(g, s.lines, hu) for s in report.primitive}
    return Blueprint(g, [BlueprintTerm(f, (-1) ** len(f)) for f in fs], cts)
