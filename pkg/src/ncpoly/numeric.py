"""Deterministic numerical integration of the parametric integrand
``prod (1 - t**2)**(D/2 - 1) / HU**(D/2)`` over the unit cube, with HV set
to zero.

Each Hepp sector ``t_{p(1)} <= ... <= t_{p(L)}`` is mapped to the unit cube
by ``t_{p(k)} = x_k x_{k+1} ... x_L``.  The power ``x_j**b_j`` with ``b_j``
the lowest degree of HU in the ``j`` smallest parameters is factored out
exactly, and each axis uses Gauss-Jacobi quadrature for the remaining
endpoint power on the first cell and Gauss-Legendre on a geometric mesh
above it.  Accuracy is estimated by raising the Gauss order.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations
from typing import Iterable, Sequence

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .algebra import Poly
from .parametric import hu_det, ring_for, tvar
from .power_counting import classify, poles
from .renormalization import renormalized_blueprint
from .ribbon import RibbonGraph


class ConvergenceError(ValueError):
    """The integral diverges at the requested dimension."""


class SectorError(ValueError):
    """A sector polynomial vanishes at the origin after factoring out powers."""


class ToleranceError(RuntimeError):
    """The requested accuracy was not reached within the order budget."""


@dataclass(frozen=True)
class QuadratureSettings:
    order: int = 8  # Gauss points per cell on the first pass
    max_order: int = 40
    floor: float = 2.0**-5  # width of the Gauss-Jacobi cell at x = 0
    chunk: int = 200_000

    def halved(self) -> QuadratureSettings:
        return QuadratureSettings(self.order, self.max_order, self.floor / 2, self.chunk)


@dataclass
class IntegrandSpec:
    graph: RibbonGraph
    D: Fraction
    s: Fraction = Fraction(1)
    hu: Poly | None = None
    subtraction: Poly | None = None  # counterterm polynomial, subtracted as P**(-D/2)

    def __post_init__(self):
        self.D = Fraction(self.D)
        self.s = Fraction(self.s)
        if self.hu is None:
            self.hu = hu_det(self.graph, ring_for(self.graph))


@dataclass
class IntegrationResult:
    value: float
    abs_err: float
    cells: int
    settings: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------------------
# exact bookkeeping


def _t_terms(p: Poly, lines: Sequence[int], s: Fraction) -> dict[tuple[int, ...], Fraction]:
    """Exponent vectors over ``lines`` -> exact coefficient with ``s`` substituted."""
    ring = p.ring
    idx = [ring.index[tvar(l)] for l in lines]
    si = ring.index.get("s")
    out: dict[tuple[int, ...], Fraction] = {}
    for exps, c in p.terms():
        key = tuple(exps[i] for i in idx)
        v = Fraction(c) * (s ** exps[si] if si is not None else 1)
        out[key] = out.get(key, 0) + v
    return {k: v for k, v in out.items() if v}


def _sector_terms(terms: dict, order: Sequence[int]) -> dict[tuple[int, ...], Fraction]:
    """Map t-exponents to x-exponents for the sector listing line positions
    from smallest to largest parameter."""
    out: dict[tuple[int, ...], Fraction] = {}
    for a, c in terms.items():
        acc = 0
        d = []
        for k in order:
            acc += a[k]
            d.append(acc)
        key = tuple(d)
        out[key] = out.get(key, 0) + c
    return out


def _lowest(terms: dict) -> tuple[int, ...]:
    return tuple(min(d[j] for d in terms) for j in range(len(next(iter(terms)))))


def _shift(terms: dict, by: Sequence[int]) -> dict:
    return {tuple(x - b for x, b in zip(d, by)): c for d, c in terms.items()}


def convergence_bound(hu: Poly, lines: Sequence[int]) -> Fraction | None:
    """Smallest ``2 |S| / b'(S)`` over all non-empty line sets with ``b' > 0``;
    the unsubtracted integral converges exactly for ``0 < D`` below it."""
    best = None
    for r in range(1, len(lines) + 1):
        for c in combinations(lines, r):
            b = hu.min_degree_in([tvar(l) for l in c])
            if b > 0:
                x = Fraction(2 * r, b)
                best = x if best is None or x < best else best
    return best


# ---------------------------------------------------------------------------
# one-dimensional rules


@lru_cache(maxsize=None)
def _legendre(n: int):
    return roots_legendre(n)


@lru_cache(maxsize=None)
def _jacobi(n: int, alpha: float, beta: float):
    return roots_jacobi(n, alpha, beta)


def _axis_rule(power: float, n: int, floor: float, grade: bool, top: float | None) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for ``int_0^1 x**power f(x) dx``.

    With ``grade`` the mesh is also graded geometrically toward 1.  With
    ``top`` set as well, the last cell uses a Gauss-Jacobi rule for
    ``(1 - x)**top``; its weights are divided by that factor again so the
    rule still integrates ``f`` itself.
    """
    xs, ws = [], []
    u, w = _jacobi(n, 0.0, float(power))
    xs.append(floor * (1 + u) / 2)
    ws.append(w * (floor / 2) ** (power + 1))
    a = floor
    edges = []
    while a < 0.5:
        edges.append((a, min(2 * a, 0.5)))
        a = 2 * a
    b = 0.5
    if grade:
        while 1 - b > floor:
            edges.append((b, (1 + b) / 2))
            b = (1 + b) / 2
        if top is None:
            edges.append((b, 1.0))
    else:
        edges.append((b, 1.0))
    u, w = _legendre(n)
    for lo, hi in edges:
        x = lo + (hi - lo) * (1 + u) / 2
        xs.append(x)
        ws.append(w * (hi - lo) / 2 * x**power)
    if grade and top is not None:
        u, w = _jacobi(n, float(top), 0.0)
        h = 1 - b
        x = b + h * (1 + u) / 2
        xs.append(x)
        ws.append(w * (h / 2) ** (top + 1) * x**power / (1 - x) ** top)
    return np.concatenate(xs), np.concatenate(ws)


# ---------------------------------------------------------------------------
# sector integrals


@dataclass
class _Compiled:
    coeffs: np.ndarray
    exps: np.ndarray

    @classmethod
    def of(cls, terms: dict, L: int) -> _Compiled:
        keys = sorted(terms)
        return cls(np.array([float(terms[k]) for k in keys]), np.array(keys, dtype=float).reshape(len(keys), L))

    def __call__(self, logx: np.ndarray) -> np.ndarray:
        return np.exp(logx @ self.exps.T) @ self.coeffs


@dataclass
class _Sector:
    order: tuple[int, ...]  # positions into ``lines``, smallest parameter first
    powers: tuple[float, ...]  # exponent of x_j in the weight
    main: _Compiled  # reduced HU (or reduced counterterm when ``delta`` is set)
    delta: _Compiled | None = None  # (HU - P) / x**m, both reduced
    m: tuple[int, ...] = ()
    sign: float = 1.0


def _measure(x: np.ndarray, order: Sequence[int], D: float) -> np.ndarray:
    a = D / 2 - 1
    if a == 0:
        return np.ones(x.shape[0])
    t = np.cumprod(x[:, ::-1], axis=1)[:, ::-1]  # t_{order[k]} = x_k ... x_L
    return np.prod((1 - t * t) ** a, axis=1)


def _integrand(sec: _Sector, x: np.ndarray, D: float) -> np.ndarray:
    logx = np.log(x)
    h = sec.main(logx)
    if sec.delta is None:
        val = h ** (-D / 2)
    else:
        xm = np.exp(logx @ np.array(sec.m, dtype=float))
        z = xm * sec.delta(logx) / h
        val = h ** (-D / 2) * np.expm1(-D / 2 * np.log1p(z)) / xm
    return sec.sign * val * _measure(x, sec.order, D)


def _sector_value(sec: _Sector, D: float, n: int, st: QuadratureSettings) -> tuple[float, int]:
    # the measure is smooth at x = 1 only for integer D/2 >= 1.  Only the
    # last variable meets a pure (1 - x)**a endpoint; the others reach the
    # singularity through a corner, which the graded mesh resolves.
    a = D / 2 - 1
    grade = not (a >= 0 and float(a).is_integer())
    last = len(sec.powers) - 1
    rules = [_axis_rule(p, n, st.floor, grade, a if j == last else None) for j, p in enumerate(sec.powers)]
    sizes = [len(r[0]) for r in rules]
    total = []
    count = int(np.prod(sizes))
    for start in range(0, count, st.chunk):
        idx = np.unravel_index(np.arange(start, min(count, start + st.chunk)), sizes)
        x = np.stack([rules[j][0][idx[j]] for j in range(len(rules))], axis=1)
        w = np.prod(np.stack([rules[j][1][idx[j]] for j in range(len(rules))], axis=1), axis=1)
        total.append(float(np.sum(w * _integrand(sec, x, D))))
    cells = int(np.prod([s // n for s in sizes]))
    return math.fsum(total), cells


def _weights(L: int, b: Sequence[int], D: Fraction) -> tuple[Fraction, ...]:
    return tuple(Fraction(j) - D * b[j] / 2 for j in range(L))


def _plain_sector(terms: dict, order, D: Fraction, sign: float = 1.0) -> _Sector:
    L = len(order)
    st = _sector_terms(terms, order)
    b = _lowest(st)
    red = _shift(st, b)
    if tuple([0] * L) not in red:
        raise SectorError(f"sector {order}: no monomial attains every lowest degree")
    powers = _weights(L, b, D)
    for j, p in enumerate(powers):
        if p <= -1:
            raise ConvergenceError(f"integral diverges at D={D}: sector {order}, prefix of {j + 1} lines")
    return _Sector(tuple(order), tuple(float(p) for p in powers), _Compiled.of(red, L), sign=sign)


def _difference_sectors(terms: dict, sub: dict, order, D: Fraction) -> list[_Sector]:
    """``HU**(-D/2) - P**(-D/2)`` in one sector, as one stable difference when
    both share their lowest powers and as two terms otherwise."""
    L = len(order)
    st, sp = _sector_terms(terms, order), _sector_terms(sub, order)
    b, bp = _lowest(st), _lowest(sp)
    if b != bp:
        return [_plain_sector(terms, order, D), _plain_sector(sub, order, D, -1.0)]
    red, redp = _shift(st, b), _shift(sp, b)
    zero = tuple([0] * L)
    if zero not in red or zero not in redp:
        raise SectorError(f"sector {order}: no monomial attains every lowest degree")
    diff = dict(red)
    for k, c in redp.items():
        diff[k] = diff.get(k, 0) - c
    diff = {k: c for k, c in diff.items() if c}
    if not diff:
        return []
    m = _lowest(diff)
    powers = tuple(p + mj for p, mj in zip(_weights(L, b, D), m))
    for j, p in enumerate(powers):
        if p <= -1:
            raise ConvergenceError(f"subtracted integral diverges at D={D}: sector {order}, prefix of {j + 1} lines")
    return [
        _Sector(
            tuple(order),
            tuple(float(p) for p in powers),
            _Compiled.of(redp, L),
            _Compiled.of(_shift(diff, m), L),
            m,
        )
    ]


def _run(sectors: list[_Sector], D: Fraction, rel_tol: float, st: QuadratureSettings) -> IntegrationResult:
    Df = float(D)
    n = st.order
    prev = None
    while True:
        parts, cells = [], 0
        for sec in sectors:
            v, c = _sector_value(sec, Df, n, st)
            parts.append(v)
            cells += c
        value = math.fsum(parts)
        if prev is not None:
            err = abs(value - prev)
            if err <= rel_tol * abs(value) or n >= st.max_order:
                if err > rel_tol * abs(value):
                    raise ToleranceError(f"relative error {err / abs(value):.2e} above {rel_tol} at order {n}")
                return IntegrationResult(
                    value,
                    max(err, abs(value) * 1e-15),
                    cells,
                    {"D": str(D), "order": n, "floor": st.floor, "rel_tol": rel_tol, "sectors": len(sectors)},
                )
        prev = value
        n = min(st.max_order, n + max(2, n // 2))


def integrate(spec: IntegrandSpec, rel_tol: float = 1e-6, settings: QuadratureSettings | None = None) -> IntegrationResult:
    """Integrate over all Hepp sectors.  Raises ``ConvergenceError`` when the
    dimension lies beyond the convergence region of the integrand."""
    st = settings or QuadratureSettings()
    g, D = spec.graph, spec.D
    lines = g.line_ids
    if D <= 0:
        raise ConvergenceError("D must be positive")
    if not lines:
        raise ValueError("graph has no lines")
    terms = _t_terms(spec.hu, lines, spec.s)
    L = len(lines)
    sectors: list[_Sector] = []
    if spec.subtraction is None:
        for order in permutations(range(L)):
            sectors.append(_plain_sector(terms, order, D))
    else:
        sub = _t_terms(spec.subtraction, lines, spec.s)
        for order in permutations(range(L)):
            sectors.extend(_difference_sectors(terms, sub, order, D))
    return _run(sectors, D, rel_tol, st)


def integrate_graph(g: RibbonGraph, D, s=1, rel_tol: float = 1e-6, settings: QuadratureSettings | None = None):
    return integrate(IntegrandSpec(g, Fraction(D), Fraction(s)), rel_tol, settings)


# ---------------------------------------------------------------------------
# renormalized integrals


def counterterm_polynomial(g: RibbonGraph, ct) -> Poly:
    """``HU^l_S(t_S) * HU_{G/S}(t_{G-S})`` in the ring of ``G``."""
    ring = ring_for(g)
    return ct.leading.to_ring(ring) * ct.quotient_hu.to_ring(ring)


def integrate_renormalized(
    g: RibbonGraph, D, s=1, rel_tol: float = 1e-6, settings: QuadratureSettings | None = None
) -> IntegrationResult:
    """Integrate ``R`` applied to the integrand.

    Counterterms whose generalized Taylor operator vanishes at ``D`` drop
    out.  Supported: no active counterterm, or exactly one that keeps only
    its leading order.
    """
    D = Fraction(D)
    bp = renormalized_blueprint(g)
    active = [ct for ct in bp.counterterms.values() if ct.active_order(D) >= 0]
    hu = hu_det(g, ring_for(g))
    if not active:
        res = integrate(IntegrandSpec(g, D, Fraction(s), hu), rel_tol, settings)
    elif len(active) == 1 and active[0].active_order(D) == 0:
        ct = active[0]
        spec = IntegrandSpec(g, D, Fraction(s), hu, counterterm_polynomial(g, ct))
        res = integrate(spec, rel_tol, settings)
    else:
        raise NotImplementedError(
            "only a single active counterterm kept at leading order is supported; active: "
            + ", ".join(f"{sorted(ct.lines)} (order {ct.active_order(D)})" for ct in active)
        )
    res.settings["active_counterterms"] = [sorted(ct.lines) for ct in active]
    return res


# ---------------------------------------------------------------------------
# residues


@dataclass
class ResidueFit:
    pole: Fraction
    samples: list[float]
    values: list[float]
    products: list[float]
    residue: float
    drift: float

    def as_dict(self) -> dict:
        return {
            "pole": f"{self.pole.numerator}/{self.pole.denominator}",
            "samples": self.samples,
            "values": self.values,
            "products": self.products,
            "residue": self.residue,
            "drift": self.drift,
        }


def fit_residue(
    g: RibbonGraph,
    pole,
    samples: Iterable,
    s=1,
    rel_tol: float = 1e-6,
    settings: QuadratureSettings | None = None,
) -> ResidueFit:
    """Fit ``A(D) * (pole - D)`` to a constant over samples below the pole.

    The pole must be predicted by power counting and the values must grow
    strictly as the samples approach it.
    """
    pole = Fraction(pole)
    known = poles(classify(g)).locations()
    if pole not in known:
        raise ValueError(f"no pole at D={pole}; power counting predicts {[str(p) for p in known]}")
    ds = sorted(Fraction(d) for d in samples)
    if not ds or ds[-1] >= pole:
        raise ValueError("samples must lie below the pole")
    hu = hu_det(g, ring_for(g))
    vals = [integrate(IntegrandSpec(g, d, Fraction(s), hu), rel_tol, settings).value for d in ds]
    if any(b <= a for a, b in zip(vals, vals[1:])):
        raise ValueError(f"values do not grow toward D={pole}: {vals}")
    prods = [v * float(pole - d) for v, d in zip(vals, ds)]
    residue = math.fsum(prods) / len(prods)
    drift = max(abs(p - residue) for p in prods) / abs(residue)
    return ResidueFit(pole, [float(d) for d in ds], vals, prods, residue, drift)
