"""Exact arithmetic: sparse multivariate polynomials over the rationals,
rational functions, fraction-free determinants and integer Pfaffians.

Monomials are packed into a single Python integer.  Each variable owns a
fixed-width bit field and the total degree sits in the most significant
field, so comparing two packed keys as integers is exactly the graded
lexicographic order with ``x0 < x1 < ... < x_{k-1}``.  Products of
monomials are integer additions and divisibility is a borrow test on the
guard bits.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterable, Mapping, Sequence

_BITS = 16
_FIELD = (1 << (_BITS - 1)) - 1  # usable exponent range per field


def _norm(c):
    """Demote integral Fractions to int so dict values stay cheap."""
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def _div_coeff(a, b):
    if type(a) is int and type(b) is int and a % b == 0:
        return a // b
    return _norm(Fraction(a) / b)


class PolyRing:
    """An ordered set of variable names.

    Variables listed later are larger in the term order, so building the ring
    as ``("t1", ..., "tL", "s")`` gives the ``t1 < ... < tL < s`` convention.
    """

    def __init__(self, names: Sequence[str]):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        self.names = names
        self.nvars = len(names)
        self.index = {name: k for k, name in enumerate(names)}
        self._deg_shift = self.nvars * _BITS
        guard = 0
        for k in range(self.nvars + 1):
            guard |= 1 << (k * _BITS + _BITS - 1)
        self._guard = guard

    def __eq__(self, other):
        return isinstance(other, PolyRing) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"PolyRing({', '.join(self.names)})"

    # monomial packing -----------------------------------------------------

    def pack(self, exps: Sequence[int]) -> int:
        key = 0
        total = 0
        for k, e in enumerate(exps):
            if e < 0 or e > _FIELD:
                raise OverflowError(f"exponent {e} out of range")
            key |= e << (k * _BITS)
            total += e
        if total > _FIELD:
            raise OverflowError(f"total degree {total} out of range")
        return key | (total << self._deg_shift)

    def unpack(self, key: int) -> tuple[int, ...]:
        return tuple((key >> (k * _BITS)) & _FIELD for k in range(self.nvars))

    def divides(self, d: int, m: int) -> bool:
        g = self._guard
        return ((m | g) - d) & g == g

    # constructors ---------------------------------------------------------

    @property
    def zero(self) -> Poly:
        return Poly(self, {})

    @property
    def one(self) -> Poly:
        return Poly(self, {0: 1})

    def const(self, c) -> Poly:
        c = _norm(c)
        return Poly(self, {0: c} if c else {})

    def gen(self, name: str) -> Poly:
        exps = [0] * self.nvars
        exps[self.index[name]] = 1
        return Poly(self, {self.pack(exps): 1})

    def gens(self) -> tuple[Poly, ...]:
        return tuple(self.gen(name) for name in self.names)

    def from_terms(self, terms: Iterable[tuple[Sequence[int], object]]) -> Poly:
        out: dict[int, object] = {}
        for exps, c in terms:
            key = self.pack(exps)
            v = out.get(key, 0) + c
            if v:
                out[key] = _norm(v)
            else:
                out.pop(key, None)
        return Poly(self, out)

    def extend(self, *names: str) -> PolyRing:
        return PolyRing(self.names + tuple(n for n in names if n not in self.index))


class Poly:
    """Sparse polynomial with rational coefficients over a :class:`PolyRing`.

    Instances are treated as immutable; arithmetic returns new objects.
    """

    __slots__ = ("ring", "_t", "_hash")

    def __init__(self, ring: PolyRing, terms: dict):
        self.ring = ring
        self._t = terms
        self._hash = None

    # basic protocol -------------------------------------------------------

    def _coerce(self, other) -> Poly:
        if isinstance(other, Poly):
            if other.ring is not self.ring and other.ring != self.ring:
                raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        return NotImplemented

    def __bool__(self):
        return bool(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def is_constant(self) -> bool:
        return not self._t or (len(self._t) == 1 and 0 in self._t)

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self._t.get(0, 0)

    def __len__(self):
        return len(self._t)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.ring == other.ring and self._t == other._t

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self._t.items())))
        return self._hash

    def __neg__(self):
        return Poly(self.ring, {k: -c for k, c in self._t.items()})

    def __pos__(self):
        return self

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other._t:
            return self
        if not self._t:
            return other
        out = dict(self._t)
        for k, c in other._t.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                del out[k]
        return Poly(self.ring, out)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other._t:
            return self
        out = dict(self._t)
        for k, c in other._t.items():
            v = out.get(k, 0) - c
            if v:
                out[k] = v
            else:
                del out[k]
        return Poly(self.ring, out)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return self.ring.zero
            return Poly(self.ring, {k: _norm(c * other) for k, c in self._t.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._t, other._t
        if not a or not b:
            return self.ring.zero
        if len(a) < len(b):
            a, b = b, a
        if len(b) == 1:
            (kb, cb), = b.items()
            if kb == 0:
                return Poly(self.ring, {k: _norm(c * cb) for k, c in a.items()})
            return Poly(self.ring, {k + kb: _norm(c * cb) for k, c in a.items()})
        out: dict[int, object] = {}
        get = out.get
        for kb, cb in b.items():
            for ka, ca in a.items():
                k = ka + kb
                out[k] = get(k, 0) + ca * cb
        return Poly(self.ring, {k: _norm(c) for k, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power of a polynomial")
        result = self.ring.one
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # division -------------------------------------------------------------

    def exact_div(self, d) -> Poly:
        """Quotient of an exact division; raises ``ArithmeticError`` otherwise."""
        if isinstance(d, (int, Fraction)):
            if not d:
                raise ZeroDivisionError("division by zero polynomial")
            return Poly(self.ring, {k: _div_coeff(c, d) for k, c in self._t.items()})
        d = self._coerce(d)
        if not d._t:
            raise ZeroDivisionError("division by zero polynomial")
        if not self._t:
            return self
        if len(d._t) == 1:
            (kd, cd), = d._t.items()
            ring = self.ring
            out = {}
            for k, c in self._t.items():
                if not ring.divides(kd, k):
                    raise ArithmeticError("inexact polynomial division")
                out[k - kd] = _div_coeff(c, cd)
            return Poly(ring, out)
        ring = self.ring
        ld = max(d._t)
        lc = d._t[ld]
        rest = [(k, c) for k, c in d._t.items() if k != ld]
        r = dict(self._t)
        heap = [-k for k in r]
        heapq.heapify(heap)
        q: dict[int, object] = {}
        while heap:
            k = -heapq.heappop(heap)
            c = r.pop(k, 0)
            if not c:
                continue
            if not ring.divides(ld, k):
                raise ArithmeticError("inexact polynomial division")
            mq = k - ld
            cq = _div_coeff(c, lc)
            q[mq] = cq
            for kd, cd in rest:
                kk = mq + kd
                old = r.get(kk)
                if old is None:
                    r[kk] = -cq * cd
                    heapq.heappush(heap, -kk)
                else:
                    v = old - cq * cd
                    if v:
                        r[kk] = v
                    else:
                        del r[kk]
        return Poly(ring, {k: _norm(c) for k, c in q.items()})

    def divides_exactly(self, other: Poly) -> bool:
        try:
            other.exact_div(self)
        except ArithmeticError:
            return False
        return True

    # inspection -----------------------------------------------------------

    def terms(self) -> list[tuple[tuple[int, ...], object]]:
        """(exponents, coefficient) pairs in ascending graded-lex order."""
        unpack = self.ring.unpack
        return [(unpack(k), self._t[k]) for k in sorted(self._t)]

    def coefficients(self) -> list:
        return [self._t[k] for k in sorted(self._t)]

    def coefficient(self, exps: Sequence[int]):
        return self._t.get(self.ring.pack(exps), 0)

    def coeff_of(self, **powers: int):
        exps = [0] * self.ring.nvars
        for name, e in powers.items():
            exps[self.ring.index[name]] = e
        return self.coefficient(exps)

    def leading_term(self):
        k = max(self._t)
        return self.ring.unpack(k), self._t[k]

    def total_degree(self) -> int:
        return max((k >> self.ring._deg_shift for k in self._t), default=-1)

    def degree(self, var: str) -> int:
        shift = self.ring.index[var] * _BITS
        return max(((k >> shift) & _FIELD for k in self._t), default=-1)

    def min_degree_in(self, variables: Iterable[str]) -> int:
        """Smallest total degree in ``variables`` over all monomials."""
        idx = [self.ring.index[v] for v in variables]
        best = None
        for k in self._t:
            d = 0
            for i in idx:
                d += (k >> (i * _BITS)) & _FIELD
            if best is None or d < best:
                best = d
        if best is None:
            raise ValueError("min degree of the zero polynomial")
        return best

    def part_of_degree_in(self, variables: Iterable[str], degree: int) -> Poly:
        idx = [self.ring.index[v] for v in variables]
        out = {}
        for k, c in self._t.items():
            d = 0
            for i in idx:
                d += (k >> (i * _BITS)) & _FIELD
            if d == degree:
                out[k] = c
        return Poly(self.ring, out)

    def collect(self, var: str) -> dict[int, Poly]:
        """Split into ``{power: coefficient}`` with respect to ``var``."""
        ring = self.ring
        i = ring.index[var]
        shift = i * _BITS
        out: dict[int, dict] = {}
        for k, c in self._t.items():
            e = (k >> shift) & _FIELD
            kk = k - (e << shift) - (e << ring._deg_shift)
            out.setdefault(e, {})[kk] = c
        return {e: Poly(ring, t) for e, t in sorted(out.items())}

    def variables(self) -> set[str]:
        seen = 0
        for k in self._t:
            seen |= k
        return {
            name
            for i, name in enumerate(self.ring.names)
            if (seen >> (i * _BITS)) & _FIELD
        }

    def content(self):
        """Positive gcd of the coefficients (rationals allowed)."""
        if not self._t:
            return 0
        nums = [Fraction(c).numerator for c in self._t.values()]
        dens = [Fraction(c).denominator for c in self._t.values()]
        g = reduce(gcd, nums)
        lcm = reduce(lambda a, b: a * b // gcd(a, b), dens)
        return _norm(Fraction(abs(g), lcm))

    # transformation -------------------------------------------------------

    def to_ring(self, ring: PolyRing) -> Poly:
        if ring == self.ring:
            return self
        mapping = [ring.index[name] for name in self.ring.names]
        out = {}
        for k, c in self._t.items():
            exps = [0] * ring.nvars
            for i, e in enumerate(self.ring.unpack(k)):
                if e:
                    exps[mapping[i]] = e
            out[ring.pack(exps)] = c
        return Poly(ring, out)

    def rescale(self, variables: Iterable[str], by: str, power: int) -> Poly:
        """Substitute ``x -> by**power * x`` for every ``x`` in ``variables``."""
        ring = self.ring
        idx = [ring.index[v] for v in variables]
        j = ring.index[by]
        out = {}
        for k, c in self._t.items():
            exps = list(ring.unpack(k))
            extra = sum(exps[i] for i in idx) * power
            exps[j] += extra
            out[ring.pack(exps)] = c
        return Poly(ring, out)

    def subs(self, values: Mapping[str, object]) -> Poly:
        """Substitute numbers for some variables, keeping the ring."""
        ring = self.ring
        idx = [(ring.index[name], v) for name, v in values.items()]
        out: dict[int, object] = {}
        for k, c in self._t.items():
            exps = list(ring.unpack(k))
            for i, v in idx:
                if exps[i]:
                    c = c * v ** exps[i]
                    exps[i] = 0
            kk = ring.pack(exps)
            out[kk] = out.get(kk, 0) + c
        return Poly(ring, {k: _norm(c) for k, c in out.items() if c})

    def evaluate(self, values: Mapping[str, object]):
        """Full evaluation; missing variables are an error."""
        ring = self.ring
        vals = [values[name] for name in ring.names]
        total = 0
        for k, c in self._t.items():
            term = c
            for i, e in enumerate(ring.unpack(k)):
                if e:
                    term = term * vals[i] ** e
            total = total + term
        return _norm(total) if isinstance(total, Fraction) else total

    def compile(self, order: Sequence[str]):
        """Return ``(coeffs, exponents)`` arrays for fast float evaluation."""
        import numpy as np

        ring = self.ring
        cols = [ring.index[name] for name in order]
        rows = []
        coeffs = []
        for k, c in self._t.items():
            exps = ring.unpack(k)
            if any(e for i, e in enumerate(exps) if i not in cols):
                raise ValueError("polynomial depends on a variable outside `order`")
            rows.append([exps[i] for i in cols])
            coeffs.append(float(c))
        return np.array(coeffs), np.array(rows, dtype=np.int64).reshape(len(rows), len(cols))

    # printing -------------------------------------------------------------

    def __str__(self):
        if not self._t:
            return "0"
        names = self.ring.names
        parts = []
        for exps, c in self.terms():
            factors = []
            for name, e in zip(names, exps):
                if e == 1:
                    factors.append(name)
                elif e:
                    factors.append(f"{name}^{e}")
            mono = "*".join(factors)
            neg = c < 0
            mag = -c if neg else c
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            parts.append(("-" if neg else "+", body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"Poly({self})"


def parse_poly(ring: PolyRing, text: str) -> Poly:
    """Parse an arithmetic expression in the ring's variables.

    Accepts ``+ - * ^ **`` and parentheses, integers and rationals ``p/q``.
    Used for golden polynomials written in factored form.
    """
    import ast

    tree = ast.parse(text.replace("^", "**"), mode="eval")

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return ring.const(node.value)
        if isinstance(node, ast.Name):
            return ring.gen(node.id)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -ev(node.operand)
        if isinstance(node, ast.BinOp):
            a = ev(node.left)
            if isinstance(node.op, ast.Pow):
                if not isinstance(node.right, ast.Constant):
                    raise ValueError("exponent must be an integer literal")
                return a ** node.right.value
            b = ev(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if isinstance(node.op, ast.Div):
                return a.exact_div(b.constant_value())
        raise ValueError(f"unsupported expression: {ast.dump(node)}")

    return ev(tree)


# ---------------------------------------------------------------------------
# rational functions


@dataclass(frozen=True, eq=False)
class RationalFn:
    """``num / den`` with a nonzero denominator.

    Normalized by clearing rational coefficients, dividing out the common
    integer content and the common monomial factor, and making the leading
    denominator coefficient positive.  No polynomial gcd is taken, so
    equality is decided by cross multiplication.
    """

    num: Poly
    den: Poly

    def __post_init__(self):
        if self.den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        num, den = _normalize_pair(self.num, self.den)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @classmethod
    def of(cls, p: Poly) -> RationalFn:
        return cls(p, p.ring.one)

    @property
    def ring(self):
        return self.num.ring

    def __eq__(self, other):
        if isinstance(other, Poly):
            other = RationalFn.of(other)
        if isinstance(other, (int, Fraction)):
            other = RationalFn.of(self.ring.const(other))
        if not isinstance(other, RationalFn):
            return NotImplemented
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        raise TypeError("RationalFn is not hashable (equality is by cross-multiplication)")

    def __add__(self, other):
        other = _as_rf(other, self.ring)
        if self.den == other.den:
            return RationalFn(self.num + other.num, self.den)
        return RationalFn(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFn(-self.num, self.den)

    def __sub__(self, other):
        return self + (-_as_rf(other, self.ring))

    def __rsub__(self, other):
        return _as_rf(other, self.ring) - self

    def __mul__(self, other):
        other = _as_rf(other, self.ring)
        return RationalFn(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_rf(other, self.ring)
        if other.num.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RationalFn(self.num * other.den, self.den * other.num)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def to_poly(self) -> Poly:
        if not self.den.is_constant():
            raise ValueError("rational function has a non-constant denominator")
        return self.num.exact_div(self.den.constant_value())

    def evaluate(self, values):
        return self.num.evaluate(values) / self.den.evaluate(values)

    def limit_zero(self, var: str) -> RationalFn | None:
        """Limit as ``var -> 0``, or ``None`` if it diverges."""
        a = self.num.collect(var)
        b = self.den.collect(var)
        if not a:
            return self
        na, nb = min(a), min(b)
        if na > nb:
            return RationalFn.of(self.ring.zero)
        if na < nb:
            return None
        return RationalFn(a[na], b[nb])

    def __str__(self):
        if self.den == self.ring.one:
            return str(self.num)
        return f"({self.num}) / ({self.den})"

    __repr__ = __str__


def _as_rf(x, ring) -> RationalFn:
    if isinstance(x, RationalFn):
        return x
    if isinstance(x, Poly):
        return RationalFn.of(x)
    return RationalFn.of(ring.const(x))


def _normalize_pair(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    ring = num.ring
    if num.is_zero():
        return num, ring.one
    # common monomial factor
    common = None
    for p in (num, den):
        for k in p._t:
            exps = ring.unpack(k)
            common = exps if common is None else tuple(min(a, b) for a, b in zip(common, exps))
    if common and any(common):
        m = ring.pack(common)
        num = Poly(ring, {k - m: c for k, c in num._t.items()})
        den = Poly(ring, {k - m: c for k, c in den._t.items()})
    # rational content: num/den = (cn/cd) * (num/cn) / (den/cd)
    cn, cd = Fraction(num.content()), Fraction(den.content())
    ratio = cn / cd
    num = num * (ratio.numerator / cn)
    den = den * (ratio.denominator / cd)
    if den.leading_term()[1] < 0:
        num, den = -num, -den
    return num, den


# ---------------------------------------------------------------------------
# determinants and Pfaffians


def _exact(a, b):
    if isinstance(a, Poly):
        return a.exact_div(b)
    if isinstance(b, Poly):
        return b.ring.const(a).exact_div(b)
    if type(a) is int and type(b) is int:
        q, r = divmod(a, b)
        # exact over Z for integer matrices; over Q the quotient may be a fraction
        return q if not r else Fraction(a, b)
    return _norm(Fraction(a) / b)


def _is_zero(x) -> bool:
    return not x


def _pivot_cost(x):
    if isinstance(x, Poly):
        return (len(x._t), x.total_degree())
    return (1, 0)


def _choose_pivot(a, k, n):
    """Smallest nonzero entry of the trailing block; keeps Bareiss
    intermediates short when integer rows sit next to polynomial ones."""
    best = None
    for i in range(k, n):
        row = a[i]
        for j in range(k, n):
            x = row[j]
            if not _is_zero(x):
                cost = _pivot_cost(x)
                if best is None or cost < best[0]:
                    best = (cost, i, j)
                    if cost == (1, 0):
                        return i, j
    return None if best is None else best[1:]


def _bareiss_forward(a, n, width, perm):
    """In-place fraction-free elimination on the first ``n`` columns with
    full pivoting.  Columns beyond ``n`` ride along.  Returns the row/column
    swap sign, or 0 if the leading block is singular."""
    zero = _zero_like(a)
    sign = 1
    prev = 1
    for k in range(n):
        pos = _choose_pivot(a, k, n)
        if pos is None:
            return 0
        i, j = pos
        if i != k:
            a[k], a[i] = a[i], a[k]
            sign = -sign
        if j != k:
            for row in a:
                row[k], row[j] = row[j], row[k]
            perm[k], perm[j] = perm[j], perm[k]
            sign = -sign
        piv = a[k][k]
        rowk = a[k]
        for i in range(k + 1, n):
            rowi = a[i]
            f = rowi[k]
            if _is_zero(f):
                for j in range(k + 1, width):
                    x = rowi[j]
                    if not _is_zero(x):
                        rowi[j] = _exact(x * piv, prev)
            else:
                for j in range(k + 1, width):
                    x = rowi[j]
                    y = rowk[j]
                    if _is_zero(y):
                        val = x * piv if not _is_zero(x) else x
                    elif _is_zero(x):
                        val = -(f * y)
                    else:
                        val = x * piv - f * y
                    rowi[j] = _exact(val, prev) if not _is_zero(val) else zero
            rowi[k] = zero
        prev = piv
    return sign


def _zero_like(a):
    for row in a:
        for x in row:
            if isinstance(x, Poly):
                return x.ring.zero
    return 0


def det_bareiss(m: Sequence[Sequence]) -> object:
    """Determinant by fraction-free (Bareiss) elimination.

    Entries may be ints, Fractions or :class:`Poly` over one ring.  Each
    step pivots on the smallest nonzero entry of the trailing block and
    divides exactly by the previous pivot, so no fractions of polynomials
    appear.
    """
    n = len(m)
    if n == 0:
        return 1
    a = [list(row) for row in m]
    if any(len(row) != n for row in a):
        raise ValueError("matrix is not square")
    sign = _bareiss_forward(a, n, n, list(range(n)))
    if sign == 0:
        return _zero_like(a)
    d = a[n - 1][n - 1]
    return -d if sign < 0 else d


def solve_adjugate(m: Sequence[Sequence], rhs_cols: Sequence[Sequence]) -> tuple[object, list[list]]:
    """Fraction-free solve: returns ``(det, Y)`` with ``m @ Y = det * rhs``.

    ``rhs_cols`` is a list of right-hand-side columns.  All arithmetic stays
    in the entry ring; back substitution divides exactly by the Bareiss
    pivots.  If ``m`` is singular, ``det`` is zero and ``Y`` is empty.
    """
    n = len(m)
    k_rhs = len(rhs_cols)
    a = [list(m[i]) + [col[i] for col in rhs_cols] for i in range(n)]
    zero = _zero_like(a)
    perm = list(range(n))
    sign = _bareiss_forward(a, n, n + k_rhs, perm)
    if sign == 0:
        return zero, []
    det = a[n - 1][n - 1]
    # U y = det * b' with U the Bareiss upper triangle and b' the transformed
    # rhs; y is in permuted column order.
    cols = []
    for c in range(k_rhs):
        y = [zero] * n
        for i in range(n - 1, -1, -1):
            acc = det * a[i][n + c] if not _is_zero(a[i][n + c]) else zero
            for j in range(i + 1, n):
                if not _is_zero(a[i][j]) and not _is_zero(y[j]):
                    acc = acc - a[i][j] * y[j]
            y[i] = _exact(acc, a[i][i]) if not _is_zero(acc) else zero
        x = [zero] * n
        for i in range(n):
            x[perm[i]] = y[i]
        cols.append(x)
    if sign < 0:
        det = -det
        cols = [[-x for x in col] for col in cols]
    return det, cols


def _check_antisymmetric(m):
    n = len(m)
    for i in range(n):
        if len(m[i]) != n:
            raise ValueError("matrix is not square")
        if m[i][i]:
            raise ValueError(f"diagonal entry ({i},{i}) is nonzero; not antisymmetric")
        for j in range(i + 1, n):
            if m[i][j] != -m[j][i]:
                raise ValueError(f"entries ({i},{j}) and ({j},{i}) break antisymmetry")


def pfaffian(m: Sequence[Sequence[int]], deleted: Iterable[int] = (), *, check: bool = True) -> int:
    """Exact Pfaffian of an antisymmetric integer matrix after deleting the
    rows and columns listed in ``deleted``.

    Odd dimension after deletion gives 0.  The elimination is the Pfaffian
    analogue of Bareiss: each step replaces the remaining block by the 4x4
    Pfaffians through the pivot pair and divides exactly by the previous
    pivot.
    """
    if check:
        _check_antisymmetric(m)
    gone = set(deleted)
    keep = [i for i in range(len(m)) if i not in gone]
    n = len(keep)
    if n % 2:
        return 0
    if n == 0:
        return 1
    a = [[m[i][j] for j in keep] for i in keep]
    return _pfaffian_inplace(a)


def _pfaffian_inplace(a: list[list[int]]) -> int:
    n = len(a)
    sign = 1
    prev = 1
    idx = list(range(n))
    # `idx` lists the live indices; pairs (idx[0], idx[1]) are eliminated.
    while len(idx) > 2:
        p, rest = idx[0], idx[1:]
        row = a[p]
        for pos, q in enumerate(rest):
            if row[q]:
                break
        else:
            return 0
        if pos:
            rest[0], rest[pos] = rest[pos], rest[0]
            sign = -sign
        q = rest[0]
        piv = row[q]
        others = rest[1:]
        rq = a[q]
        # new a_ij = (piv*a_ij - a_pi*a_qj + a_pj*a_qi) / prev  for i<j in others
        for x, i in enumerate(others):
            ai = a[i]
            api, aqi = row[i], rq[i]
            for j in others[x + 1:]:
                v = piv * ai[j] - api * rq[j] + row[j] * aqi
                if v:
                    v, r = divmod(v, prev)
                    if r:
                        raise ArithmeticError("inexact Pfaffian elimination step")
                ai[j] = v
                a[j][i] = -v
        prev = piv
        idx = others
    result = a[idx[0]][idx[1]]
    return -result if sign < 0 else result


def pfaffian_matchings(m: Sequence[Sequence], deleted: Iterable[int] = ()) -> object:
    """Pfaffian by explicit signed sum over perfect matchings (small sizes)."""
    gone = set(deleted)
    keep = [i for i in range(len(m)) if i not in gone]
    if len(keep) % 2:
        return 0

    def rec(items):
        if not items:
            return 1
        first = items[0]
        total = 0
        for pos in range(1, len(items)):
            other = items[pos]
            entry = m[first][other]
            if not entry:
                continue
            rest = items[1:pos] + items[pos + 1:]
            sign = -1 if (pos - 1) % 2 else 1
            total += sign * entry * rec(rest)
        return total

    return rec(keep)


def inverse_block(
    m: Sequence[Sequence[Poly]],
    rows: Sequence[int],
    cols: Sequence[int],
) -> list[list[RationalFn]]:
    """Block ``(rows, cols)`` of ``m^{-1}`` as reduced rational functions.

    Column ``c`` of the inverse is ``adj(m) e_c / det m``; the adjugate
    columns come from one fraction-free forward elimination on ``[m | E]``.
    """
    n = len(m)
    ring = None
    for row in m:
        for x in row:
            if isinstance(x, Poly):
                ring = x.ring
                break
        if ring:
            break
    if ring is None:
        raise TypeError("inverse_block expects Poly entries")
    unit = [[ring.one if i == c else ring.zero for i in range(n)] for c in cols]
    det, ys = solve_adjugate(m, unit)
    if _is_zero(det):
        raise ZeroDivisionError("matrix is singular")
    return [[RationalFn(ys[ci][r], det) for ci in range(len(cols))] for r in rows]


# ---------------------------------------------------------------------------
# truncated series in one variable


@dataclass(frozen=True)
class Series:
    """``var**nu * (c0 + c1 var + ... + ck var**k) + O(var**(nu+k+1))``.

    Coefficients are :class:`RationalFn` in the remaining variables.
    """

    var: str
    nu: int
    coeffs: tuple

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def to_poly(self) -> Poly:
        """Truncated series as a polynomial in ``var`` (requires nu >= 0 and
        polynomial coefficients)."""
        if self.nu < 0:
            raise ValueError("negative leading exponent: not a polynomial")
        if not self.coeffs:
            raise ValueError("empty series")
        ring = self.coeffs[0].ring
        x = ring.gen(self.var)
        out = ring.zero
        for k, c in enumerate(self.coeffs):
            out = out + c.to_poly() * x ** (self.nu + k)
        return out


def series_in(expr, var: str, order: int) -> Series:
    """Expand ``expr`` (Poly or RationalFn) around ``var = 0``.

    The leading power ``nu`` is factored out exactly from numerator and
    denominator; the remaining quotient is expanded to ``order`` terms past
    the leading one by the recursive division rule.
    """
    if isinstance(expr, Poly):
        expr = RationalFn.of(expr)
    if order < 0:
        raise ValueError("order must be non-negative")
    num = expr.num.collect(var)
    den = expr.den.collect(var)
    if not den:
        raise ZeroDivisionError("denominator vanishes identically")
    ring = expr.ring
    if not num:
        return Series(var, 0, tuple(RationalFn.of(ring.zero) for _ in range(order + 1)))
    a0, b0 = min(num), min(den)
    nu = a0 - b0
    n_coeff = [num.get(a0 + k, ring.zero) for k in range(order + 1)]
    d_coeff = [den.get(b0 + k, ring.zero) for k in range(order + 1)]
    lead = d_coeff[0]
    out: list[RationalFn] = []
    for k in range(order + 1):
        acc = RationalFn.of(n_coeff[k])
        for j in range(1, k + 1):
            if not d_coeff[j].is_zero():
                acc = acc - out[k - j] * d_coeff[j]
        out.append(acc / RationalFn.of(lead))
    return Series(var, nu, tuple(out))


def matmul(a, b):
    """Plain matrix product for list-of-lists with ring entries."""
    n, k, m = len(a), len(b), len(b[0]) if b else 0
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = 0
            for x in range(k):
                if not _is_zero(a[i][x]) and not _is_zero(b[x][j]):
                    acc = acc + a[i][x] * b[x][j]
            row.append(acc)
        out.append(row)
    return out


__all__ = [
    "PolyRing",
    "Poly",
    "RationalFn",
    "Series",
    "parse_poly",
    "det_bareiss",
    "solve_adjugate",
    "pfaffian",
    "pfaffian_matchings",
    "inverse_block",
    "series_in",
    "matmul",
]
