"""Exact commutative algebra over Z, Q and Laurent polynomial rings.

Holds the integer Smith normal form, the abelianization of a presentation,
multivariable Laurent polynomials with rational coefficients, their fraction
field, matrix rank over that field, and Alexander data for first Betti number
one, where Q[t, t^-1] is a principal ideal domain.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd as igcd, lcm as ilcm
from typing import Sequence

from . import _mpoly
from .presentations import FreeRingElt, Presentation, Word, fox_jacobian


class RankMismatch(ValueError):
    """An operation needing a specific first Betti number got another one."""


# --- Laurent polynomials ----------------------------------------------------

class LaurentPoly:
    """Laurent polynomial in ``nvars`` variables with rational coefficients."""

    __slots__ = ("nvars", "terms", "_key")

    def __init__(self, nvars: int, terms: dict | None = None):
        self.nvars = nvars
        clean = {}
        for e, c in (terms or {}).items():
            if c:
                e = tuple(e)
                if len(e) != nvars:
                    raise ValueError(f"exponent {e} has wrong length for {nvars} variables")
                clean[e] = c if isinstance(c, Fraction) else Fraction(c)
        self.terms = clean
        self._key = None

    # constructors
    @classmethod
    def zero(cls, nvars: int) -> "LaurentPoly":
        return cls(nvars)

    @classmethod
    def const(cls, nvars: int, c) -> "LaurentPoly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def one(cls, nvars: int) -> "LaurentPoly":
        return cls.const(nvars, 1)

    @classmethod
    def monomial(cls, exp: Sequence[int], c=1) -> "LaurentPoly":
        return cls(len(exp), {tuple(exp): c})

    @classmethod
    def var(cls, nvars: int, i: int) -> "LaurentPoly":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1})

    # structure
    def key(self) -> tuple:
        if self._key is None:
            self._key = tuple(sorted(self.terms.items()))
        return self._key

    def __hash__(self):
        return hash((self.nvars, self.key()))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentPoly.const(self.nvars, other)
        return isinstance(other, LaurentPoly) and self.nvars == other.nvars and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and (0,) * self.nvars in self.terms)

    def exponents(self) -> list[tuple[int, ...]]:
        return sorted(self.terms)

    def leading(self) -> tuple[tuple[int, ...], Fraction]:
        e = max(self.terms)
        return e, self.terms[e]

    def trailing(self) -> tuple[tuple[int, ...], Fraction]:
        e = min(self.terms)
        return e, self.terms[e]

    # arithmetic
    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            if other.nvars != self.nvars:
                raise ValueError("Laurent polynomials over different variable counts")
            return other
        return LaurentPoly.const(self.nvars, other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return LaurentPoly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return LaurentPoly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            if not self.is_monomial():
                raise ValueError("only monomials have Laurent inverses")
            (e, c), = self.terms.items()
            return LaurentPoly(self.nvars, {tuple(-a * -n for a in e): Fraction(1) / c ** -n})
        out = LaurentPoly.one(self.nvars)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def shift(self, exp: Sequence[int]) -> "LaurentPoly":
        return LaurentPoly(self.nvars, {tuple(a + b for a, b in zip(e, exp)): c for e, c in self.terms.items()})

    def scale(self, c) -> "LaurentPoly":
        return LaurentPoly(self.nvars, {e: v * c for e, v in self.terms.items()})

    def augmentation(self) -> Fraction:
        return sum(self.terms.values(), Fraction(0))

    def substitute(self, point: Sequence) -> Fraction:
        total = Fraction(0)
        for e, c in self.terms.items():
            v = c
            for x, a in zip(point, e):
                v *= Fraction(x) ** a
            total += v
        return total

    def eval_mod(self, point: Sequence[int], p: int) -> int:
        total = 0
        for e, c in self.terms.items():
            v = c.numerator * pow(c.denominator, -1, p)
            for x, a in zip(point, e):
                v = v * pow(x, a, p)
            total += v
        return total % p

    def min_exponents(self) -> tuple[int, ...]:
        return tuple(min(e[i] for e in self.terms) for i in range(self.nvars)) if self.terms else (0,) * self.nvars

    def integer_dict(self) -> tuple[dict, Fraction]:
        """Return ``(d, s)`` with ``d`` integer coefficients and ``self == s * d``."""
        if not self.terms:
            return {}, Fraction(1)
        den = reduce(ilcm, (c.denominator for c in self.terms.values()), 1)
        ints = {e: int(c * den) for e, c in self.terms.items()}
        g = reduce(igcd, ints.values())
        return {e: v // g for e, v in ints.items()}, Fraction(g, den)

    @classmethod
    def from_int_dict(cls, nvars: int, d: dict) -> "LaurentPoly":
        return cls(nvars, d)

    # text
    def variable_names(self) -> list[str]:
        return default_names(self.nvars)

    def format(self, names: Sequence[str] | None = None) -> str:
        return format_terms(self.terms, names or default_names(self.nvars))

    __str__ = format

    def __repr__(self):
        return f"LaurentPoly({self.format()!r})"


def default_names(nvars: int) -> list[str]:
    return ["t"] if nvars == 1 else [f"t{i + 1}" for i in range(nvars)]


def _format_mono(e: Sequence[int], names: Sequence[str]) -> str:
    parts = []
    for name, a in zip(names, e):
        if a == 1:
            parts.append(name)
        elif a:
            parts.append(f"{name}^{a}")
    return "*".join(parts)


def format_terms(terms: dict, names: Sequence[str]) -> str:
    if not terms:
        return "0"
    out = []
    for i, e in enumerate(sorted(terms)):
        c = terms[e]
        mono = _format_mono(e, names)
        mag = abs(c)
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        if i == 0:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append(("- " if c < 0 else "+ ") + body)
    return " ".join(out)


def _split_signed_terms(text: str) -> list[str]:
    terms, cur = [], ""
    prev = ""
    for ch in text:
        if ch in "+-" and cur.strip() and prev != "^":
            terms.append(cur)
            cur = ch
        else:
            cur += ch
        if not ch.isspace():
            prev = ch
    if cur.strip():
        terms.append(cur)
    return terms


def parse_laurent(text: str, nvars: int, names: Sequence[str] | None = None) -> LaurentPoly:
    """Parse the report text form, e.g. ``1 - t + t^2`` or ``t1^-1*t2 + 3``."""
    names = list(names or default_names(nvars))
    aliases = {n: i for i, n in enumerate(names)}
    if nvars == 1:
        aliases.setdefault("t1", 0)
        aliases.setdefault("t", 0)
    text = text.strip()
    if text in ("", "0"):
        return LaurentPoly.zero(nvars)
    out = LaurentPoly.zero(nvars)
    for raw in _split_signed_terms(text):
        term = raw.replace(" ", "")
        sign = 1
        while term and term[0] in "+-":
            if term[0] == "-":
                sign = -sign
            term = term[1:]
        if not term:
            raise ValueError(f"empty term in {text!r}")
        coef = Fraction(sign)
        exp = [0] * nvars
        for factor in term.split("*"):
            if re.fullmatch(r"\d+(/\d+)?", factor):
                coef *= Fraction(factor)
                continue
            m = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_]*)(?:\^(-?\d+))?", factor)
            if not m or m.group(1) not in aliases:
                raise ValueError(f"bad factor {factor!r} in {text!r}")
            exp[aliases[m.group(1)]] += int(m.group(2) or 1)
        out = out + LaurentPoly(nvars, {tuple(exp): coef})
    return out


# --- Euclidean domains and Smith normal form --------------------------------

class IntegerDomain:
    zero, one = 0, 1

    @staticmethod
    def is_zero(a):
        return a == 0

    @staticmethod
    def norm(a):
        return abs(a)

    @staticmethod
    def divmod(a, b):
        return divmod(a, b)

    @staticmethod
    def unit_part(a):
        """Unit u with a / u canonical, and its inverse."""
        return (-1, -1) if a < 0 else (1, 1)


class LaurentPIDDomain:
    """Q[t, t^-1]: Euclidean with norm = exponent span."""

    zero = LaurentPoly.zero(1)
    one = LaurentPoly.one(1)

    @staticmethod
    def is_zero(a):
        return not a

    @staticmethod
    def norm(a):
        es = [e[0] for e in a.terms]
        return (max(es) - min(es), len(a.terms))

    @staticmethod
    def divmod(a, b):
        return laurent1_divmod(a, b)

    @staticmethod
    def unit_part(a):
        (lo,), _ = a.trailing()
        _, c = a.leading()
        u = LaurentPoly(1, {(lo,): c})
        return u, u ** -1


def laurent1_divmod(a: LaurentPoly, b: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    """Division in Q[t, t^-1]: ``a = q*b + r`` with span(r) < span(b)."""
    if not b:
        raise ZeroDivisionError("division by zero Laurent polynomial")
    if not a:
        return LaurentPoly.zero(1), LaurentPoly.zero(1)
    (alo,), _ = a.trailing()
    (blo,), _ = b.trailing()
    num = {e[0] - alo: c for e, c in a.terms.items()}
    den = {e[0] - blo: c for e, c in b.terms.items()}
    dn = max(den)
    lc = den[dn]
    quot: dict = {}
    while num and max(num) >= dn:
        top = max(num)
        f = num[top] / lc
        k = top - dn
        quot[k] = f
        for e, c in den.items():
            v = num.get(e + k, 0) - f * c
            if v:
                num[e + k] = v
            else:
                num.pop(e + k, None)
    q = LaurentPoly(1, {(k + alo - blo,): c for k, c in quot.items()})
    r = LaurentPoly(1, {(k + alo,): c for k, c in num.items()})
    return q, r


def _identity(n, dom):
    return [[dom.one if i == j else dom.zero for j in range(n)] for i in range(n)]


def smith_normal_form(M: Sequence[Sequence], dom=IntegerDomain, inverses: bool = False):
    """Smith normal form over a Euclidean domain.

    Returns ``(U, D, V)`` (plus ``(Uinv, Vinv)`` when ``inverses``) with
    ``U*M*V == D``, ``D`` diagonal, each diagonal entry dividing the next and
    normalized by ``dom.unit_part``.
    """
    m = len(M)
    n = len(M[0]) if m else 0
    D = [list(row) for row in M]
    U, V = _identity(m, dom), _identity(n, dom)
    Ui, Vi = _identity(m, dom), _identity(n, dom)

    def row_add(i, j, q):  # row_i += q * row_j
        D[i] = [a + q * b for a, b in zip(D[i], D[j])]
        U[i] = [a + q * b for a, b in zip(U[i], U[j])]
        for r in Ui:
            r[j] = r[j] - r[i] * q

    def col_add(i, j, q):  # col_i += col_j * q
        for r in D:
            r[i] = r[i] + r[j] * q
        for r in V:
            r[i] = r[i] + r[j] * q
        Vi[j] = [a - q * b for a, b in zip(Vi[j], Vi[i])]

    def row_swap(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]
        for r in Ui:
            r[i], r[j] = r[j], r[i]

    def col_swap(i, j):
        for r in D:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]
        Vi[i], Vi[j] = Vi[j], Vi[i]

    def row_scale(i, u, uinv):
        D[i] = [a * uinv for a in D[i]]
        U[i] = [a * uinv for a in U[i]]
        for r in Ui:
            r[i] = r[i] * u

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if not dom.is_zero(D[i][j]):
                        nm = dom.norm(D[i][j])
                        if best is None or nm < best[0]:
                            best = (nm, i, j)
            if best is None:
                break
            _, i, j = best
            if i != t:
                row_swap(i, t)
            if j != t:
                col_swap(j, t)
            p = D[t][t]
            dirty = False
            for i in range(t + 1, m):
                if not dom.is_zero(D[i][t]):
                    q, r = dom.divmod(D[i][t], p)
                    row_add(i, t, -q)
                    dirty = dirty or not dom.is_zero(r)
            for j in range(t + 1, n):
                if not dom.is_zero(D[t][j]):
                    q, r = dom.divmod(D[t][j], p)
                    col_add(j, t, -q)
                    dirty = dirty or not dom.is_zero(r)
            if dirty:
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if not dom.is_zero(dom.divmod(D[i][j], p)[1])), None)
            if bad is None:
                break
            row_add(t, bad[0], dom.one)
        if best is None:
            break
        u, uinv = dom.unit_part(D[t][t])
        row_scale(t, u, uinv)
    if inverses:
        return U, D, V, Ui, Vi
    return U, D, V


def snf_int(M: Sequence[Sequence[int]]):
    """Integer Smith normal form ``(U, D, V)`` with ``U*M*V == D``."""
    return smith_normal_form([[int(x) for x in row] for row in M], IntegerDomain)


def diagonal(D) -> list:
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0))]


def int_det(M: Sequence[Sequence[int]]) -> int:
    """Determinant by fraction-free elimination."""
    n = len(M)
    A = [list(map(int, r)) for r in M]
    sign, prev = 1, 1
    for k in range(n):
        piv = next((i for i in range(k, n) if A[i][k]), None)
        if piv is None:
            return 0
        if piv != k:
            A[k], A[piv] = A[piv], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[k][k] * A[i][j] - A[i][k] * A[k][j]) // prev
            A[i][k] = 0
        prev = A[k][k]
    return sign * (A[n - 1][n - 1] if n else 1)


def q_rank(M: Sequence[Sequence]) -> int:
    """Rank over Q of a matrix of rationals."""
    A = [[Fraction(x) for x in row] for row in M]
    rank = 0
    ncols = len(A[0]) if A else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        for i in range(rank + 1, len(A)):
            if A[i][c]:
                f = A[i][c] / A[rank][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[rank])]
        rank += 1
    return rank


def matmul(A, B):
    return [[sum((a * b for a, b in zip(row, col)), 0) for col in zip(*B)] for row in A]


# --- abelianization ---------------------------------------------------------

@dataclass(frozen=True)
class AbelianizationData:
    """H_1 of a presentation: free rank, torsion and coordinates.

    ``projection[i]`` is generator ``i`` in the free part Z^b; ``lift[k]`` is
    an exponent vector on the generators whose projection is the k-th basis
    vector.
    """

    ngens: int
    b: int
    torsion: tuple[int, ...]
    projection: tuple[tuple[int, ...], ...]
    lift: tuple[tuple[int, ...], ...]
    relation_rank: int
    divisors: tuple[int, ...]
    change_of_basis: tuple[tuple[int, ...], ...]

    def project_vector(self, v: Sequence[int]) -> tuple[int, ...]:
        return tuple(sum(v[i] * self.projection[i][k] for i in range(self.ngens)) for k in range(self.b))

    def project_word(self, w: Word) -> tuple[int, ...]:
        return self.project_vector(w.exponent_sums(self.ngens))

    def coordinates(self, v: Sequence[int]) -> list[int]:
        V = self.change_of_basis
        return [sum(v[i] * V[i][j] for i in range(self.ngens)) for j in range(self.ngens)]

    def is_trivial_vector(self, v: Sequence[int]) -> bool:
        """Whether an exponent vector is zero in H_1(G; Z), torsion included."""
        c = self.coordinates(v)
        for j, x in enumerate(c):
            d = self.divisors[j] if j < len(self.divisors) else 0
            if d == 0:
                if x:
                    return False
            elif x % d:
                return False
        return True


def abelianization(p: Presentation) -> AbelianizationData:
    g = p.ngens
    R = p.exponent_matrix()
    if not R or g == 0:
        ident = tuple(tuple(int(i == j) for j in range(g)) for i in range(g))
        return AbelianizationData(g, g, (), ident, ident, 0, (0,) * g, ident)
    U, D, V, Ui, Vi = smith_normal_form(R, IntegerDomain, inverses=True)
    diag = diagonal(D)
    rank = sum(1 for d in diag if d)
    b = g - rank
    divisors = tuple(diag[:rank]) + (0,) * b
    torsion = tuple(d for d in diag[:rank] if d > 1)
    projection = tuple(tuple(V[i][j] for j in range(rank, g)) for i in range(g))
    lift = tuple(tuple(Vi[j]) for j in range(rank, g))
    return AbelianizationData(g, b, torsion, projection, lift, rank, divisors,
                              tuple(tuple(r) for r in V))


def specialize(x: FreeRingElt, ab: AbelianizationData) -> LaurentPoly:
    out: dict = {}
    for w, c in x.terms.items():
        e = ab.project_word(w)
        out[e] = out.get(e, 0) + c
    return LaurentPoly(ab.b, out)


def specialize_jacobian(J: Sequence[Sequence[FreeRingElt]], ab: AbelianizationData) -> list[list[LaurentPoly]]:
    return [[specialize(x, ab) for x in row] for row in J]


def boundary_column(ab: AbelianizationData) -> list[list[LaurentPoly]]:
    """The 1-cell boundary column (x_i - 1) pushed to Z[Z^b]."""
    return [[LaurentPoly.monomial(ab.projection[i]) - 1] for i in range(ab.ngens)]


# --- rank over Q(t_1..t_b) --------------------------------------------------

MODULUS = (1 << 61) - 1


@dataclass(frozen=True)
class RankWitness:
    rank: int
    pivots: tuple[tuple[int, int], ...]
    modular_rank: int


def _modular_rank(M: Sequence[Sequence[LaurentPoly]], nvars: int, seed: int = 20240601) -> int:
    rng = random.Random(seed)
    point = [rng.randrange(2, MODULUS - 1) for _ in range(nvars)]
    A = [[x.eval_mod(point, MODULUS) for x in row] for row in M]
    rank = 0
    ncols = len(A[0]) if A else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = pow(A[rank][c], -1, MODULUS)
        for i in range(rank + 1, len(A)):
            if A[i][c]:
                f = A[i][c] * inv % MODULUS
                A[i] = [(a - f * b) % MODULUS for a, b in zip(A[i], A[rank])]
        rank += 1
    return rank


def laurent_rank_witness(M: Sequence[Sequence[LaurentPoly]]) -> RankWitness:
    """Rank over Q(t_1..t_b) by Bareiss elimination with fewest-terms pivoting.

    A modular evaluation gives a lower bound that must never exceed the exact
    answer; the exact elimination always runs.
    """
    rows = len(M)
    cols = len(M[0]) if rows else 0
    if rows == 0 or cols == 0:
        return RankWitness(0, (), 0)
    nvars = M[0][0].nvars
    import flint
    ctx = flint.fmpz_mpoly_ctx.get(("x", nvars))
    A = []
    for row in M:
        # one rational factor and one monomial shift per row leave the rank unchanged
        den = reduce(ilcm, (c.denominator for x in row for c in x.terms.values()), 1)
        ints = [{e: int(c * den) for e, c in x.terms.items()} for x in row]
        shift = _mpoly.min_exponents(ints, nvars)
        A.append([_mpoly.to_flint(d, nvars, shift) if d else ctx.from_dict({}) for d in ints])
    ridx = list(range(rows))
    cidx = list(range(cols))
    prev = ctx.from_dict({(0,) * nvars: 1})
    pivots = []
    k = 0
    while k < min(rows, cols):
        best = None
        for i in range(k, rows):
            for j in range(k, cols):
                if A[i][j] != 0:
                    cand = (len(A[i][j]), i, j)
                    if best is None or cand < best:
                        best = cand
        if best is None:
            break
        _, i, j = best
        A[k], A[i] = A[i], A[k]
        ridx[k], ridx[i] = ridx[i], ridx[k]
        if j != k:
            for r in A:
                r[k], r[j] = r[j], r[k]
            cidx[k], cidx[j] = cidx[j], cidx[k]
        pivots.append((ridx[k], cidx[k]))
        p = A[k][k]
        for i in range(k + 1, rows):
            for j in range(k + 1, cols):
                A[i][j] = (p * A[i][j] - A[i][k] * A[k][j]) / prev
            A[i][k] = ctx.from_dict({})
        prev = p
        k += 1
    mod = _modular_rank(M, nvars)
    if mod > k:
        raise AssertionError("modular rank exceeds exact rank")
    return RankWitness(k, tuple(pivots), mod)


def laurent_rank(M: Sequence[Sequence[LaurentPoly]]) -> int:
    return laurent_rank_witness(M).rank


# --- fraction field Q(t_1..t_b) ---------------------------------------------

class RatFunc:
    """Element of Q(t_1..t_b), kept as a reduced quotient of integer Laurent polynomials."""

    __slots__ = ("num", "den")

    def __init__(self, num: LaurentPoly, den: LaurentPoly | None = None, *, reduced: bool = False):
        nvars = num.nvars
        if den is None:
            den = LaurentPoly.one(nvars)
        if not den:
            raise ZeroDivisionError("zero denominator")
        if reduced:
            self.num, self.den = num, den
            return
        self.num, self.den = _normalize_fraction(num, den)

    @property
    def nvars(self):
        return self.num.nvars

    @classmethod
    def from_poly(cls, p: LaurentPoly) -> "RatFunc":
        return cls(p, None)

    def __bool__(self):
        return bool(self.num)

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            other = RatFunc(other)
        return isinstance(other, RatFunc) and self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other):
        other = _as_ratfunc(other, self.nvars)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    def __neg__(self):
        return RatFunc(-self.num, self.den, reduced=True)

    def __sub__(self, other):
        return self + (-_as_ratfunc(other, self.nvars))

    def __mul__(self, other):
        other = _as_ratfunc(other, self.nvars)
        return RatFunc(self.num * other.num, self.den * other.den)

    def inverse(self) -> "RatFunc":
        if not self.num:
            raise ZeroDivisionError("inverse of zero")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        return self * _as_ratfunc(other, self.nvars).inverse()

    def format(self, names=None) -> str:
        if self.den == LaurentPoly.one(self.nvars):
            return self.num.format(names)
        return f"({self.num.format(names)}) / ({self.den.format(names)})"

    def __repr__(self):
        return f"RatFunc({self.format()!r})"


def _as_ratfunc(x, nvars) -> RatFunc:
    if isinstance(x, RatFunc):
        return x
    if isinstance(x, LaurentPoly):
        return RatFunc(x)
    return RatFunc(LaurentPoly.const(nvars, x))


def _normalize_fraction(num: LaurentPoly, den: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    """Coprime integer parts; the denominator's lex-leading term is a positive constant."""
    nvars = num.nvars
    if not num:
        return LaurentPoly.zero(nvars), LaurentPoly.one(nvars)
    nd, ns = num.integer_dict()
    dd, ds = den.integer_dict()
    if len(nd) > 1 and len(dd) > 1:
        g = _mpoly.gcd(nd, dd, nvars)
        if len(g) > 1:
            nd = _mpoly.div_exact(nd, g, nvars)
            dd = _mpoly.div_exact(dd, g, nvars)
    lead = max(dd)
    sign = 1 if dd[lead] > 0 else -1
    scale = ns / ds
    n_poly = LaurentPoly(nvars, {tuple(a - b for a, b in zip(e, lead)): sign * scale.numerator * v
                                 for e, v in nd.items()})
    d_poly = LaurentPoly(nvars, {tuple(a - b for a, b in zip(e, lead)): sign * scale.denominator * v
                                 for e, v in dd.items()})
    return n_poly, d_poly


def ratfunc_rank(M: Sequence[Sequence[RatFunc]]) -> int:
    A = [list(r) for r in M]
    rank = 0
    ncols = len(A[0]) if A else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = A[rank][c].inverse()
        for i in range(rank + 1, len(A)):
            if A[i][c]:
                f = A[i][c] * inv
                A[i] = [a - f * b for a, b in zip(A[i], A[rank])]
        rank += 1
    return rank


def laurent_nullspace(M: Sequence[Sequence[LaurentPoly]], ncols: int, nvars: int) -> list[list[LaurentPoly]]:
    """Basis over Q(t) of ``{v : M v = 0}``, scaled to integer Laurent vectors."""
    A = [[RatFunc(x) for x in row] for row in M]
    pivcols = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = A[r][c].inverse()
        A[r] = [x * inv for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        pivcols.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in pivcols]
    basis = []
    zero = RatFunc(LaurentPoly.zero(nvars))
    for f in free:
        v = [zero] * ncols
        v[f] = RatFunc(LaurentPoly.one(nvars))
        for row, pc in zip(A, pivcols):
            v[pc] = -row[f]
        basis.append(_clear_denominators(v, nvars))
    return basis


def _clear_denominators(v: Sequence[RatFunc], nvars: int) -> list[LaurentPoly]:
    common: dict = {(0,) * nvars: 1}
    for x in v:
        if not x:
            continue
        dd, _ = x.den.integer_dict()
        g = _mpoly.gcd(common, dd, nvars)
        common = _multiply_int_dicts(_mpoly.div_exact(common, g, nvars), dd)
    scale = LaurentPoly(nvars, common)
    out = []
    for x in v:
        if not x:
            out.append(LaurentPoly.zero(nvars))
            continue
        q = _mpoly.div_exact(scale.integer_dict()[0], x.den.integer_dict()[0], nvars)
        out.append(x.num * LaurentPoly(nvars, q) * (scale.integer_dict()[1] / x.den.integer_dict()[1]))
    # integral and primitive
    den = reduce(ilcm, (c.denominator for p in out for c in p.terms.values()), 1)
    out = [p.scale(den) for p in out]
    g = reduce(igcd, (int(c) for p in out for c in p.terms.values()), 0) or 1
    return [p.scale(Fraction(1, g)) for p in out]


def _multiply_int_dicts(a: dict, b: dict) -> dict:
    out: dict = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return {e: c for e, c in out.items() if c}


# --- Alexander data (b = 1) -------------------------------------------------

@dataclass(frozen=True)
class AlexanderData:
    delta: LaurentPoly
    torsion: tuple[LaurentPoly, ...]
    jacobian_rank: int


def normalize_delta(p: LaurentPoly) -> LaurentPoly:
    """Canonical representative up to +-t^k and rational scaling."""
    if not p:
        return p
    d, _ = p.integer_dict()
    lo = min(e[0] for e in d)
    top = max(d)
    sign = 1 if d[top] > 0 else -1
    return LaurentPoly(1, {(e[0] - lo,): sign * c for e, c in d.items()})


def alexander_data(p: Presentation) -> AlexanderData:
    ab = abelianization(p)
    if ab.b != 1:
        raise RankMismatch(f"Alexander data needs first Betti number 1, got {ab.b}")
    J = specialize_jacobian(fox_jacobian(p), ab)
    g = p.ngens
    if not J:
        rank, diag = 0, []
    else:
        _, D, _ = smith_normal_form(J, LaurentPIDDomain)
        diag = [d for d in diagonal(D) if d]
        rank = len(diag)
    if rank == g - 1:
        delta = reduce(lambda a, b: a * b, diag, LaurentPoly.one(1))
        delta = normalize_delta(delta)
    else:
        delta = LaurentPoly.zero(1)
    torsion = tuple(normalize_delta(d) for d in diag if not d.is_monomial())
    return AlexanderData(delta, torsion, rank)
