"""Iterated Ore fraction fields for towers Z^b acting on a free Z[Z^b]-module.

A tower describes the group of elements ``e^m s_1^a_1 ... s_b^a_b`` where
``m`` ranges over M = Z[Z^b]^d.  Conjugation by ``s_i`` acts on M by an
invertible matrix over Z[Z^b], and ``s_i s_j s_i^-1 = e^c s_j`` for j < i,
with ``c`` a fixed element of M (zero for split extensions).

The base field K_0 is the field of fractions of the commutative group algebra
Q[M].  A basis element of M shifted by t^k is a variable of that algebra, so
Q[M] is a Laurent polynomial ring in the variables ``(j, k)``.  Layer i is the
left fraction field of the skew Laurent ring K_{i-1}[s_i, s_i^-1; sigma_i].
Everything is exact, canonical and immutable.
"""
from __future__ import annotations

import threading
from fractions import Fraction
from functools import reduce
from math import gcd as igcd
from typing import Sequence

import flint

from .laurent import LaurentPoly


class DivisionByZero(ZeroDivisionError):
    pass


# --- sparse monomials of Q[M] -----------------------------------------------
# A monomial is a sorted tuple of ((basis_index, exponent_tuple), power); it
# is the public, context-free spelling of e^m.

def _mono_mul(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        x = d.get(v, 0) + e
        if x:
            d[v] = x
        else:
            del d[v]
    return tuple(sorted(d.items()))


def _mono_inv(a: tuple) -> tuple:
    return tuple((v, -e) for v, e in a)


# --- the tower --------------------------------------------------------------

def _laurent_matmul(A, B):
    n = len(B[0]) if B else 0
    return [[reduce(lambda x, y: x + y, (A[i][k] * B[k][j] for k in range(len(B))), LaurentPoly.zero(A[i][0].nvars))
             for j in range(n)] for i in range(len(A))]


def _monomial_permutation(A, nvars: int) -> tuple[tuple[int, tuple[int, ...]], ...]:
    """Column j of A as (row, exponent) when A is a permutation matrix with monomial entries t^e."""
    out = []
    for j in range(len(A)):
        hits = [(r, A[r][j]) for r in range(len(A)) if A[r][j]]
        if len(hits) != 1 or not hits[0][1].is_monomial():
            raise ValueError("action matrices must be permutation matrices with monomial entries")
        r, p = hits[0]
        (e, c), = p.terms.items()
        if c != 1:
            raise ValueError("action matrix entries must have coefficient 1")
        out.append((r, e))
    if sorted(r for r, _ in out) != list(range(len(A))):
        raise ValueError("action matrix is not a permutation pattern")
    return tuple(out)


class ExtensionTower:
    """Z^b acting on M = Z[Z^b]^d, with optional commutator cocycle.

    ``actions[i]`` is the d x d matrix for conjugation by ``s_{i+1}`` on M
    (column j is the image of the j-th basis vector).  Actions are monomial
    permutation matrices, so each one permutes the variables of Q[M].
    ``cocycle[(j, i)]`` for j < i is the element c in M with
    ``s_i s_j s_i^-1 = e^c s_j`` (0-based indices).
    """

    def __init__(self, b: int, rank: int, actions: Sequence, cocycle: dict | None = None, name: str = ""):
        self.b = b
        self.rank = rank
        self.name = name
        self.actions = tuple(tuple(tuple(r) for r in A) for A in actions)
        if len(self.actions) != b:
            raise ValueError("need one action matrix per skew variable")
        for A in self.actions:
            if len(A) != rank or any(len(r) != rank for r in A):
                raise ValueError("action matrices must be rank x rank")
        self._perm = tuple(_monomial_permutation(A, b) for A in self.actions)
        for i in range(b):
            for j in range(i):
                if _laurent_matmul(self.actions[i], self.actions[j]) != _laurent_matmul(self.actions[j], self.actions[i]):
                    raise ValueError("action matrices must commute")
        self.cocycle = {k: tuple(v) for k, v in (cocycle or {}).items() if any(v)}
        for (j, i) in self.cocycle:
            if not 0 <= j < i < b:
                raise ValueError("cocycle keys must be pairs j < i")
        self._lock = threading.Lock()
        self._vars: dict = {}
        self._names: list = []
        self._ctx = flint.fmpz_mpoly_ctx.get(("v", 8))
        self._var_cache: dict = {}
        self._sigma_cache: dict = {}
        self._skew_gen_cache: dict = {}

    # constructors
    @classmethod
    def split(cls, b: int, rank: int, name: str = "") -> "ExtensionTower":
        """Z^b acting on Z[Z^b]^rank by multiplication, split extension."""
        actions = []
        for i in range(b):
            t = LaurentPoly.var(b, i)
            z = LaurentPoly.zero(b)
            actions.append([[t if r == c else z for c in range(rank)] for r in range(rank)])
        return cls(b, rank, actions, None, name)

    @classmethod
    def free_metabelian(cls) -> "ExtensionTower":
        """F/F'' for F free on x, y: module Z[t1^+-1, t2^+-1] generated by [x, y].

        With x = s1, y = s2 and kappa = x y x^-1 y^-1 the basis vector,
        s2 s1 s2^-1 = e^-kappa s1.
        """
        base = cls.split(2, 1, "free-metabelian-2")
        return cls(2, 1, base.actions, {(0, 1): (LaurentPoly.const(2, -1),)}, "free-metabelian-2")

    def describe(self) -> dict:
        return {
            "b": self.b,
            "rank": self.rank,
            "actions": [[[x.format() for x in row] for row in A] for A in self.actions],
            "cocycle": {f"{j + 1},{i + 1}": [x.format() for x in v] for (j, i), v in sorted(self.cocycle.items())},
        }

    # variables of Q[M] and the flint context holding them
    def _index(self, var) -> int:
        idx = self._vars.get(var)
        if idx is not None:
            return idx
        with self._lock:
            idx = self._vars.get(var)
            if idx is None:
                idx = len(self._names)
                self._names.append(var)
                self._vars[var] = idx
                if idx >= self._ctx.nvars():
                    self._ctx = flint.fmpz_mpoly_ctx.get(("v", 2 * self._ctx.nvars()))
        return idx

    def module_mono(self, m: Sequence[LaurentPoly]) -> tuple:
        items = {}
        for j, p in enumerate(m):
            for e, c in p.terms.items():
                if c.denominator != 1:
                    raise ValueError("module elements must have integer coordinates")
                items[(j, e)] = int(c)
        return tuple(sorted(items.items()))

    def mono_coordinates(self, mono: tuple) -> list[LaurentPoly]:
        coords = [dict() for _ in range(self.rank)]
        for (j, e), c in mono:
            coords[j][e] = c
        return [LaurentPoly(self.b, d) for d in coords]

    def _mono_pair(self, mono: tuple):
        """Positive and negative parts of a monomial as flint monomials."""
        idx = [(self._index(v), e) for v, e in mono]
        ctx = self._ctx
        n = ctx.nvars()
        pos, neg = [0] * n, [0] * n
        for i, e in idx:
            if e > 0:
                pos[i] = e
            else:
                neg[i] = -e
        return ctx.from_dict({tuple(pos): 1}), ctx.from_dict({tuple(neg): 1})

    def _sparse_terms(self, p) -> dict:
        names = self._names
        return {tuple(sorted((names[i], int(e)) for i, e in enumerate(m) if e)): int(c)
                for m, c in zip(p.monoms(), p.coeffs())}

    def _var_image(self, i: int, n: int, var):
        """Image of a variable under sigma_i^n (i is 1-based)."""
        key = (i, n, var)
        hit = self._var_cache.get(key)
        if hit is not None:
            return hit
        j, k = var
        perm = self._perm[i - 1]
        out = var
        step = 1 if n > 0 else -1
        for _ in range(abs(n)):
            j, k = out
            if step > 0:
                r, e = perm[j]
                out = (r, tuple(a + b for a, b in zip(k, e)))
            else:
                r = next(c for c, (row, _) in enumerate(perm) if row == j)
                e = perm[r][1]
                out = (r, tuple(a - b for a, b in zip(k, e)))
        self._var_cache[key] = out
        return out

    def _rename(self, i: int, n: int, p, ctx):
        degs = p.degrees()
        mapping = {idx: self._index(self._var_image(i, n, self._names[idx])) for idx, d in enumerate(degs) if d}
        target = self._ctx
        width = target.nvars()
        out = {}
        for m, c in zip(p.monoms(), p.coeffs()):
            e = [0] * width
            for idx, img in mapping.items():
                e[img] = m[idx]
            out[tuple(e)] = c
        return target.from_dict(out)

    # layer constructors
    def zero(self, layer: int):
        if layer == 0:
            ctx = self._ctx
            return K0Elt(self, ctx.from_dict({}), ctx.from_dict({(0,) * ctx.nvars(): 1}), canonical=True)
        return SkewFieldElt.zero(self, layer)

    def one(self, layer: int):
        if layer == 0:
            ctx = self._ctx
            o = ctx.from_dict({(0,) * ctx.nvars(): 1})
            return K0Elt(self, o, o, canonical=True)
        return SkewFieldElt.one(self, layer)

    def k0_monomial(self, mono: tuple, coef=1) -> "K0Elt":
        c = Fraction(coef)
        pos, neg = self._mono_pair(mono)
        ctx = self._ctx
        pos, neg = _to_ctx(pos, ctx), _to_ctx(neg, ctx)
        return K0Elt(self, pos * c.numerator, neg * c.denominator, canonical=c != 0)

    def k0_from_terms(self, terms: dict) -> "K0Elt":
        """Field element from a map monomial -> rational."""
        if not terms:
            return self.zero(0)
        for m in terms:
            for v, _ in m:
                self._index(v)
        ctx = self._ctx
        n = ctx.nvars()
        lows = [0] * n
        for m in terms:
            for v, e in m:
                i = self._vars[v]
                lows[i] = min(lows[i], e)
        den_scale = reduce(lambda a, b: a * b // igcd(a, b), (Fraction(c).denominator for c in terms.values()), 1)
        num = {}
        for m, c in terms.items():
            e = [-x for x in lows]
            for v, x in m:
                e[self._vars[v]] += x
            num[tuple(e)] = int(Fraction(c) * den_scale)
        den = ctx.from_dict({tuple(-x for x in lows): den_scale})
        return K0Elt(self, ctx.from_dict(num), den)

    def const(self, c, layer: int | None = None):
        layer = self.b if layer is None else layer
        return self.lift(self.k0_monomial((), c), layer)

    def lift(self, x, layer: int):
        while x.layer < layer:
            x = SkewFieldElt(self, x.layer + 1, SkewPoly.one(self, x.layer + 1), SkewPoly(self, x.layer + 1, {0: x}),
                             canonical=True)
        return x

    def element(self, m: Sequence[LaurentPoly] | None = None, a: Sequence[int] = (), coef=1, *, mono: tuple = ()):
        """The group-ring element ``coef * e^m s_1^a_1 ... s_b^a_b`` in the top layer."""
        if m is not None:
            mono = self.module_mono(m)
        x = self.k0_monomial(mono, coef)
        a = list(a) + [0] * (self.b - len(a))
        for layer in range(1, self.b + 1):
            x = SkewFieldElt(self, layer, SkewPoly.one(self, layer), SkewPoly(self, layer, {a[layer - 1]: x}),
                             canonical=True)
        return x

    def skew_generator(self, i: int, layer: int | None = None):
        """s_i as an element of ``layer`` (default the top)."""
        x = self.one(0)
        for lay in range(1, self.b + 1):
            x = SkewFieldElt(self, lay, SkewPoly.one(self, lay), SkewPoly(self, lay, {int(lay == i): x}),
                             canonical=True)
            if layer is not None and lay == layer:
                break
        return x

    # automorphisms
    def sigma(self, i: int, n: int, x):
        """Apply sigma_i^n (conjugation by s_i^n) to an element of a layer below i."""
        if n == 0:
            return x
        if x.layer >= i:
            raise ValueError(f"sigma_{i} acts only on layers below {i}")
        key = (i, n, x)
        hit = self._sigma_cache.get(key)
        if hit is not None:
            return hit
        if x.layer == 0:
            ctx = x.num.context()
            num = self._rename(i, n, x.num, ctx)
            den = self._rename(i, n, x.den, ctx)
            if den.leading_coefficient() < 0:
                num, den = -num, -den
            out = K0Elt(self, num, den, canonical=True)
        elif abs(n) > 1:
            step = 1 if n > 0 else -1
            out = self.sigma(i, step, self.sigma(i, n - step, x))
        else:
            out = SkewFieldElt(self, x.layer, self._sigma_poly(i, n, x.den), self._sigma_poly(i, n, x.num),
                               coprime=True)
        if len(self._sigma_cache) > 200_000:
            with self._lock:
                self._sigma_cache.clear()
        self._sigma_cache[key] = out
        return out

    def _sigma_poly(self, i: int, n: int, p: "SkewPoly") -> "SkewPoly":
        j = p.layer
        c = self.cocycle.get((j - 1, i - 1))
        if c is None:
            return SkewPoly(self, j, {k: self.sigma(i, n, v) for k, v in p.coeffs.items()})
        out = SkewPoly.zero(self, j)
        for k, v in p.coeffs.items():
            out = out + self._twisted_power(i, n, j, k).lmul(self.sigma(i, n, v))
        return out

    def _twisted_power(self, i: int, n: int, j: int, k: int) -> "SkewPoly":
        """sigma_i^n(s_j)^k as a monomial of layer j, n = +-1."""
        key = (i, n, j, k)
        hit = self._skew_gen_cache.get(key)
        if hit is not None:
            return hit
        mono = self.module_mono(self.cocycle[(j - 1, i - 1)])
        if n == -1:
            # sigma_i^-1(s_j) = e^(-A_i^-1 c) s_j
            mono = tuple(sorted((self._var_image(i, -1, v), -e) for v, e in mono))
        e = self.lift(self.k0_monomial(mono), j - 1)
        gen = SkewPoly(self, j, {1: e})
        step = gen if k >= 0 else gen.unit_inverse()
        out = SkewPoly.one(self, j)
        for _ in range(abs(k)):
            out = out * step
        self._skew_gen_cache[key] = out
        return out


# --- layer 0: fractions of the commutative group algebra ---------------------

class GAElt:
    """Element of the group algebra Q[M]: finite map from M-monomials to rationals."""

    __slots__ = ("tower", "terms")

    def __init__(self, tower: ExtensionTower, terms: dict | None = None):
        self.tower = tower
        self.terms = {m: Fraction(c) for m, c in (terms or {}).items() if c}

    @classmethod
    def monomial(cls, tower, m: Sequence[LaurentPoly], coef=1) -> "GAElt":
        return cls(tower, {tower.module_mono(m): coef})

    def __add__(self, other):
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return GAElt(self.tower, out)

    def __neg__(self):
        return GAElt(self.tower, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        return ga_mul(self, other)

    def __eq__(self, other):
        return isinstance(other, GAElt) and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def to_field(self) -> "K0Elt":
        return self.tower.k0_from_terms(self.terms)

    def format(self) -> str:
        return _format_ga(self.tower, self.terms)


def ga_mul(a: GAElt, b: GAElt) -> GAElt:
    out: dict = {}
    for m1, c1 in a.terms.items():
        for m2, c2 in b.terms.items():
            m = _mono_mul(m1, m2)
            out[m] = out.get(m, 0) + c1 * c2
    return GAElt(a.tower, out)


def _format_mono(tower, mono: tuple) -> str:
    coords = tower.mono_coordinates(mono)
    return "E[" + ", ".join(p.format() for p in coords) + "]"


def _format_ga(tower, terms: dict) -> str:
    if not terms:
        return "0"
    parts = []
    for m, c in sorted(terms.items()):
        body = str(abs(c)) if not m else (_format_mono(tower, m) if abs(c) == 1 else f"{abs(c)}*{_format_mono(tower, m)}")
        parts.append(("-" if c < 0 else "+", body))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def _to_ctx(p, ctx):
    return p if p.context() is ctx else p.project_to_context(ctx)


def _align(a, b):
    ca, cb = a.context(), b.context()
    if ca is cb:
        return a, b
    if ca.nvars() < cb.nvars():
        return a.project_to_context(cb), b
    return a, b.project_to_context(ca)


class K0Elt:
    """Element of the fraction field of Q[M].

    Stored as coprime integer polynomials num/den in the tower's variables
    (negative powers are moved to the other side), the denominator having
    positive leading coefficient.  This makes the pair unique.
    """

    __slots__ = ("tower", "num", "den", "_hash")
    layer = 0

    def __init__(self, tower: ExtensionTower, num, den, *, canonical: bool = False):
        self.tower = tower
        if den.is_zero():
            raise DivisionByZero("zero denominator")
        num, den = _align(num, den)
        if not canonical:
            if num.is_zero():
                den = den.context().from_dict({(0,) * den.context().nvars(): 1})
            else:
                g = num.gcd(den)
                if not g.is_one():
                    num, den = num / g, den / g
                if den.leading_coefficient() < 0:
                    num, den = -num, -den
        self.num = num
        self.den = den
        self._hash = None

    def __bool__(self):
        return not self.num.is_zero()

    def __eq__(self, other):
        if not isinstance(other, K0Elt):
            return False
        n1, n2 = _align(self.num, other.num)
        if n1 != n2:
            return False
        d1, d2 = _align(self.den, other.den)
        return d1 == d2

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((str(self.num), str(self.den)))
        return self._hash

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    def __add__(self, other: "K0Elt") -> "K0Elt":
        if other.num.is_zero():
            return self
        if self.num.is_zero():
            return other
        n1, d1 = self.num, self.den
        n2, d2 = other.num, other.den
        n1, n2 = _align(n1, n2)
        d1, d2 = _align(d1, d2)
        n1, d2 = _align(n1, d2)
        n2, d1 = _align(n2, d1)
        if d1 == d2:
            return K0Elt(self.tower, n1 + n2, d1)
        if d1.is_one():
            return K0Elt(self.tower, n1 * d2 + n2, d2, canonical=True)
        if d2.is_one():
            return K0Elt(self.tower, n1 + n2 * d1, d1, canonical=True)
        g = d1.gcd(d2)
        if g.is_one():
            return K0Elt(self.tower, n1 * d2 + n2 * d1, d1 * d2, canonical=True)
        e1, e2 = d1 / g, d2 / g
        num = n1 * e2 + n2 * e1
        if num.is_zero():
            return self.tower.zero(0)
        h = num.gcd(g)
        if not h.is_one():
            num, g = num / h, g / h
        den = e1 * e2 * g
        if den.leading_coefficient() < 0:
            num, den = -num, -den
        return K0Elt(self.tower, num, den, canonical=True)

    def __neg__(self):
        return K0Elt(self.tower, -self.num, self.den, canonical=True)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "K0Elt") -> "K0Elt":
        if self.num.is_zero() or other.num.is_zero():
            return self.tower.zero(0)
        n1, d1 = self.num, self.den
        n2, d2 = other.num, other.den
        n1, d2 = _align(n1, d2)
        n2, d1 = _align(n2, d1)
        n1, n2 = _align(n1, n2)
        d1, d2 = _align(d1, d2)
        if not d2.is_one():
            g = n1.gcd(d2)
            if not g.is_one():
                n1, d2 = n1 / g, d2 / g
        if not d1.is_one():
            g = n2.gcd(d1)
            if not g.is_one():
                n2, d1 = n2 / g, d1 / g
        num, den = n1 * n2, d1 * d2
        if den.leading_coefficient() < 0:
            num, den = -num, -den
        return K0Elt(self.tower, num, den, canonical=True)

    def inverse(self) -> "K0Elt":
        if self.num.is_zero():
            raise DivisionByZero("inverse of zero")
        num, den = self.den, self.num
        if den.leading_coefficient() < 0:
            num, den = -num, -den
        return K0Elt(self.tower, num, den, canonical=True)

    def __truediv__(self, other):
        return self * other.inverse()

    def weight(self) -> int:
        return len(self.num) + len(self.den)

    def augmentation(self) -> Fraction:
        d = sum(int(c) for c in self.den.coeffs())
        if d == 0:
            raise ValueError("augmentation undefined: denominator vanishes at 1")
        return Fraction(sum(int(c) for c in self.num.coeffs()), d)

    def is_polynomial(self) -> bool:
        return len(self.den) == 1

    def terms(self) -> dict | None:
        """Group-algebra terms when the denominator is a monomial, else None."""
        if len(self.den) != 1:
            return None
        (dm, dc), = self.tower._sparse_terms(self.den).items()
        inv = _mono_inv(dm)
        return {_mono_mul(m, inv): Fraction(c, dc) for m, c in self.tower._sparse_terms(self.num).items()}

    def format(self) -> str:
        t = self.terms()
        if t is not None:
            return _format_ga(self.tower, t)
        num = _format_ga(self.tower, self.tower._sparse_terms(self.num))
        den = _format_ga(self.tower, self.tower._sparse_terms(self.den))
        return f"({den})^-1 * ({num})"

    def __repr__(self):
        return f"K0Elt({self.format()})"


# --- skew Laurent polynomials ----------------------------------------------

class SkewPoly:
    """Element of K_{layer-1}[s, s^-1; sigma_layer]: map from exponent to coefficient."""

    __slots__ = ("tower", "layer", "coeffs", "_hash")

    def __init__(self, tower: ExtensionTower, layer: int, coeffs: dict | None = None):
        self.tower = tower
        self.layer = layer
        self.coeffs = {k: v for k, v in (coeffs or {}).items() if v}
        self._hash = None

    @classmethod
    def zero(cls, tower, layer):
        return cls(tower, layer, {})

    @classmethod
    def one(cls, tower, layer):
        return cls(tower, layer, {0: tower.one(layer - 1)})

    @classmethod
    def monomial(cls, tower, layer, coef, k: int):
        return cls(tower, layer, {k: coef})

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        return isinstance(other, SkewPoly) and self.layer == other.layer and self.coeffs == other.coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.layer, tuple(sorted(self.coeffs.items(), key=lambda kv: kv[0]))))
        return self._hash

    @property
    def hi(self) -> int:
        return max(self.coeffs)

    @property
    def lo(self) -> int:
        return min(self.coeffs)

    def span(self) -> int:
        return self.hi - self.lo if self.coeffs else -1

    def degree(self) -> int:
        """Degree after shifting to nonnegative exponents; -1 for zero."""
        return self.span()

    def is_one(self) -> bool:
        return len(self.coeffs) == 1 and 0 in self.coeffs and self.coeffs[0].is_one()

    def __add__(self, other: "SkewPoly") -> "SkewPoly":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out[k] + v if k in out else v
        return SkewPoly(self.tower, self.layer, out)

    def __neg__(self):
        return SkewPoly(self.tower, self.layer, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "SkewPoly") -> "SkewPoly":
        return skew_mul(self, other)

    def lmul(self, c) -> "SkewPoly":
        """c * self for a coefficient c."""
        return SkewPoly(self.tower, self.layer, {k: c * v for k, v in self.coeffs.items()})

    def unit_inverse(self) -> "SkewPoly":
        if len(self.coeffs) != 1:
            raise ValueError("not a unit")
        (k, c), = self.coeffs.items()
        # (c s^k)^-1 = s^-k c^-1 = sigma^-k(c^-1) s^-k
        return SkewPoly(self.tower, self.layer, {-k: self.tower.sigma(self.layer, -k, c.inverse())})

    def left_unit_mul(self, c, shift: int) -> "SkewPoly":
        """(c s^shift) * self."""
        i = self.layer
        return SkewPoly(self.tower, i, {k + shift: c * self.tower.sigma(i, shift, v) for k, v in self.coeffs.items()})

    def weight(self) -> int:
        return sum(v.weight() for v in self.coeffs.values())

    def format(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k in sorted(self.coeffs):
            c = self.coeffs[k].format()
            mono = "" if k == 0 else (f"s{self.layer}" if k == 1 else f"s{self.layer}^{k}")
            if not mono:
                parts.append(c)
            elif c == "1":
                parts.append(mono)
            else:
                parts.append((f"({c})" if " " in c else c) + "*" + mono)
        return " + ".join(parts)


def skew_mul(p: SkewPoly, q: SkewPoly) -> SkewPoly:
    """Product using s * a = sigma(a) * s."""
    tower, i = p.tower, p.layer
    out: dict = {}
    for m, a in p.coeffs.items():
        for n, b in q.coeffs.items():
            term = a * tower.sigma(i, m, b)
            k = m + n
            out[k] = out[k] + term if k in out else term
    return SkewPoly(tower, i, out)


def skew_left_divmod(p: SkewPoly, q: SkewPoly) -> tuple[SkewPoly, SkewPoly]:
    """``p = q*quot + rem`` with span(rem) < span(q)."""
    if not q:
        raise DivisionByZero("division by zero skew polynomial")
    tower, i = p.tower, p.layer
    qhi, D = q.hi, q.span()
    lead_inv = q.coeffs[qhi].inverse()
    rem = dict(p.coeffs)
    quot = {}
    while rem and max(rem) - min(rem) >= D:
        m = max(rem)
        k = m - qhi
        c = tower.sigma(i, -qhi, lead_inv * rem[m])
        quot[k] = c
        for j, qj in q.coeffs.items():
            e = j + k
            if e == m:
                continue
            term = qj * tower.sigma(i, j, c)
            v = rem[e] - term if e in rem else -term
            if v:
                rem[e] = v
            else:
                rem.pop(e, None)
        del rem[m]
    return SkewPoly(tower, i, quot), SkewPoly(tower, i, rem)


def skew_right_divmod(p: SkewPoly, q: SkewPoly) -> tuple[SkewPoly, SkewPoly]:
    """``p = quot*q + rem`` with span(rem) < span(q)."""
    if not q:
        raise DivisionByZero("division by zero skew polynomial")
    tower, i = p.tower, p.layer
    qhi, D = q.hi, q.span()
    rem = dict(p.coeffs)
    quot = {}
    while rem and max(rem) - min(rem) >= D:
        m = max(rem)
        k = m - qhi
        c = rem[m] * tower.sigma(i, k, q.coeffs[qhi]).inverse()
        quot[k] = c
        for j, qj in q.coeffs.items():
            e = j + k
            if e == m:
                continue
            term = c * tower.sigma(i, k, qj)
            v = rem[e] - term if e in rem else -term
            if v:
                rem[e] = v
            else:
                rem.pop(e, None)
        del rem[m]
    return SkewPoly(tower, i, quot), SkewPoly(tower, i, rem)


def _monic_unit(p: SkewPoly):
    """Coefficient c and shift k with (c s^k) * p monic and starting at s^0."""
    i = p.layer
    lo = p.lo
    lam = p.tower.sigma(i, -lo, p.coeffs[p.hi])
    return lam.inverse(), -lo


def ore_pair(a: SkewPoly, b: SkewPoly) -> tuple[SkewPoly, SkewPoly]:
    """(a', b') with a'*b == b'*a and b' != 0, b' monic with lowest exponent 0."""
    if not b:
        raise DivisionByZero("ore_pair needs b != 0")
    tower, i = a.tower, a.layer
    if not a:
        return SkewPoly.zero(tower, i), SkewPoly.one(tower, i)
    if len(b.coeffs) == 1:
        # b = c s^k is a unit: a' = b' a b^-1 with b' = 1
        a1, b1 = skew_mul(a, b.unit_inverse()), SkewPoly.one(tower, i)
    elif len(a.coeffs) == 1:
        # a unit: b' = a' b a^-1 with a' = 1
        a1, b1 = SkewPoly.one(tower, i), skew_mul(b, a.unit_inverse())
    else:
        r0, r1 = a, b
        u0, u1 = SkewPoly.one(tower, i), SkewPoly.zero(tower, i)
        v0, v1 = SkewPoly.zero(tower, i), SkewPoly.one(tower, i)
        while r1:
            q, r = skew_right_divmod(r0, r1)
            u, v = u0 - skew_mul(q, u1), v0 - skew_mul(q, v1)
            if r:
                # keep remainders monic so coefficients stay small
                c, k = _monic_unit(r)
                r, u, v = r.left_unit_mul(c, k), u.left_unit_mul(c, k), v.left_unit_mul(c, k)
            r0, r1 = r1, r
            u0, u1 = u1, u
            v0, v1 = v1, v
        a1, b1 = v1, -u1
    c, k = _monic_unit(b1)
    a1, b1 = a1.left_unit_mul(c, k), b1.left_unit_mul(c, k)
    if skew_mul(a1, b) != skew_mul(b1, a):
        raise AssertionError("Ore condition check failed")
    return a1, b1


def gcld(a: SkewPoly, b: SkewPoly) -> SkewPoly:
    """Greatest common left divisor (up to a unit)."""
    while b:
        _, r = skew_left_divmod(a, b)
        a, b = b, _right_monic(r)
    return a


def _right_monic(p: SkewPoly) -> SkewPoly:
    """p times a unit on the right, with leading coefficient 1 and lowest exponent 0."""
    if not p:
        return p
    tower, i = p.tower, p.layer
    hi, lo = p.hi, p.lo
    d = tower.sigma(i, -hi, p.coeffs[hi].inverse())
    return SkewPoly(tower, i, {k - lo: c * tower.sigma(i, k, d) for k, c in p.coeffs.items()})


def _left_exact(p: SkewPoly, g: SkewPoly) -> SkewPoly:
    q, r = skew_left_divmod(p, g)
    if r:
        raise AssertionError("inexact left division")
    return q


# --- skew fields of left fractions ------------------------------------------

class SkewFieldElt:
    """den^-1 * num with den, num skew polynomials of the same layer.

    Canonical: den and num have no common left divisor of positive span, and
    den is monic with lowest exponent 0.
    """

    __slots__ = ("tower", "layer", "den", "num", "_hash", "_weight")

    def __init__(self, tower: ExtensionTower, layer: int, den: SkewPoly, num: SkewPoly, *,
                 canonical: bool = False, coprime: bool = False):
        self.tower = tower
        self.layer = layer
        if not den:
            raise DivisionByZero("zero denominator")
        if not canonical:
            den, num = _canonical(den, num, coprime)
        self.den = den
        self.num = num
        self._hash = None
        self._weight = None

    @classmethod
    def zero(cls, tower, layer):
        return cls(tower, layer, SkewPoly.one(tower, layer), SkewPoly.zero(tower, layer), canonical=True)

    @classmethod
    def one(cls, tower, layer):
        return cls(tower, layer, SkewPoly.one(tower, layer), SkewPoly.one(tower, layer), canonical=True)

    @classmethod
    def from_poly(cls, p: SkewPoly) -> "SkewFieldElt":
        return cls(p.tower, p.layer, SkewPoly.one(p.tower, p.layer), p, canonical=True)

    def __bool__(self):
        return bool(self.num)

    def __eq__(self, other):
        return (isinstance(other, SkewFieldElt) and self.layer == other.layer
                and self.den == other.den and self.num == other.num)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.layer, self.den, self.num))
        return self._hash

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def is_one(self) -> bool:
        return self.den.is_one() and self.num.is_one()

    def __add__(self, other: "SkewFieldElt") -> "SkewFieldElt":
        if not other.num:
            return self
        if not self.num:
            return other
        t, i = self.tower, self.layer
        if self.den == other.den:
            if self.den.is_one():
                return SkewFieldElt(t, i, self.den, self.num + other.num, canonical=True)
            return SkewFieldElt(t, i, self.den, self.num + other.num)
        if self.den.is_one():
            return SkewFieldElt(t, i, other.den, skew_mul(other.den, self.num) + other.num)
        if other.den.is_one():
            return SkewFieldElt(t, i, self.den, self.num + skew_mul(self.den, other.num))
        a1, b1 = ore_pair(self.den, other.den)  # a1*d2 == b1*d1
        return SkewFieldElt(t, i, skew_mul(b1, self.den), skew_mul(b1, self.num) + skew_mul(a1, other.num))

    def __neg__(self):
        return SkewFieldElt(self.tower, self.layer, self.den, -self.num, canonical=True)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "SkewFieldElt") -> "SkewFieldElt":
        t, i = self.tower, self.layer
        if not self.num or not other.num:
            return SkewFieldElt.zero(t, i)
        if other.den.is_one():
            prod = skew_mul(self.num, other.num)
            if self.den.is_one():
                return SkewFieldElt(t, i, self.den, prod, canonical=True)
            return SkewFieldElt(t, i, self.den, prod)
        # n1 * d2^-1 = u^-1 * v where u*n1 == v*d2
        v, u = ore_pair(self.num, other.den)
        return SkewFieldElt(t, i, skew_mul(u, self.den), skew_mul(v, other.num))

    def inverse(self) -> "SkewFieldElt":
        if not self.num:
            raise DivisionByZero("inverse of zero")
        return SkewFieldElt(self.tower, self.layer, self.num, self.den, coprime=True)

    def __truediv__(self, other):
        return self * other.inverse()

    def weight(self) -> int:
        if self._weight is None:
            self._weight = self.den.weight() + self.num.weight()
        return self._weight

    def augmentation(self) -> Fraction:
        """Image under all group elements -> 1, defined on group-ring elements."""
        d = sum((c.augmentation() for c in self.den.coeffs.values()), Fraction(0))
        if d == 0:
            raise ValueError("augmentation undefined: denominator vanishes at 1")
        return sum((c.augmentation() for c in self.num.coeffs.values()), Fraction(0)) / d

    def format(self) -> str:
        if self.den.is_one():
            return self.num.format()
        return f"({self.den.format()})^-1 * ({self.num.format()})"

    def __repr__(self):
        return f"SkewFieldElt({self.format()})"


def _canonical(den: SkewPoly, num: SkewPoly, coprime: bool) -> tuple[SkewPoly, SkewPoly]:
    tower, i = den.tower, den.layer
    if not num:
        return SkewPoly.one(tower, i), num
    if not coprime and den.span() > 0 and num.span() > 0:
        g = gcld(den, num)
        if g.span() > 0:
            den, num = _left_exact(den, g), _left_exact(num, g)
    if den.is_one():
        return den, num
    c, k = _monic_unit(den)
    return den.left_unit_mul(c, k), num.left_unit_mul(c, k)


# --- rank -------------------------------------------------------------------

def skew_matrix_rank(M: Sequence[Sequence], pivots: list | None = None) -> int:
    """Rank over the skew field by Gaussian elimination with light pivots first.

    Rows are combined by left multiplication, so this is the rank of the left
    row space, which equals the column rank over a division ring.
    """
    A = [list(r) for r in M]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    live_rows = list(range(rows))
    live_cols = list(range(cols))
    rank = 0
    while live_rows and live_cols:
        best = None
        for r in live_rows:
            for c in live_cols:
                x = A[r][c]
                if x:
                    w = x.weight()
                    if best is None or w < best[0]:
                        best = (w, r, c)
        if best is None:
            break
        _, pr, pc = best
        if pivots is not None:
            pivots.append((pr, pc))
        inv = A[pr][pc].inverse()
        prow = [inv * x if x else x for x in A[pr]]
        live_rows.remove(pr)
        live_cols.remove(pc)
        for r in live_rows:
            f = A[r][pc]
            if f:
                A[r] = [A[r][c] - f * prow[c] if (c in live_cols and prow[c]) else A[r][c]
                        for c in range(cols)]
        rank += 1
    return rank


def augment_matrix(M: Sequence[Sequence]) -> list[list[Fraction]]:
    return [[x.augmentation() for x in row] for row in M]


# --- words and group-ring elements ------------------------------------------

class WordPusher:
    """Images of free-group words and free group ring elements in a tower.

    ``images[i]`` is a top-layer monomial (group element) for generator i.
    """

    def __init__(self, tower: ExtensionTower, images: Sequence):
        self.tower = tower
        self.images = list(images)
        self.inverses = [x.inverse() for x in self.images]
        self._cache: dict = {}

    def word(self, w) -> SkewFieldElt:
        hit = self._cache.get(w)
        if hit is not None:
            return hit
        x = self.tower.one(self.tower.b)
        for g, e in w.letters:
            base = self.images[g] if e > 0 else self.inverses[g]
            for _ in range(abs(e)):
                x = x * base
        self._cache[w] = x
        return x

    def ring(self, elt) -> SkewFieldElt:
        out = self.tower.zero(self.tower.b)
        for w, c in sorted(elt.terms.items(), key=lambda kv: kv[0]):
            out = out + self.tower.const(c) * self.word(w)
        return out


# --- parsing group-ring text -------------------------------------------------

def parse_group_ring(text: str, tower: ExtensionTower):
    """Parse a sum of terms ``c*E[p1, ..., pd]*s1^a*s2^b`` into the top layer."""
    import re

    from .laurent import parse_laurent

    terms, cur, depth, prev = [], "", 0, ""
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch in "+-" and depth == 0 and cur.strip() and prev != "^":
            terms.append(cur)
            cur = ch
        else:
            cur += ch
        if not ch.isspace():
            prev = ch
    if cur.strip():
        terms.append(cur)
    out = tower.zero(tower.b)
    if text.strip() in ("", "0"):
        return out
    for raw in terms:
        term = raw.strip()
        sign = 1
        while term and term[0] in "+-":
            sign = -sign if term[0] == "-" else sign
            term = term[1:].strip()
        coef = Fraction(sign)
        m = [LaurentPoly.zero(tower.b) for _ in range(tower.rank)]
        a = [0] * tower.b
        factors, cur, depth = [], "", 0
        for ch in term:
            if ch == "[":
                depth += 1
            elif ch == "]":
                depth -= 1
            if ch == "*" and depth == 0:
                factors.append(cur)
                cur = ""
            else:
                cur += ch
        factors.append(cur)
        for f in (x.strip() for x in factors):
            if re.fullmatch(r"\d+(/\d+)?", f):
                coef *= Fraction(f)
            elif f.startswith("E[") and f.endswith("]"):
                coords = [c.strip() for c in _split_top(f[2:-1])]
                if len(coords) != tower.rank:
                    raise ValueError(f"monomial {f!r} needs {tower.rank} coordinates")
                m = [x + parse_laurent(c, tower.b) for x, c in zip(m, coords)]
            else:
                mm = re.fullmatch(r"s(\d+)(?:\^(-?\d+))?", f)
                if not mm or not 1 <= int(mm.group(1)) <= tower.b:
                    raise ValueError(f"bad factor {f!r}")
                a[int(mm.group(1)) - 1] += int(mm.group(2) or 1)
        out = out + tower.element(m, a, coef)
    return out


def _split_top(text: str) -> list[str]:
    parts, cur, depth = [], "", 0
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    parts.append(cur)
    return parts
