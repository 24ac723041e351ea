"""Bridge from sparse Laurent dictionaries to flint's multivariate polynomials.

Only gcd and exact division go through flint; everything else stays in plain
dictionaries ``{exponent_tuple: int}``.  Laurent inputs are shifted into the
polynomial ring by their per-variable minimum exponents, which only changes
results by a unit.
"""
from __future__ import annotations

import flint
from flint.utils.flint_exceptions import DomainError


def _ctx(nvars: int):
    return flint.fmpz_mpoly_ctx.get(("x", nvars))


def min_exponents(polys, nvars: int) -> tuple[int, ...]:
    lows = [None] * nvars
    for p in polys:
        for e in p:
            for i, v in enumerate(e):
                if lows[i] is None or v < lows[i]:
                    lows[i] = v
    return tuple(0 if v is None else v for v in lows)


def to_flint(p: dict, nvars: int, shift: tuple[int, ...]):
    ctx = _ctx(nvars)
    return ctx.from_dict({tuple(a - s for a, s in zip(e, shift)): c for e, c in p.items()})


def from_flint(fp, shift: tuple[int, ...]) -> dict:
    return {tuple(a + s for a, s in zip(e, shift)): int(c) for e, c in fp.to_dict().items()}


def gcd(a: dict, b: dict, nvars: int) -> dict:
    """Gcd of two integer Laurent dictionaries, up to a unit +-t^k."""
    if not a:
        return dict(b)
    if not b:
        return dict(a)
    if nvars == 0:
        from math import gcd as igcd
        return {(): igcd(a[()], b[()])}
    sa, sb = min_exponents([a], nvars), min_exponents([b], nvars)
    g = to_flint(a, nvars, sa).gcd(to_flint(b, nvars, sb))
    return from_flint(g, (0,) * nvars)


def div_exact(a: dict, b: dict, nvars: int) -> dict:
    """Exact quotient a / b of integer Laurent dictionaries; ArithmeticError if inexact."""
    if not a:
        return {}
    if nvars == 0:
        q, r = divmod(a[()], b[()])
        if r:
            raise ArithmeticError("inexact division")
        return {(): q}
    sa, sb = min_exponents([a], nvars), min_exponents([b], nvars)
    try:
        q = to_flint(a, nvars, sa) / to_flint(b, nvars, sb)
    except DomainError as exc:
        raise ArithmeticError("inexact division") from exc
    return from_flint(q, tuple(x - y for x, y in zip(sa, sb)))
