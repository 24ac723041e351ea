from __future__ import annotations

import random

import pytest
import sympy as sp

import skew_samples as S
from tfds.laurent import LaurentPoly, laurent_rank, parse_laurent
from tfds.presentations import Word
from tfds.skewfield import (DivisionByZero, ExtensionTower, SkewPoly, WordPusher, augment_matrix, gcld, ore_pair,
                            parse_group_ring, skew_left_divmod, skew_matrix_rank, skew_mul, skew_right_divmod)

T = S.TOWER
t1, t2 = sp.symbols("t1 t2")


# --- Magnus embedding oracle ------------------------------------------------
# F/F'' embeds in 2x2 matrices [[g, v], [0, 1]] with g in Z[Z^2] and v in Z[Z^2]^2.

def magnus(word: Word) -> tuple[sp.Expr, sp.Matrix]:
    g, v = sp.Integer(1), sp.zeros(1, 2)
    gens = [t1, t2]
    for i, e in word.unit_letters():
        if e > 0:
            v[i] += g
            g = g * gens[i]
        else:
            g = g / gens[i]
            v[i] -= g
    return sp.simplify(g), v.applyfunc(sp.simplify)


KAPPA = Word([(0, 1), (1, 1), (0, -1), (1, -1)])


def normal_form_oracle(word: Word) -> tuple[LaurentPoly, int, int]:
    """(m, a, b) with word = kappa^m x^a y^b in F/F'', computed from Magnus matrices."""
    a, b = word.exponent_sums(2)
    _, v = magnus(word)
    _, vab = magnus(Word([(0, a), (1, b)]))
    _, vk = magnus(KAPPA)
    m = sp.cancel((v[0] - vab[0]) / vk[0])
    assert sp.simplify(m * vk[1] - (v[1] - vab[1])) == 0
    num, den = sp.fraction(sp.together(m))
    den = sp.Poly(den, t1, t2)
    assert len(den.terms()) == 1
    (d1, d2), dc = den.terms()[0]
    terms = {}
    if num != 0:
        for (e1, e2), c in sp.Poly(sp.expand(num), t1, t2).terms():
            terms[(e1 - d1, e2 - d2)] = sp.Rational(c) / dc
    return LaurentPoly(2, {k: int(c) for k, c in terms.items()}), a, b


class TestTowerStructure:
    def test_commutation_relation(self):
        s1, s2 = T.skew_generator(1), T.skew_generator(2)
        lhs = s2 * s1 * s2.inverse()
        assert lhs == T.element([LaurentPoly.const(2, -1)], (1, 0))

    def test_action_on_module(self):
        s1, s2 = T.skew_generator(1), T.skew_generator(2)
        e = T.element([LaurentPoly.one(2)])
        assert s1 * e * s1.inverse() == T.element([LaurentPoly.var(2, 0)])
        assert s2 * e * s2.inverse() == T.element([LaurentPoly.var(2, 1)])

    def test_words_match_magnus_normal_form(self):
        rng = random.Random(17)
        pusher = WordPusher(T, [T.skew_generator(1), T.skew_generator(2)])
        for _ in range(40):
            w = Word([(rng.randrange(2), rng.choice([-1, 1])) for _ in range(rng.randint(0, 12))])
            m, a, b = normal_form_oracle(w)
            assert pusher.word(w) == T.element([m], (a, b))

    def test_sigma_is_an_automorphism(self):
        rng = random.Random(4)
        for _ in range(20):
            x, y = S.layer1_fraction(rng), S.layer1_fraction(rng)
            for n in (1, -1, 2):
                assert T.sigma(2, n, x * y) == T.sigma(2, n, x) * T.sigma(2, n, y)
                assert T.sigma(2, n, x + y) == T.sigma(2, n, x) + T.sigma(2, n, y)
            assert T.sigma(2, -1, T.sigma(2, 1, x)) == x

    def test_sigma_only_below(self):
        with pytest.raises(ValueError):
            T.sigma(1, 1, T.one(1))

    def test_permutation_actions_only(self):
        with pytest.raises(ValueError):
            ExtensionTower(1, 1, [[[parse_laurent("1 + t", 1)]]])

    def test_parse_group_ring(self):
        x = parse_group_ring("2*E[t1]*s1 - s2^-1", T)
        assert x == T.element([LaurentPoly.var(2, 0)], (1, 0), 2) - T.element(None, (0, -1))


class TestDivision:
    def test_right_and_left_division(self):
        rng = random.Random(8)
        for _ in range(30):
            p, q = S.layer1_poly(rng), S.layer1_poly(rng)
            quot, rem = skew_right_divmod(p, q)
            assert skew_mul(quot, q) + rem == p
            assert not rem or rem.span() < q.span()
            quot, rem = skew_left_divmod(p, q)
            assert skew_mul(q, quot) + rem == p
            assert not rem or rem.span() < q.span()

    def test_division_by_zero(self):
        with pytest.raises(DivisionByZero):
            skew_right_divmod(SkewPoly.one(T, 1), SkewPoly.zero(T, 1))

    def test_gcld_divides_both(self):
        rng = random.Random(12)
        for _ in range(20):
            a, b, c = S.layer1_poly(rng, 1), S.layer1_poly(rng, 1), S.layer1_poly(rng, 1)
            g = gcld(skew_mul(c, a), skew_mul(c, b))
            for x in (skew_mul(c, a), skew_mul(c, b)):
                assert not skew_left_divmod(x, g)[1]
            assert g.span() >= c.span()


class TestOre:
    @pytest.mark.parametrize("layer", [1, 2])
    def test_identity(self, layer):
        rng = random.Random(100 + layer)
        for _ in range(60):
            if layer == 1:
                a, b = S.layer1_poly(rng), S.layer1_poly(rng)
            else:
                a, b = S.layer2_poly(rng), S.layer2_poly(rng)
            a1, b1 = ore_pair(a, b)
            assert b1
            assert skew_mul(a1, b) == skew_mul(b1, a)
            assert b1.lo == 0

    def test_zero(self):
        a1, b1 = ore_pair(SkewPoly.zero(T, 1), SkewPoly.one(T, 1))
        assert not a1 and b1.is_one()
        with pytest.raises(DivisionByZero):
            ore_pair(SkewPoly.one(T, 1), SkewPoly.zero(T, 1))


class TestFractions:
    def test_field_axioms_layer1(self):
        rng = random.Random(21)
        for _ in range(25):
            a, b, c = (S.layer1_fraction(rng) for _ in range(3))
            assert (a * b) * c == a * (b * c)
            assert a * (b + c) == a * b + a * c
            assert (b + c) * a == b * a + c * a
            assert (a * a.inverse()).is_one() and (a.inverse() * a).is_one()

    def test_field_axioms_top_layer(self):
        rng = random.Random(22)
        for _ in range(25):
            a, b, c = (S.top_group_ring(rng) for _ in range(3))
            assert (a * b) * c == a * (b * c)
            assert a * (b + c) == a * b + a * c
            assert (a * a.inverse()).is_one()

    def test_canonical_form_is_unique(self):
        rng = random.Random(23)
        for _ in range(15):
            a, b = S.layer1_fraction(rng), S.layer1_fraction(rng)
            x = (a * b) * b.inverse()
            assert x == a and hash(x) == hash(a)
            assert x.den == a.den and x.num == a.num

    def test_noncommutative(self):
        s1, s2 = T.skew_generator(1), T.skew_generator(2)
        assert s1 * s2 != s2 * s1

    def test_zero_inverse(self):
        with pytest.raises(DivisionByZero):
            T.zero(2).inverse()

    def test_augmentation_of_group_ring(self):
        x = parse_group_ring("3*E[t1]*s1 - 2*s2 + 1", T)
        assert x.augmentation() == 2


class TestMatrixRank:
    def test_commutative_tower_matches_laurent_rank(self):
        rng = random.Random(31)
        split = ExtensionTower.split(2, 0)
        for _ in range(15):
            r, c = rng.randint(1, 3), rng.randint(1, 3)
            M = [[LaurentPoly(2, {(rng.randint(-1, 1), rng.randint(-1, 1)): rng.randint(-2, 2)
                                  for _ in range(rng.randint(0, 2))}) for _ in range(c)] for _ in range(r)]
            if r > 1 and rng.random() < 0.5:
                M[-1] = [x * parse_laurent("t1 + t2", 2) for x in M[0]]
            K = [[S.laurent_to_split(x, split) for x in row] for row in M]
            assert skew_matrix_rank(K) == laurent_rank(M)

    def test_noncommutative_rank(self):
        s1, s2 = T.skew_generator(1), T.skew_generator(2)
        one = T.one(2)
        # rows (s1, s2) and (s2 s1, s2 s2): left-dependent
        assert skew_matrix_rank([[s1, s2], [s2 * s1, s2 * s2]]) == 1
        # (s1 s2, s2 s1) is not a left multiple of (s1, s2): the abelianized exponents differ
        assert skew_matrix_rank([[s1, s2], [s1 * s2, s2 * s1]]) == 2
        assert skew_matrix_rank([[s1 - one], [s2 - one]]) == 1

    def test_augmentation_lower_bound(self):
        s1, s2 = T.skew_generator(1), T.skew_generator(2)
        one = T.one(2)
        M = [[s1 - one, s2 - one], [s1 * s2 - one, s2 - s1]]
        assert skew_matrix_rank(M) >= sp.Matrix(augment_matrix(M)).rank()
