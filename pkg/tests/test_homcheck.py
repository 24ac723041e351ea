from __future__ import annotations

import random

import pytest
from hypothesis import given, strategies as st

from tfds.corpus import data_path, entry
from tfds.laurent import q_rank
from tfds.homcheck import (FreeVerdict, H2Status, NotAHomomorphism, Verdict, check_abelianized,
                           check_rational_two_connected, consequence_report, free_subgroup_criterion,
                           h1q_matrix, h2_vanish_cert, rank_audit_lines, rank_inequality_audit)
from tfds.presentations import GroupHom, Presentation, Word, identity_hom, parse_map


def load_map(name: str) -> GroupHom:
    return parse_map(data_path(name).read_text(), data_path("")).hom


class TestH1:
    def test_broken_map_rejected(self):
        with pytest.raises(NotAHomomorphism):
            check_abelianized(load_map("broken.map"))

    def test_doubling(self):
        m = h1q_matrix(load_map("doubling.map"))
        assert m.matrix == ((2,),)
        assert m.mono and m.iso and not m.integral_iso

    def test_inclusion(self):
        m = h1q_matrix(load_map("inclusion.map"))
        assert m.mono and not m.iso

    def test_noniso(self):
        m = h1q_matrix(load_map("noniso.map"))
        assert m.iso and m.integral_iso

    def test_collapse_is_not_mono(self):
        f2 = entry("free2").presentation()
        z = entry("unknot").presentation()
        h = GroupHom(f2, z, (Word.gen(0), Word.gen(0)))
        assert not h1q_matrix(h).mono


class TestH2:
    @pytest.mark.parametrize("name, cert", [("free2", True), ("trefoil", True), ("figure8", True),
                                            ("noniso-E", True), ("cyclic3", True), ("heisenberg", False)])
    def test_certificate(self, name, cert):
        assert h2_vanish_cert(entry(name).presentation()) is cert

    def test_euler_characteristic_consistency(self):
        # when certified, dim H_2(G;Q) = #rel - rank(exponent matrix) is zero
        rng = random.Random(6)
        for _ in range(30):
            rels = tuple(Word([(rng.randrange(2), rng.choice([-1, 1])) for _ in range(rng.randint(1, 6))])
                         for _ in range(rng.randint(0, 3)))
            p = Presentation(("x", "y"), tuple(r for r in rels if r))
            R = p.exponent_matrix()
            h2 = len(R) - (q_rank(R) if R else 0)
            assert h2_vanish_cert(p) == (h2 == 0)


class TestVerdict:
    def test_iso_requires_mono(self):
        with pytest.raises(ValueError):
            Verdict(h1_mono=False, h1_iso=True, h2_epi=H2Status.UNKNOWN)

    @pytest.mark.parametrize("name", ["noniso.map", "trefoil-ab.map", "figure8-ab.map", "doubling.map"])
    def test_certified_maps(self, name):
        v = check_rational_two_connected(load_map(name))
        assert v.rationally_two_connected and v.hypotheses_certified
        assert v.to_dict()["hom_verified"] == "abelianized-only"

    def test_identity_on_heisenberg_not_certified(self):
        v = check_rational_two_connected(identity_hom(entry("heisenberg").presentation()))
        assert v.h1_iso and v.h2_epi is H2Status.UNKNOWN and not v.rationally_two_connected
        assert consequence_report(identity_hom(entry("heisenberg").presentation()), v).claims == ()


class TestConsequences:
    @pytest.mark.parametrize("name, r1", [("noniso.map", 1), ("trefoil-ab.map", 0), ("doubling.map", 0)])
    def test_rank_equalities(self, name, r1):
        h = load_map(name)
        rep = consequence_report(h, check_rational_two_connected(h))
        assert rep.ok
        by_level = {r.level: r for r in rep.ranks}
        assert by_level[1].source == by_level[1].target == r1
        assert by_level[2].equal is True
        assert "rank-equality" in rep.citations

    def test_onto_claim_requires_flag_and_visible_generation(self):
        h = load_map("trefoil-ab.map")
        v = check_rational_two_connected(h)
        without = consequence_report(h, v)
        assert "rational-2-connected-onto" not in without.citations
        with_flag = consequence_report(h, v, assume_onto=True)
        assert "rational-2-connected-onto" in with_flag.citations
        h = load_map("noniso.map")
        rep = consequence_report(h, check_rational_two_connected(h), assume_onto=True)
        assert "rational-2-connected-onto" not in rep.citations

    def test_inclusion_gets_embedding_claim_only(self):
        h = load_map("inclusion.map")
        rep = consequence_report(h, check_rational_two_connected(h))
        assert [c["citation"] for c in rep.claims] == ["rational-2-connected-embedding"]
        assert rep.ranks == ()


class TestFreeSubgroups:
    def test_E(self):
        p = entry("noniso-E").presentation()
        assert free_subgroup_criterion(p, [p.word("t"), p.word("z")]).verdict is FreeVerdict.FREE
        res = free_subgroup_criterion(p, [p.word("t"), p.word("w")])
        assert res.verdict is FreeVerdict.INCONCLUSIVE and "abelianized-images-dependent" in res.failed

    def test_heisenberg_lacks_certificate(self):
        p = entry("heisenberg").presentation()
        res = free_subgroup_criterion(p, [p.word("x")])
        assert res.failed == ("h2-certificate",)

    def test_finite_group(self):
        p = entry("cyclic3").presentation()
        assert free_subgroup_criterion(p, [p.word("a")]).verdict is FreeVerdict.INCONCLUSIVE


class TestAudits:
    @pytest.mark.parametrize("name", ["free2", "trefoil", "figure8", "heisenberg", "noniso-E", "nonfg-trunc-3"])
    def test_levels_one_and_two(self, name):
        p = entry(name).presentation()
        for n in (1, 2):
            assert rank_inequality_audit(p, n)
            assert all(line.holds for line in rank_audit_lines(p, n))


words = st.lists(st.tuples(st.integers(0, 1), st.sampled_from([-1, 1])), min_size=1, max_size=6).map(Word)


@given(words, words)
def test_maps_into_free_groups_are_homomorphisms(a, b):
    f2 = entry("free2").presentation()
    h = GroupHom(f2, f2, (a, b))
    m = h1q_matrix(h)
    (a0, a1), (b0, b1) = a.exponent_sums(2), b.exponent_sums(2)
    det = a0 * b1 - a1 * b0
    assert m.iso == (det != 0)
    assert m.integral_iso == (abs(det) == 1)
    assert check_rational_two_connected(h).h2_epi is H2Status.CERTIFIED


@given(st.integers(-5, 5).filter(lambda k: k != 0))
def test_power_maps_on_Z(k):
    z = entry("unknot").presentation()
    m = h1q_matrix(GroupHom(z, z, (Word.gen(0, k),)))
    assert m.iso and m.integral_iso == (abs(k) == 1)
