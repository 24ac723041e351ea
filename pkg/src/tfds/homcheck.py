"""Rational 2-connectivity of homomorphisms and what it implies for the series.

A map A -> B that is injective on H_1(-;Q) and surjective on H_2(-;Q) embeds
every quotient A/A^(n)_H into B/B^(n)_H, and when it is an isomorphism on
H_1(-;Q) the successive quotient modules have equal ranks.  H_2 surjectivity is
only certified here through H_2(B;Q) = 0, read off the presentation complex.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from .laurent import abelianization, int_det, laurent_rank_witness, q_rank
from .presentations import GroupHom, Presentation, Word
from .series import (LEVEL_CAP, Unsupported, ambient_embedding, level1_boundaries, level2_boundaries, level_rank,
                     augmentation_lower_bound, augmentation_rank_laurent, _level2_exact)


class NotAHomomorphism(ValueError):
    """A relator of the source maps to a nontrivial class in H_1 of the target."""


class H2Status(str, Enum):
    CERTIFIED = "CertifiedByTargetVanishing"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class H1Map:
    matrix: tuple[tuple[int, ...], ...]    # rows: target free basis, columns: source free basis
    mono: bool
    iso: bool
    integral_iso: bool

    def to_dict(self) -> dict:
        return {"matrix": [list(r) for r in self.matrix], "mono": self.mono, "iso": self.iso,
                "integral_iso_on_free_part": self.integral_iso}


@dataclass(frozen=True)
class Verdict:
    h1_mono: bool
    h1_iso: bool
    h2_epi: H2Status
    source_finitely_generated: bool = True
    target_finitely_related: bool = True
    hom_verified: str = "abelianized-only"
    h1: H1Map | None = None

    def __post_init__(self):
        if self.h1_iso and not self.h1_mono:
            raise ValueError("an isomorphism is a monomorphism")

    @property
    def rationally_two_connected(self) -> bool:
        return self.h1_iso and self.h2_epi is H2Status.CERTIFIED

    @property
    def hypotheses_certified(self) -> bool:
        return (self.h1_mono and self.h2_epi is H2Status.CERTIFIED
                and self.source_finitely_generated and self.target_finitely_related)

    def to_dict(self) -> dict:
        return {
            "h1_mono": self.h1_mono,
            "h1_iso": self.h1_iso,
            "h2_epi": self.h2_epi.value,
            "finiteness": {"source_finitely_generated": self.source_finitely_generated,
                           "target_finitely_related": self.target_finitely_related},
            "hom_verified": self.hom_verified,
            "h1_map": None if self.h1 is None else self.h1.to_dict(),
        }


# --- H_1 and H_2 ------------------------------------------------------------

def _image_exponents(h: GroupHom) -> list[list[int]]:
    return [w.exponent_sums(h.target.ngens) for w in h.images]


def _push_exponents(h: GroupHom, v: Sequence[int]) -> list[int]:
    imgs = _image_exponents(h)
    return [sum(v[i] * imgs[i][j] for i in range(h.source.ngens)) for j in range(h.target.ngens)]


def check_abelianized(h: GroupHom) -> None:
    """Necessary condition for h to be a homomorphism: relators die in H_1(target; Z)."""
    abt = abelianization(h.target)
    for k, r in enumerate(h.source.relators):
        v = _push_exponents(h, r.exponent_sums(h.source.ngens))
        if not abt.is_trivial_vector(v):
            raise NotAHomomorphism(
                f"relator {k + 1} of {h.source.name or 'source'} maps to a nontrivial class in H_1 of the target")


def h1q_matrix(h: GroupHom) -> H1Map:
    check_abelianized(h)
    abs_, abt = abelianization(h.source), abelianization(h.target)
    cols = [abt.project_vector(_push_exponents(h, abs_.lift[k])) for k in range(abs_.b)]
    M = tuple(tuple(cols[k][j] for k in range(abs_.b)) for j in range(abt.b))
    rank = q_rank([list(r) for r in M]) if M and abs_.b else 0
    mono = rank == abs_.b
    iso = mono and abs_.b == abt.b
    integral = iso and (abs_.b == 0 or abs(int_det([list(r) for r in M])) == 1)
    return H1Map(M, mono, iso, integral)


def h2_vanish_cert(p: Presentation) -> bool:
    """True when the relator exponent matrix is injective over Q, which forces H_2(G; Q) = 0."""
    R = p.exponent_matrix()
    if not R:
        return True
    return q_rank(R) == len(R)


def check_rational_two_connected(h: GroupHom) -> Verdict:
    m = h1q_matrix(h)
    h2 = H2Status.CERTIFIED if h2_vanish_cert(h.target) else H2Status.UNKNOWN
    return Verdict(m.mono, m.iso, h2, h1=m)


# --- rank audits ------------------------------------------------------------

@dataclass(frozen=True)
class AuditLine:
    boundary: str
    rank: int
    augmentation_rank: int

    @property
    def holds(self) -> bool:
        return self.rank >= self.augmentation_rank

    def to_dict(self) -> dict:
        return {"boundary": self.boundary, "rank": self.rank, "augmentation_rank": self.augmentation_rank,
                "holds": self.holds}


def rank_audit_lines(p: Presentation, n: int) -> list[AuditLine]:
    if n > LEVEL_CAP:
        raise Unsupported("level-cap", f"level {n}")
    ab = abelianization(p)
    if n == 1:
        if ab.b == 0:
            raise Unsupported("b1-zero-shortcut", "level-1 coefficients are Q")
        d1, d2 = level1_boundaries(p, ab)
        return [AuditLine("d1", laurent_rank_witness(d1).rank, augmentation_rank_laurent(d1)),
                AuditLine("d2", laurent_rank_witness(d2).rank, augmentation_rank_laurent(d2))]
    if n == 2:
        emb = ambient_embedding(p, ab)
        d1, d2 = level2_boundaries(p, emb)
        r1, r2, _ = _level2_exact(p, emb)
        return [AuditLine("d1", r1, augmentation_lower_bound(d1)), AuditLine("d2", r2, augmentation_lower_bound(d2))]
    raise ValueError("audit levels are 1 and 2")


def rank_inequality_audit(p: Presentation, n: int) -> bool:
    lines = rank_audit_lines(p, n)
    for line in lines:
        if not line.holds:
            raise AssertionError(f"internal error: rank of {line.boundary} below its augmentation rank")
    return True


# --- free subgroups ---------------------------------------------------------

class FreeVerdict(str, Enum):
    FREE = "FreeModuloOmega"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class FreeSubgroupResult:
    verdict: FreeVerdict
    failed: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {"verdict": self.verdict.value, "failed": list(self.failed)}


def free_subgroup_criterion(p: Presentation, ws: Sequence[Word]) -> FreeSubgroupResult:
    """Words with independent abelianized images in a group with H_2(G; Q) = 0 generate a free group mod G^(omega)_H."""
    failed = []
    if not h2_vanish_cert(p):
        failed.append("h2-certificate")
    ab = abelianization(p)
    vecs = [list(ab.project_word(w)) for w in ws]
    if ws and (ab.b == 0 or q_rank(vecs) < len(ws)):
        failed.append("abelianized-images-dependent")
    return FreeSubgroupResult(FreeVerdict.INCONCLUSIVE if failed else FreeVerdict.FREE, tuple(failed))


# --- consequences -----------------------------------------------------------

@dataclass(frozen=True)
class RankComparison:
    level: int
    source: int | None
    target: int | None
    equal: bool | None

    def to_dict(self) -> dict:
        return {"level": self.level, "source": self.source, "target": self.target, "equal": self.equal}


@dataclass(frozen=True)
class ConsequenceReport:
    claims: tuple[dict, ...]
    ranks: tuple[RankComparison, ...]
    citations: tuple[str, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return all(r.equal is not False for r in self.ranks)

    def to_dict(self) -> dict:
        return {"claims": list(self.claims), "rank_equalities": [r.to_dict() for r in self.ranks],
                "citations": list(self.citations)}


def _rank_or_none(p: Presentation, n: int) -> int | None:
    try:
        return level_rank(p, n).rank
    except Unsupported:
        return None


def consequence_report(h: GroupHom, v: Verdict, *, assume_onto: bool = False) -> ConsequenceReport:
    if not v.hypotheses_certified:
        return ConsequenceReport((), (), ())
    a, b = h.source.name or "A", h.target.name or "B"
    claims = [{"claim": f"{a}/{a}^(n)_H -> {b}/{b}^(n)_H is injective for every n <= omega",
               "citation": "rational-2-connected-embedding"}]
    cites = ["rational-2-connected-embedding", "h2-vanishing-certificate"]
    if assume_onto:
        if h.visibly_onto():
            claims.append({"claim": f"{a}/{a}^(n)_H -> {b}/{b}^(n)_H is an isomorphism for every n <= omega "
                                    "(surjectivity asserted by the user, images generate the target)",
                           "citation": "rational-2-connected-onto"})
            cites.append("rational-2-connected-onto")
        else:
            claims.append({"claim": "surjectivity asserted but the images do not visibly generate the target; "
                                    "no isomorphism claim", "citation": "rational-2-connected-onto"})
    ranks = []
    if v.h1_iso:
        cites.append("rank-equality")
        for n in (1, 2):
            rs, rt = _rank_or_none(h.source, n), _rank_or_none(h.target, n)
            eq = None if rs is None or rt is None else rs == rt
            ranks.append(RankComparison(n, rs, rt, eq))
    return ConsequenceReport(tuple(claims), tuple(ranks), tuple(cites))
