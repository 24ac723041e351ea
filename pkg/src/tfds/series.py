"""Ranks, quotient descriptors and completion data for the torsion-free derived series.

Level n of a presentation is the quotient G/G^(n)_H, and r_n is the rank of
G^(n)_H/G^(n+1)_H over the group ring of that quotient.  The rank comes from
the chain complex of the presentation 2-complex:

    r_n = g - rank(d1) - rank(d2)

where d1 is the column (x_i - 1) and d2 the Fox Jacobian, both pushed to the
level-n quotient and ranked over its Ore fraction field.  Level 0 is Q, level 1
is Q(t_1..t_b).  Level 2 is reached through an embedding of G/G^(2)_H into a
split extension Z^b |x Z[Z^b]^d, whose fraction field contains the level-2 one.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .laurent import (AbelianizationData, LaurentPoly, RankWitness, abelianization, boundary_column,
                      laurent_nullspace, laurent_rank_witness, q_rank, smith_normal_form, LaurentPIDDomain,
                      diagonal, specialize_jacobian)
from .presentations import Presentation, Word, fox_jacobian
from .skewfield import ExtensionTower, WordPusher, augment_matrix, skew_matrix_rank

LEVEL_CAP = 2

REASONS = ("module-not-certified-free", "level-cap", "b1-zero-shortcut")


class Unsupported(Exception):
    """A computation outside the supported class, with a machine-readable reason."""

    def __init__(self, reason: str, detail: str = ""):
        if reason not in REASONS:
            raise ValueError(f"unknown reason {reason!r}")
        super().__init__(f"{reason}: {detail}" if detail else reason)
        self.reason = reason
        self.detail = detail

    def to_dict(self) -> dict:
        return {"unsupported": self.reason, "detail": self.detail}


# --- level data -------------------------------------------------------------

@dataclass(frozen=True)
class AmbientEmbedding:
    """G/G^(2)_H inside Z^b |x Z[Z^b]^d: generator i maps to e^(vectors[i]) s^(shifts[i])."""

    tower: ExtensionTower
    vectors: tuple[tuple[LaurentPoly, ...], ...]
    shifts: tuple[tuple[int, ...], ...]

    def pusher(self) -> WordPusher:
        return WordPusher(self.tower, [self.tower.element(list(v), s) for v, s in zip(self.vectors, self.shifts)])

    def to_dict(self) -> dict:
        return {
            "b": self.tower.b,
            "rank": self.tower.rank,
            "generator_images": [
                {"module": [p.format() for p in v], "shift": list(s)} for v, s in zip(self.vectors, self.shifts)
            ],
        }


@dataclass(frozen=True)
class ModuleBasis:
    """Certified free basis of G^(1)_H/G^(2)_H over Q[Z^b] or Z[Z^b]."""

    method: str            # "zero-module", "pid", "koszul"
    rank: int
    tower: ExtensionTower | None

    def to_dict(self) -> dict:
        out: dict = {"method": self.method, "rank": self.rank}
        if self.tower is not None:
            out["tower"] = self.tower.describe()
        return out


@dataclass(frozen=True)
class QuotientDescriptor:
    level: int
    abelianization: AbelianizationData | None = None
    ambient: AmbientEmbedding | None = None
    module: ModuleBasis | Unsupported | None = None
    level1_rank: int | None = None

    @property
    def supported(self) -> bool:
        return not isinstance(self.module, Unsupported)

    def to_dict(self) -> dict:
        out: dict = {"level": self.level}
        ab = self.abelianization
        if ab is not None:
            out["b1"] = ab.b
            out["torsion"] = list(ab.torsion)
            out["projection"] = [list(r) for r in ab.projection]
        if self.level == 2:
            out["level1_rank"] = self.level1_rank
            out["ambient"] = None if self.ambient is None else self.ambient.to_dict()
            out["module"] = self.module.to_dict() if self.module is not None else None
        return out


@dataclass(frozen=True)
class LevelRank:
    level: int
    rank: int
    method: str
    witness: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"level": self.level, "rank": self.rank, "method": self.method, "witness": self.witness}


@dataclass(frozen=True)
class RankReport:
    levels: dict                      # n -> LevelRank | Unsupported
    stabilized_at: int | None

    def rank(self, n: int) -> int | None:
        x = self.levels.get(n)
        return x.rank if isinstance(x, LevelRank) else None

    def to_dict(self) -> dict:
        return {
            "levels": {str(n): v.to_dict() for n, v in sorted(self.levels.items())},
            "stabilized_at": self.stabilized_at,
        }


@dataclass(frozen=True)
class TowerDescriptor:
    levels: tuple[dict, ...]
    stabilized: int | None
    limit: str | None

    def to_dict(self) -> dict:
        return {"levels": list(self.levels), "stabilized": self.stabilized, "limit": self.limit}


# --- chain complexes --------------------------------------------------------

def _check_level(n: int) -> None:
    if n < 0:
        raise ValueError("levels are nonnegative")
    if n > LEVEL_CAP:
        raise Unsupported("level-cap", f"level {n} requested, engine stops at {LEVEL_CAP}")


def level1_boundaries(p: Presentation, ab: AbelianizationData | None = None):
    ab = ab or abelianization(p)
    return boundary_column(ab), specialize_jacobian(fox_jacobian(p), ab)


def level2_boundaries(p: Presentation, emb: AmbientEmbedding):
    """d1 (g x 1) and d2 (relators x g) over the ambient tower's top layer."""
    push = emb.pusher()
    one = emb.tower.one(emb.tower.b)
    d1 = [[push.word(Word.gen(i)) - one] for i in range(p.ngens)]
    d2 = [[push.ring(x) for x in row] for row in fox_jacobian(p)]
    return d1, d2


def _reverse(M):
    return [list(reversed(r)) for r in reversed(M)]


def _lrank(M, reverse: bool) -> RankWitness:
    return laurent_rank_witness(_reverse(M) if reverse else M)


# --- level 1 ----------------------------------------------------------------

def _level1(p: Presentation, ab: AbelianizationData, reverse: bool = False) -> LevelRank:
    d1, d2 = level1_boundaries(p, ab)
    w1, w2 = _lrank(d1, reverse), _lrank(d2, reverse)
    r = p.ngens - w1.rank - w2.rank
    return LevelRank(1, r, "laurent-bareiss", {
        "rank_d1": w1.rank, "rank_d2": w2.rank,
        "pivots_d2": [list(x) for x in w2.pivots],
        "modular_rank_d2": w2.modular_rank,
    })


# --- level 2 ----------------------------------------------------------------

def ambient_embedding(p: Presentation, ab: AbelianizationData | None = None) -> AmbientEmbedding:
    """Embed G/G^(2)_H in Z^b |x Z[Z^b]^d with d = g - rank of the level-1 Jacobian.

    The vectors are a Laurent basis of the right nullspace of that Jacobian, so
    every relator maps to the identity.  The check is done here, word by word.
    """
    ab = ab or abelianization(p)
    if ab.b == 0:
        raise Unsupported("b1-zero-shortcut", "first Betti number is 0, every level is trivial")
    _, J = level1_boundaries(p, ab)
    basis = laurent_nullspace(J, p.ngens, ab.b)
    d = len(basis)
    vectors = tuple(tuple(basis[k][i] for k in range(d)) for i in range(p.ngens))
    tower = ExtensionTower.split(ab.b, d, name=f"ambient-{p.name or 'group'}")
    emb = AmbientEmbedding(tower, vectors, tuple(ab.projection))
    push = emb.pusher()
    for r in p.relators:
        if not push.word(r).is_one():
            raise AssertionError("relator does not vanish in the ambient embedding")
    return emb


def _level2_exact(p: Presentation, emb: AmbientEmbedding, reverse: bool = False) -> tuple[int, int, dict]:
    d1, d2 = level2_boundaries(p, emb)
    if reverse:
        d1, d2 = _reverse(d1), _reverse(d2)
    piv1, piv2 = [], []
    r1 = skew_matrix_rank(d1, piv1)
    r2 = skew_matrix_rank(d2, piv2)
    return r1, r2, {"pivots_d1": [list(x) for x in piv1], "pivots_d2": [list(x) for x in piv2]}


def level2_exact(p: Presentation, reverse: bool = False) -> LevelRank:
    """Level-2 rank by elimination over the ambient skew field, without shortcuts."""
    ab = abelianization(p)
    emb = ambient_embedding(p, ab)
    r1, r2, wit = _level2_exact(p, emb, reverse)
    wit.update({"rank_d1": r1, "rank_d2": r2})
    return LevelRank(2, p.ngens - r1 - r2, "skew-elimination", wit)


def _level2(p: Presentation, ab: AbelianizationData, lvl1: LevelRank, reverse: bool = False) -> LevelRank:
    if lvl1.rank == 0:
        return LevelRank(2, 0, "stabilized-below", {"stabilized_at": 1})
    emb = ambient_embedding(p, ab)
    g = p.ngens
    nrel = len(p.relators)
    # d1 has a nonzero entry as soon as some generator maps nontrivially, which b >= 1 forces
    rank_d1 = 1
    # pushing to Z^b is a ring map, so the level-1 rank bounds the level-2 rank from below;
    # d2 * d1 = 0 bounds it from above
    lower = lvl1.witness["rank_d2"]
    upper = min(nrel, g - rank_d1)
    if lower == upper:
        return LevelRank(2, g - rank_d1 - lower, "squeeze-certified", {
            "rank_d1": rank_d1, "rank_d2": lower, "lower_bound": lower, "upper_bound": upper,
            "ambient_rank": emb.tower.rank,
        })
    r1, r2, wit = _level2_exact(p, emb, reverse)
    if not lower <= r2 <= upper:
        raise AssertionError("level-2 rank escapes its certified bounds")
    wit.update({"rank_d1": r1, "rank_d2": r2, "lower_bound": lower, "upper_bound": upper,
                "ambient_rank": emb.tower.rank})
    return LevelRank(2, g - r1 - r2, "skew-elimination", wit)


# --- public operations ------------------------------------------------------

def level_rank(p: Presentation, n: int, *, reverse: bool = False) -> LevelRank:
    """r_n for n <= 2; ``reverse`` runs eliminations with rows and columns reversed."""
    _check_level(n)
    ab = abelianization(p)
    if n == 0:
        return LevelRank(0, ab.b, "abelianization", {"torsion": list(ab.torsion)})
    if ab.b == 0:
        return LevelRank(n, 0, "b1-zero-shortcut", {"stabilized_at": 0})
    lvl1 = _level1(p, ab, reverse)
    if n == 1:
        return lvl1
    return _level2(p, ab, lvl1, reverse)


def _koszul_applies(p: Presentation) -> bool:
    return not p.relators and p.ngens == 2


def quotient_descriptor(p: Presentation, n: int) -> QuotientDescriptor:
    _check_level(n)
    if n == 0:
        return QuotientDescriptor(0)
    ab = abelianization(p)
    if n == 1:
        return QuotientDescriptor(1, ab)
    if ab.b == 0:
        return QuotientDescriptor(2, ab, None, ModuleBasis("zero-module", 0, None), 0)
    lvl1 = _level1(p, ab)
    r1 = lvl1.rank
    emb = ambient_embedding(p, ab)
    if r1 == 0:
        module: ModuleBasis | Unsupported = ModuleBasis("zero-module", 0, None)
    elif _koszul_applies(p):
        module = ModuleBasis("koszul", 1, ExtensionTower.free_metabelian())
    elif ab.b == 1:
        module = _pid_basis(p, ab, r1)
    else:
        module = Unsupported("module-not-certified-free",
                             f"b1 = {ab.b} and the group is not free of rank 2; ranks use the ambient embedding")
    return QuotientDescriptor(2, ab, emb, module, r1)


def _pid_basis(p: Presentation, ab: AbelianizationData, r1: int) -> ModuleBasis:
    """b = 1: the module modulo torsion is free over the PID Q[t, t^-1]; t acts by t * identity."""
    _, J = level1_boundaries(p, ab)
    if J:
        _, D, _ = smith_normal_form(J, LaurentPIDDomain)
        nonzero = sum(1 for d in diagonal(D) if d)
    else:
        nonzero = 0
    if p.ngens - 1 - nonzero != r1:
        raise AssertionError("PID rank disagrees with the chain-rank formula")
    t = LaurentPoly.var(1, 0)
    z = LaurentPoly.zero(1)
    action = [[t if i == j else z for j in range(r1)] for i in range(r1)]
    return ModuleBasis("pid", r1, ExtensionTower(1, r1, [action], None, f"pid-{p.name or 'group'}"))


def rank_report(p: Presentation, max_level: int = LEVEL_CAP) -> RankReport:
    levels: dict = {}
    stabilized = None
    for n in range(max_level + 1):
        try:
            lvl = level_rank(p, n)
        except Unsupported as exc:
            levels[n] = exc
            continue
        levels[n] = lvl
        if stabilized is None and lvl.rank == 0:
            stabilized = n
    return RankReport(levels, stabilized)


@dataclass(frozen=True)
class Stabilization:
    stabilized_at: int | None
    ranks: tuple[int, ...]
    note: str

    def to_dict(self) -> dict:
        return {"stabilized_at": self.stabilized_at, "ranks": list(self.ranks), "note": self.note}


def stabilization(p: Presentation) -> Stabilization:
    """Least n <= 2 with r_n = 0, where r_0 is the first Betti number."""
    ranks = []
    for n in range(LEVEL_CAP + 1):
        r = level_rank(p, n).rank
        ranks.append(r)
        if r == 0:
            return Stabilization(n, tuple(ranks), f"r_{n} = 0, so G^({n + 1})_H = G^({n})_H and the series is constant from level {n}")
    return Stabilization(None, tuple(ranks), "not detected through level 2; unknown beyond level 2")


def augmentation_lower_bound(M: Sequence[Sequence]) -> int:
    """Rank over Q of the augmentation; a lower bound for the rank over the fraction field."""
    if not M or not M[0]:
        return 0
    return q_rank(augment_matrix(M))


def augmentation_rank_laurent(M: Sequence[Sequence[LaurentPoly]]) -> int:
    if not M or not M[0]:
        return 0
    return q_rank([[x.augmentation() for x in row] for row in M])


def completion_descriptor(p: Presentation, n: int = LEVEL_CAP) -> TowerDescriptor:
    _check_level(n)
    ab = abelianization(p)
    levels = [{"n": 0, "dimension": 0, "field": "trivial group"}]
    if n >= 1:
        levels.append({"n": 1, "dimension": ab.b, "field": "Q", "group": _power("Q", ab.b)})
    if ab.b == 0:
        return TowerDescriptor(tuple(levels), 0, "trivial")
    stabilized = None
    r1 = level_rank(p, 1).rank if n >= 1 else None
    if r1 == 0:
        stabilized = 1
    if n >= 2:
        entry: dict = {"n": 2, "dimension": r1, "field": f"K(Q^{ab.b})"}
        if r1:
            desc = quotient_descriptor(p, 2)
            if isinstance(desc.module, ModuleBasis) and desc.module.tower is not None:
                entry["action"] = desc.module.tower.describe()["actions"]
            else:
                entry["action"] = None
        levels.append(entry)
    limit = _power("Q", ab.b) if stabilized == 1 else None
    return TowerDescriptor(tuple(levels), stabilized, limit)


# --- symbolic consequences --------------------------------------------------

def _power(base: str, b: int) -> str:
    return base if b == 1 else f"{base}^{b}"


def symbolic_claims(p: Presentation, stab: Stabilization) -> list[dict]:
    """Statements that follow from the computed ranks without further computation."""
    ab = abelianization(p)
    claims = []
    k = stab.stabilized_at
    if k == 0:
        claims.append({"claim": "G^(n)_H = G for every n, so G/G^(n)_H is trivial and the completion is trivial",
                       "citation": "stabilization-at-zero"})
    elif k == 1:
        claims.append({"claim": f"G/G^(n)_H is isomorphic to {_power('Z', ab.b)} for every n >= 1",
                       "citation": "stabilization-by-rank"})
        claims.append({"claim": f"the completion tower is constant from level 1, with limit {_power('Q', ab.b)}",
                       "citation": "completion-stabilizes"})
    elif k == 2:
        claims.append({"claim": "G^(n)_H = G^(2)_H for every n >= 2", "citation": "stabilization-by-rank"})
    if not p.relators and p.ngens >= 2:
        m = p.ngens
        claims.append({"claim": f"r_n = {m - 1} for every n >= 1 (free group of rank {m})",
                       "citation": "free-group-series"})
        claims.append({"claim": "G^(omega)_H is trivial", "citation": "free-group-series"})
    return claims
