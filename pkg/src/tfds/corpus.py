"""Named presentations with their expected invariants."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any

from .presentations import Presentation, parse_presentation


@dataclass(frozen=True)
class Expected:
    value: Any
    basis: str      # "worked-example", "derivation" or "definition"


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    filename: str
    expected: dict
    citation: str
    note: str = ""

    def text(self) -> str:
        return data_path(self.filename).read_text(encoding="utf-8")

    def presentation(self) -> Presentation:
        return parse_presentation(self.text())


def data_path(filename: str) -> Path:
    return Path(str(resources.files("tfds") / "data" / filename))


def _free(m: int) -> CorpusEntry:
    return CorpusEntry(f"free{m}", f"free{m}.pres", {
        "b1": Expected(m, "definition"),
        "r1": Expected(m - 1, "derivation"),
        "r2": Expected(m - 1, "derivation"),
        "stabilized_at": Expected(None, "worked-example"),
    }, "free-group-series")


def _trunc(k: int) -> CorpusEntry:
    return CorpusEntry(f"nonfg-trunc-{k}", f"nonfg-trunc-{k}.pres", {
        "b1": Expected(2, "derivation"),
        "r1": Expected(1, "derivation"),
        "r2": Expected(1, "derivation"),
    }, "finite-truncation",
        note="finite truncation of an infinitely generated group; it approximates but does not realize that example")


ENTRIES: tuple[CorpusEntry, ...] = tuple(sorted([
    _free(2),
    _free(3),
    CorpusEntry("trefoil", "trefoil.pres", {
        "b1": Expected(1, "definition"),
        "r1": Expected(0, "worked-example"),
        "stabilized_at": Expected(1, "worked-example"),
        "delta": Expected("1 - t + t^2", "derivation"),
    }, "stabilization-by-rank"),
    CorpusEntry("figure8", "figure8.pres", {
        "b1": Expected(1, "definition"),
        "r1": Expected(0, "worked-example"),
        "stabilized_at": Expected(1, "worked-example"),
        "delta": Expected("1 - 3*t + t^2", "derivation"),
    }, "stabilization-by-rank"),
    CorpusEntry("unknot", "unknot.pres", {
        "b1": Expected(1, "definition"),
        "r1": Expected(0, "derivation"),
        "stabilized_at": Expected(1, "derivation"),
        "delta": Expected("1", "definition"),
    }, "stabilization-by-rank"),
    CorpusEntry("cyclic3", "cyclic3.pres", {
        "b1": Expected(0, "derivation"),
        "torsion": Expected([3], "derivation"),
        "stabilized_at": Expected(0, "worked-example"),
    }, "stabilization-at-zero"),
    CorpusEntry("heisenberg", "heisenberg.pres", {
        "b1": Expected(2, "derivation"),
        "r1": Expected(0, "worked-example"),
        "stabilized_at": Expected(1, "worked-example"),
    }, "stabilization-by-rank"),
    CorpusEntry("noniso-E", "noniso-E.pres", {
        "b1": Expected(2, "derivation"),
        "r1": Expected(1, "worked-example"),
        "r2": Expected(1, "derivation"),
    }, "rank-equality"),
    _trunc(2),
    _trunc(3),
    _trunc(4),
], key=lambda e: e.name))

MAPS = ("broken.map", "doubling.map", "figure8-ab.map", "inclusion.map", "noniso.map", "trefoil-ab.map")


def entry(name: str) -> CorpusEntry:
    for e in ENTRIES:
        if e.name == name:
            return e
    raise KeyError(name)


def compute(e: CorpusEntry) -> dict:
    """The invariants named in ``e.expected``, recomputed."""
    from .laurent import abelianization, alexander_data
    from .series import level_rank, stabilization

    p = e.presentation()
    out: dict = {}
    for key in sorted(e.expected):
        if key == "b1":
            out[key] = abelianization(p).b
        elif key == "torsion":
            out[key] = list(abelianization(p).torsion)
        elif key in ("r1", "r2"):
            out[key] = level_rank(p, int(key[1])).rank
        elif key == "stabilized_at":
            out[key] = stabilization(p).stabilized_at
        elif key == "delta":
            out[key] = alexander_data(p).delta.format()
        else:
            raise KeyError(key)
    return out


def check(e: CorpusEntry) -> dict:
    got = compute(e)
    mismatches = []
    for key in sorted(e.expected):
        want = e.expected[key].value
        if got[key] != want:
            mismatches.append({"invariant": key, "expected": want, "computed": got[key]})
    return {
        "name": e.name,
        "computed": got,
        "expected": {k: {"value": v.value, "basis": v.basis} for k, v in sorted(e.expected.items())},
        "citation": e.citation,
        "note": e.note,
        "status": "pass" if not mismatches else "fail",
        "mismatches": mismatches,
    }


def _check_by_name(name: str) -> dict:
    return check(entry(name))


def run(jobs: int = 1) -> list[dict]:
    """Check every entry; results are ordered by name whatever the worker count."""
    names = [e.name for e in ENTRIES]
    if jobs <= 1:
        results = [_check_by_name(n) for n in names]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_check_by_name, names))
    return sorted(results, key=lambda r: r["name"])
