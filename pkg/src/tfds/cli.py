"""Command-line front end.

Exit codes: 0 success, 1 error, 2 unsupported computation, 3 corpus mismatch.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import corpus
from .homcheck import NotAHomomorphism, check_rational_two_connected, consequence_report
from .laurent import abelianization, alexander_data, diagonal, laurent_rank, parse_laurent, q_rank, snf_int
from .presentations import PresentationError, parse_map, parse_presentation
from .report import collect_citations, document, dumps
from .series import (LEVEL_CAP, Stabilization, Unsupported, completion_descriptor, rank_report,
                     symbolic_claims)
from .skewfield import ExtensionTower, parse_group_ring, skew_matrix_rank

EXIT_OK, EXIT_ERROR, EXIT_UNSUPPORTED, EXIT_MISMATCH = 0, 1, 2, 3


class CliError(Exception):
    pass


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from exc


def _emit(doc: dict, json_path: str | None) -> None:
    if json_path is None:
        return
    text = dumps(doc)
    if json_path == "-":
        sys.stdout.write(text)
    else:
        Path(json_path).write_text(text, encoding="utf-8")


# --- analyze ----------------------------------------------------------------

def analyze_payload(text: str, level: int = LEVEL_CAP) -> tuple[dict, Unsupported | None]:
    p = parse_presentation(text)
    ab = abelianization(p)
    cap = min(level, LEVEL_CAP)
    rr = rank_report(p, cap)
    ranks = [rr.rank(n) for n in range(cap + 1)]
    if rr.stabilized_at is not None:
        k = rr.stabilized_at
        stab = Stabilization(k, tuple(ranks[:k + 1]),
                             f"r_{k} = 0, so the series is constant from level {k}")
    else:
        stab = Stabilization(None, tuple(ranks), f"not detected through level {cap}")
    payload: dict = {
        "command": "analyze",
        "presentation": {"name": p.name, "generators": list(p.generators),
                         "relators": [r.format(p.generators) for r in p.relators]},
        "b1": ab.b,
        "torsion": list(ab.torsion),
        "ranks": rr.to_dict(),
        "stabilization": stab.to_dict(),
        "alexander": None,
        "completion": completion_descriptor(p, cap).to_dict(),
        "claims": symbolic_claims(p, stab),
        "unsupported": None,
    }
    payload["citations"] = ["abelianization", "chain-rank-formula"] + (["ore-fraction-field"] if cap >= 1 else [])
    if ab.b == 1:
        ad = alexander_data(p)
        payload["alexander"] = {"delta": ad.delta.format(), "torsion": [t.format() for t in ad.torsion],
                                "jacobian_rank": ad.jacobian_rank}
        payload["citations"].append("alexander-module")
    unsupported = None
    for v in rr.levels.values():
        if isinstance(v, Unsupported):
            unsupported = v
            break
    if level > LEVEL_CAP:
        unsupported = Unsupported("level-cap", f"level {level} requested; levels above {LEVEL_CAP} are not computed")
    if unsupported is not None:
        payload["unsupported"] = {"reason": unsupported.reason, "detail": unsupported.detail}
    return payload, unsupported


def cmd_analyze(args) -> int:
    data = _read(args.file)
    payload, unsupported = analyze_payload(data.decode("utf-8"), args.level)
    doc = document(payload, args.file, data, collect_citations(payload))
    _emit(doc, args.json)
    levels = payload["ranks"]["levels"]
    print(f"b1 = {payload['b1']}, torsion = {payload['torsion']}")
    for n, v in levels.items():
        if "rank" in v:
            print(f"r_{n} = {v['rank']}  ({v['method']})")
        else:
            print(f"r_{n}: unsupported ({v['unsupported']})")
    print(f"stabilized at: {payload['stabilization']['stabilized_at']}")
    if payload["alexander"]:
        print(f"Alexander polynomial: {payload['alexander']['delta']}")
    for c in payload["claims"]:
        print(f"claim: {c['claim']}")
    if unsupported is not None:
        print(f"unsupported: {unsupported.reason}: {unsupported.detail}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    return EXIT_OK


# --- check-map --------------------------------------------------------------

def check_map_payload(text: str, base_dir: str | Path, assume_onto: bool = False) -> dict:
    spec = parse_map(text, base_dir)
    h = spec.hom
    v = check_rational_two_connected(h)
    cons = consequence_report(h, v, assume_onto=assume_onto)
    notes = []
    if v.h1_iso and not v.h1.integral_iso:
        notes.append("isomorphism on H_1 with rational coefficients only; not an isomorphism on the integral free part")
    return {
        "command": "check-map",
        "map": {"name": spec.name, "source": spec.source_path, "target": spec.target_path,
                "images": [w.format(h.target.generators) for w in h.images],
                "assume_onto": assume_onto},
        "verdict": v.to_dict(),
        "rationally_two_connected": v.rationally_two_connected,
        "consequences": cons.to_dict(),
        "notes": notes,
    }


def cmd_check_map(args) -> int:
    data = _read(args.file)
    try:
        payload = check_map_payload(data.decode("utf-8"), Path(args.file).parent, args.assume_onto)
    except NotAHomomorphism as exc:
        raise CliError(f"not a homomorphism: {exc}") from exc
    doc = document(payload, args.file, data, collect_citations(payload))
    _emit(doc, args.json)
    v = payload["verdict"]
    print(f"H1 mono = {v['h1_mono']}, H1 iso = {v['h1_iso']}, H2 epi = {v['h2_epi']}")
    for note in payload["notes"]:
        print(f"note: {note}")
    for c in payload["consequences"]["claims"]:
        print(f"claim: {c['claim']}")
    for r in payload["consequences"]["rank_equalities"]:
        print(f"r_{r['level']}: source {r['source']}, target {r['target']}, equal = {r['equal']}")
    return EXIT_OK


# --- corpus -----------------------------------------------------------------

def _corpus_bytes() -> bytes:
    return b"".join(e.name.encode() + b"\0" + corpus.data_path(e.filename).read_bytes() for e in corpus.ENTRIES)


def corpus_run_document(jobs: int = 1) -> dict:
    results = corpus.run(jobs)
    payload = {"command": "corpus-run", "entries": results,
               "failures": [r["name"] for r in results if r["status"] != "pass"]}
    return document(payload, "corpus", _corpus_bytes(), collect_citations(payload))


def cmd_corpus(args) -> int:
    if args.action == "list":
        payload = {"command": "corpus-list",
                   "entries": [{"name": e.name, "file": e.filename, "citation": e.citation,
                                "expected": {k: {"value": x.value, "basis": x.basis}
                                             for k, x in sorted(e.expected.items())},
                                "note": e.note} for e in corpus.ENTRIES],
                   "maps": list(corpus.MAPS)}
        for e in corpus.ENTRIES:
            print(e.name)
        _emit(document(payload, "corpus", _corpus_bytes(), collect_citations(payload)), args.json)
        return EXIT_OK
    doc = corpus_run_document(args.jobs)
    _emit(doc, args.json)
    for r in doc["payload"]["entries"]:
        print(f"{r['status'].upper()} {r['name']}")
        for m in r["mismatches"]:
            print(f"  {r['name']}: {m['invariant']} expected {m['expected']!r}, computed {m['computed']!r}")
    return EXIT_MISMATCH if doc["payload"]["failures"] else EXIT_OK


# --- rank -------------------------------------------------------------------

def parse_tower(text: str) -> ExtensionTower:
    """Tower file: one line ``tower split <b> <rank>`` or ``tower free-metabelian``."""
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] != "tower" or len(parts) < 2:
            raise CliError(f"bad tower line: {line!r}")
        if parts[1] == "free-metabelian" and len(parts) == 2:
            return ExtensionTower.free_metabelian()
        if parts[1] == "split" and len(parts) == 4:
            return ExtensionTower.split(int(parts[2]), int(parts[3]))
        raise CliError(f"bad tower line: {line!r}")
    raise CliError("empty tower file")


def read_matrix(text: str) -> list[list[str]]:
    rows = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append([x.strip() for x in line.split(";")])
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise CliError("matrix rows have different lengths")
    return rows


def rank_payload(text: str, ring: str, base_dir: str | Path = ".") -> dict:
    cells = read_matrix(text)
    out: dict = {"command": "rank", "ring": ring, "rows": len(cells), "cols": len(cells[0]) if cells else 0}
    if not cells:
        out["rank"] = 0
    elif ring == "int":
        M = [[Fraction(x) for x in r] for r in cells]
        out["rank"] = q_rank(M)
        if all(x.denominator == 1 for r in M for x in r):
            _, D, _ = snf_int([[int(x) for x in r] for r in M])
            out["invariant_factors"] = [d for d in diagonal(D) if d]
    elif ring.startswith("laurent:"):
        b = int(ring.split(":", 1)[1])
        out["rank"] = laurent_rank([[parse_laurent(x, b) for x in r] for r in cells])
    elif ring.startswith("skew:"):
        tower_path = Path(base_dir) / ring.split(":", 1)[1]
        tower = parse_tower(_read(str(tower_path)).decode("utf-8"))
        out["tower"] = tower.describe()
        out["rank"] = skew_matrix_rank([[parse_group_ring(x, tower) for x in r] for r in cells])
    else:
        raise CliError(f"unknown ring {ring!r}")
    out["citations"] = ["ore-fraction-field"] if not ring == "int" else []
    return out


def cmd_rank(args) -> int:
    data = _read(args.file)
    payload = rank_payload(data.decode("utf-8"), args.ring)
    _emit(document(payload, args.file, data, collect_citations(payload)), args.json)
    print(f"rank = {payload['rank']}")
    return EXIT_OK


# --- entry point ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tfds", description="Torsion-free derived series toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="ranks, stabilization and completion data of a presentation")
    a.add_argument("file")
    a.add_argument("--level", type=int, default=LEVEL_CAP)
    a.add_argument("--json", metavar="PATH", help="write the report here ('-' for stdout)")
    a.set_defaults(func=cmd_analyze)

    m = sub.add_parser("check-map", help="rational 2-connectivity of a homomorphism")
    m.add_argument("file")
    m.add_argument("--json", metavar="PATH")
    m.add_argument("--assume-onto", action="store_true", help="assert that the map is surjective")
    m.set_defaults(func=cmd_check_map)

    c = sub.add_parser("corpus", help="list or recompute the bundled examples")
    c.add_argument("action", choices=["list", "run"])
    c.add_argument("--jobs", type=int, default=1)
    c.add_argument("--json", metavar="PATH")
    c.set_defaults(func=cmd_corpus)

    r = sub.add_parser("rank", help="rank of a matrix over Q, Q[Z^b] or a skew tower")
    r.add_argument("file")
    r.add_argument("--ring", required=True, help="int | laurent:<b> | skew:<tower-file>")
    r.add_argument("--json", metavar="PATH")
    r.set_defaults(func=cmd_rank)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "level", 0) is not None and getattr(args, "level", 0) < 0:
        print("error: levels are nonnegative", file=sys.stderr)
        return EXIT_ERROR
    try:
        return args.func(args)
    except Unsupported as exc:
        print(f"unsupported: {exc.reason}: {exc.detail}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (CliError, PresentationError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
