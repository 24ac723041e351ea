from __future__ import annotations

import json
import subprocess
import sys

import jsonschema

import tfds.laurent as laurent
from tfds import __version__
from tfds.cli import main
from tfds.corpus import ENTRIES, data_path
from tfds.report import citation_table, report_schema, sha256

DATA = data_path("")


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def load(path):
    doc = json.loads(path.read_text())
    jsonschema.validate(doc, report_schema())
    for tag in doc["citations"]:
        assert tag in citation_table()
    return doc


class TestAnalyze:
    def test_trefoil(self, tmp_path, capsys):
        out = tmp_path / "r.json"
        code, text, _ = run(["analyze", DATA / "trefoil.pres", "--json", out], capsys)
        assert code == 0
        doc = load(out)
        pay = doc["payload"]
        assert pay["ranks"]["levels"]["1"]["rank"] == 0
        assert pay["stabilization"]["stabilized_at"] == 1
        assert pay["alexander"]["delta"] == "1 - t + t^2"
        assert doc["input"]["sha256"] == sha256((DATA / "trefoil.pres").read_bytes())
        assert doc["version"] == __version__
        assert "Alexander polynomial: 1 - t + t^2" in text

    def test_free2(self, tmp_path, capsys):
        out = tmp_path / "r.json"
        assert run(["analyze", DATA / "free2.pres", "--json", out], capsys)[0] == 0
        pay = load(out)["payload"]
        assert [pay["ranks"]["levels"][str(n)]["rank"] for n in range(3)] == [2, 1, 1]
        assert pay["stabilization"]["stabilized_at"] is None
        assert pay["alexander"] is None

    def test_cyclic3(self, tmp_path, capsys):
        out = tmp_path / "r.json"
        assert run(["analyze", DATA / "cyclic3.pres", "--json", out], capsys)[0] == 0
        pay = load(out)["payload"]
        assert pay["b1"] == 0 and pay["torsion"] == [3]
        assert pay["stabilization"]["stabilized_at"] == 0
        assert pay["completion"]["limit"] == "trivial"

    def test_level_cap_exit_code(self, tmp_path, capsys):
        out = tmp_path / "r.json"
        code, _, err = run(["analyze", DATA / "free2.pres", "--level", 3, "--json", out], capsys)
        assert code == 2 and "level-cap" in err
        assert load(out)["payload"]["unsupported"]["reason"] == "level-cap"

    def test_parse_error_exit_code(self, tmp_path, capsys):
        bad = tmp_path / "bad.pres"
        bad.write_text("gens x\nrel x q\n")
        code, _, err = run(["analyze", bad], capsys)
        assert code == 1 and "line 2" in err

    def test_missing_file(self, tmp_path, capsys):
        assert run(["analyze", tmp_path / "nope.pres"], capsys)[0] == 1

    def test_json_to_stdout(self, capsys):
        code, text, _ = run(["analyze", DATA / "unknot.pres", "--json", "-"], capsys)
        assert code == 0
        start = text.index("{")
        doc = json.loads(text[start:text.rindex("}") + 1])
        assert doc["schema"] == "tfds-report/1"


class TestCheckMap:
    def test_noniso(self, tmp_path, capsys):
        out = tmp_path / "m.json"
        assert run(["check-map", DATA / "noniso.map", "--json", out], capsys)[0] == 0
        pay = load(out)["payload"]
        assert pay["verdict"]["h1_iso"] and pay["verdict"]["h2_epi"] == "CertifiedByTargetVanishing"
        eq = {r["level"]: r for r in pay["consequences"]["rank_equalities"]}
        assert eq[1]["source"] == eq[1]["target"] == 1 and eq[1]["equal"]

    def test_doubling_notes_integral_failure(self, tmp_path, capsys):
        out = tmp_path / "m.json"
        code, text, _ = run(["check-map", DATA / "doubling.map", "--json", out], capsys)
        assert code == 0
        pay = load(out)["payload"]
        assert pay["verdict"]["h1_iso"] and not pay["verdict"]["h1_map"]["integral_iso_on_free_part"]
        assert pay["notes"]

    def test_broken(self, capsys):
        code, _, err = run(["check-map", DATA / "broken.map"], capsys)
        assert code == 1 and "not a homomorphism" in err

    def test_assume_onto(self, tmp_path, capsys):
        out = tmp_path / "m.json"
        assert run(["check-map", DATA / "trefoil-ab.map", "--assume-onto", "--json", out], capsys)[0] == 0
        assert "rational-2-connected-onto" in load(out)["citations"]


class TestCorpus:
    def test_list(self, capsys):
        code, text, _ = run(["corpus", "list"], capsys)
        assert code == 0
        names = text.split()
        assert set(names) >= {"free2", "free3", "trefoil", "figure8", "unknot", "cyclic3", "heisenberg",
                              "noniso-E", "nonfg-trunc-2", "nonfg-trunc-3", "nonfg-trunc-4"}

    def test_run_passes(self, tmp_path, capsys):
        out = tmp_path / "c.json"
        code, text, _ = run(["corpus", "run", "--json", out], capsys)
        assert code == 0
        doc = load(out)
        assert doc["payload"]["failures"] == []
        assert [e["name"] for e in doc["payload"]["entries"]] == sorted(e.name for e in ENTRIES)

    def test_truncations_are_flagged(self, tmp_path, capsys):
        out = tmp_path / "c.json"
        run(["corpus", "list", "--json", out], capsys)
        for e in load(out)["payload"]["entries"]:
            if e["name"].startswith("nonfg-trunc"):
                assert "does not realize" in e["note"]

    def test_injected_snf_fault_is_named(self, tmp_path, capsys, monkeypatch):
        real = laurent.smith_normal_form

        def off_by_one(M, dom=laurent.IntegerDomain, inverses=False):
            res = real(M, dom, inverses)
            if dom is laurent.IntegerDomain:
                D = res[1]
                for i in range(min(len(D), len(D[0]))):
                    if D[i][i]:
                        D[i][i] += 1
                        break
            return res

        monkeypatch.setattr(laurent, "smith_normal_form", off_by_one)
        out = tmp_path / "c.json"
        code, text, _ = run(["corpus", "run", "--json", out], capsys)
        assert code == 3
        assert "cyclic3: torsion expected [3], computed [4]" in text
        assert "cyclic3" in load(out)["payload"]["failures"]


class TestRank:
    def test_int(self, tmp_path, capsys):
        m = tmp_path / "m.txt"
        m.write_text("2; 4\n6; 8\n")
        out = tmp_path / "r.json"
        assert run(["rank", m, "--ring", "int", "--json", out], capsys)[0] == 0
        pay = load(out)["payload"]
        assert pay["rank"] == 2 and pay["invariant_factors"] == [2, 4]

    def test_laurent(self, tmp_path, capsys):
        m = tmp_path / "m.txt"
        m.write_text("1 - t1; t2\nt1 - t1^2; t1*t2\n")
        code, text, _ = run(["rank", m, "--ring", "laurent:2"], capsys)
        assert code == 0 and "rank = 1" in text

    def test_skew(self, tmp_path, capsys):
        tower = tmp_path / "tower.txt"
        tower.write_text("tower free-metabelian\n")
        m = tmp_path / "m.txt"
        m.write_text("s1 - 1; s2 - 1\ns1*s2 - 1; s2*s1 - 1\n")
        code, text, _ = run(["rank", m, "--ring", f"skew:{tower}"], capsys)
        assert code == 0 and "rank = 2" in text

    def test_bad_ring(self, tmp_path, capsys):
        m = tmp_path / "m.txt"
        m.write_text("1\n")
        assert run(["rank", m, "--ring", "quaternion"], capsys)[0] == 1


def test_console_script_and_determinism(tmp_path):
    outs = []
    for k, jobs in enumerate((1, 1, 3)):
        out = tmp_path / f"c{k}.json"
        subprocess.run([sys.executable, "-m", "tfds.cli", "corpus", "run", "--jobs", str(jobs), "--json", str(out)],
                       check=True, capture_output=True)
        outs.append(out.read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_citation_table_covers_every_tag_used():
    tags = set()
    for e in ENTRIES:
        tags.add(e.citation)
    for tag in tags:
        assert tag in citation_table()
    for text in citation_table().values():
        assert text and "\u2014" not in text
