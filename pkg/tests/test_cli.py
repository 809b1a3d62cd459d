import json
import re
import subprocess
import sys

import jsonschema
import pytest

from pstkit.cli import load_schema, main, parse_graph_expr, search_graph, UsageError
from pstkit.graph_core import cartesian, make_named, write_graph6

SCHEMA = load_schema()


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    docs = [json.loads(line) for line in out.splitlines() if line.strip()]
    for doc in docs:
        jsonschema.validate(doc, SCHEMA)
    return code, docs, err


class TestGraphExpressions:
    def test_families(self):
        assert parse_graph_expr("path:3") == make_named("path", 3)

    def test_nested(self):
        g = parse_graph_expr("cartesian(complete:4, complete:4)")
        assert g == cartesian(make_named("complete", 4), make_named("complete", 4))
        assert parse_graph_expr("complement(tensor(path:2,g6:C~))").n == 8

    @pytest.mark.parametrize("bad", ["", "path", "path:3,", "cartesian(path:2)", "wheel(path:2)",
                                     "complement(path:2,path:3)", "cartesian(path:2,path:3"])
    def test_malformed(self, bad):
        with pytest.raises(UsageError):
            parse_graph_expr(bad)


class TestSpectrum:
    def test_star(self, capsys):
        code, (doc,), _ = run(capsys, "spectrum", "--named", "star:3")
        assert code == 0
        assert doc["delta"] == 3
        assert doc["eigenvalues"] == ["sqrt(3)", "0", "-sqrt(3)"]
        assert doc["supports"]["0"] == ["sqrt(3)", "-sqrt(3)"]

    def test_k4_g6(self, capsys):
        _, (doc,), _ = run(capsys, "spectrum", "--g6", "C~")
        assert doc["eigenvalues"] == ["3", "-1"] and doc["multiplicities"] == [1, 3]

    def test_k2(self, capsys):
        _, (doc,), _ = run(capsys, "spectrum", "--named", "path:2")
        assert doc["eigenvalues"] == ["1", "-1"]

    def test_residual(self, capsys):
        code, (doc,), _ = run(capsys, "spectrum", "--named", "cycle:7")
        assert code == 0
        assert doc["residual"][0]["multiplicity"] == 6

    def test_bad_graph6(self, capsys):
        assert run(capsys, "spectrum", "--g6", "C!")[0] == 1

    def test_needs_one_graph(self, capsys):
        assert run(capsys, "spectrum", "--g6", "C~", "--named", "path:2")[0] == 1
        assert run(capsys, "spectrum")[0] == 1


class TestCertify:
    def test_p3(self, capsys):
        code, (doc,), err = run(capsys, "certify", "--named", "path:3", "--u", "0", "--v", "2")
        assert code == 0
        assert doc["tau0"] == "1/1*pi/sqrt(2)" and doc["phase"] == "exp(i*pi*1/1)"
        assert doc["claims"] and "PST 0 -> 2" in err

    def test_p4(self, capsys):
        code, (doc,), _ = run(capsys, "certify", "--named", "path:4", "--u", "0", "--v", "3")
        assert code == 0
        assert doc["type"] == "pst_failure" and doc["condition"] == "ii"

    def test_c4(self, capsys):
        _, (doc,), _ = run(capsys, "certify", "--named", "cycle:4", "--u", "0", "--v", "2")
        assert doc["tau0"] == "1/2*pi/sqrt(1)"

    def test_periodicity(self, capsys):
        _, (doc,), _ = run(capsys, "certify", "--named", "cycle:4", "--u", "1", "--v", "1")
        assert doc["type"] == "periodicity" and doc["period"] == "1/1*pi/sqrt(1)"
        _, (doc,), _ = run(capsys, "certify", "--named", "path:4", "--u", "0", "--v", "0")
        assert doc["type"] == "not_periodic"

    def test_unsupported_exit(self, capsys):
        assert run(capsys, "certify", "--named", "cycle:7", "--u", "0", "--v", "0")[0] == 2

    def test_vertex_range(self, capsys):
        assert run(capsys, "certify", "--named", "path:3", "--u", "0", "--v", "9")[0] == 1

    def test_missing_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["certify", "--named", "path:3", "--u", "0"])
        assert exc.value.code == 1


class TestTensor:
    def test_k4_c4(self, capsys):
        code, (doc,), _ = run(capsys, "tensor", "--x", "complete:4", "--y", "cycle:4",
                              "--w", "0", "--z", "0", "--u", "0", "--v", "2")
        assert code == 0 and doc["passed"]
        assert doc["tau"] == "1/2*pi/sqrt(1)"

    def test_min_power(self, capsys):
        _, (doc,), _ = run(capsys, "tensor", "--x", "star:3", "--y", "cycle:4", "--w", "0", "--z", "0",
                           "--u", "0", "--v", "2", "--min-power")
        assert doc["type"] == "min_power" and doc["k0"] == 1
        _, (doc,), _ = run(capsys, "tensor", "--x", "star:3", "--y", "path:2", "--w", "0", "--z", "0",
                           "--u", "0", "--v", "1", "--min-power")
        assert doc["k0"] == 2 and doc["claims"]

    def test_violation(self, capsys):
        code, (doc,), _ = run(capsys, "tensor", "--x", "path:2", "--y", "path:4", "--w", "0", "--z", "1",
                              "--u", "0", "--v", "3")
        assert code == 0 and doc["type"] == "tensor_violation"

    def test_periodic_y(self, capsys):
        _, (doc,), _ = run(capsys, "tensor", "--x", "path:2", "--y", "cycle:4", "--w", "0", "--z", "1",
                           "--u", "1", "--v", "1")
        assert doc["type"] == "tensor_necessary" and len(doc["requirements"]) == 2


class TestSwitching:
    def test_complement(self, capsys):
        code, (doc,), _ = run(capsys, "switching", "--x", "cartesian(complete:4,complete:4)", "--complement")
        assert code == 0
        assert doc["case"] == "i" and doc["tau"] == "1/2*pi/sqrt(1)"

    def test_matching(self, capsys):
        _, (doc,), _ = run(capsys, "switching", "--x", "cycle:4", "--matching")
        assert [r["case"] for r in doc["reports"]] == ["iii"]

    def test_k3_complement(self, capsys):
        _, (doc,), _ = run(capsys, "switching", "--x", "complete:3", "--complement")
        assert doc["type"] == "switching_failure"

    def test_general(self, capsys):
        _, (doc,), _ = run(capsys, "switching", "--x", "empty:2", "--y", "path:2")
        assert doc["type"] == "switching_reports"

    def test_mode_required(self, capsys):
        assert run(capsys, "switching", "--x", "cycle:4")[0] == 1
        assert run(capsys, "switching", "--x", "cycle:4", "--matching", "--complement")[0] == 1


class TestScan:
    def test_c4(self, capsys):
        _, (doc,), _ = run(capsys, "scan", "--named", "cycle:4", "--u", "0", "--v", "2")
        assert abs(doc["best_t"] - 1.5708) < 1e-3 and doc["best_fidelity"] > 1 - 1e-6

    def test_bad_step(self, capsys):
        assert run(capsys, "scan", "--named", "cycle:4", "--u", "0", "--v", "2", "--step", "0")[0] == 1


class TestVerifyAndSearch:
    def test_verify_roundtrip(self, capsys, tmp_path):
        lines = []
        for argv in (["certify", "--named", "path:3", "--u", "0", "--v", "2"],
                     ["tensor", "--x", "complete:4", "--y", "cycle:4", "--w", "0", "--z", "0", "--u", "0",
                      "--v", "2"],
                     ["switching", "--x", "cycle:4", "--matching"],
                     ["certify", "--named", "cycle:4", "--u", "0", "--v", "0"]):
            main(argv)
            lines.append(capsys.readouterr().out.strip())
        path = tmp_path / "results.jsonl"
        path.write_text("\n".join(lines) + "\n")
        code, docs, err = run(capsys, "verify", str(path))
        assert code == 0
        assert all(d["passed"] for d in docs)
        ok, total = re.search(r"(\d+)/(\d+) claims verified", err).groups()
        assert ok == total and int(total) >= 4

    def test_verify_catches_tampering(self, capsys, tmp_path):
        main(["certify", "--named", "path:3", "--u", "0", "--v", "2"])
        doc = json.loads(capsys.readouterr().out)
        doc["claims"][0]["tau"] = "2/1*pi/sqrt(2)"
        path = tmp_path / "bad.jsonl"
        path.write_text(json.dumps(doc) + "\n")
        _, (out,), _ = run(capsys, "verify", str(path))
        assert not out["passed"]

    def test_verify_missing_file(self, capsys, tmp_path):
        assert run(capsys, "verify", str(tmp_path / "nope.jsonl"))[0] == 1

    def test_search_small(self, capsys, tmp_path):
        corpus = tmp_path / "c.g6"
        corpus.write_text("\n".join(write_graph6(make_named(f, k)) for f, k in
                                    [("path", 2), ("path", 3), ("path", 4), ("cycle", 4)]) + "\n")
        _, docs, _ = run(capsys, "search", str(corpus))
        pairs = [[(p["u"], p["v"]) for p in d["pst"]] for d in docs]
        assert pairs == [[(0, 1)], [(0, 2)], [], [(0, 2), (1, 3)]]

    def test_search_empty(self, capsys, tmp_path):
        corpus = tmp_path / "empty.g6"
        corpus.write_text("")
        code, docs, _ = run(capsys, "search", str(corpus))
        assert code == 0 and docs == []

    def test_search_corpus_matches_certify(self, corpus):
        from pstkit.pst_core import certify_pst
        for g in corpus[::25]:
            doc = search_graph(write_graph6(g))
            found = {(p["u"], p["v"]) for p in doc["pst"]}
            direct = {(u, v) for u in range(g.n) for v in range(u + 1, g.n) if certify_pst(g, u, v).passed}
            assert found == direct

    @pytest.mark.slow
    def test_search_jobs_invariant(self):
        from conftest import DATA
        outs = []
        for jobs in ("1", "4"):
            res = subprocess.run([sys.executable, "-m", "pstkit.cli", "search", str(DATA / "graphs7.g6"),
                                  "--jobs", jobs], capture_output=True, text=True, check=True)
            outs.append(sorted(res.stdout.splitlines()))
        assert outs[0] == outs[1]
        assert len(outs[0]) == 1252


def test_entry_point():
    res = subprocess.run(["pstkit", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "0.1.0" in res.stdout


def test_exit_code_subprocess():
    res = subprocess.run([sys.executable, "-m", "pstkit.cli", "certify", "--named", "nope:3", "--u", "0",
                          "--v", "1"], capture_output=True, text=True)
    assert res.returncode == 1 and "error" in res.stderr
