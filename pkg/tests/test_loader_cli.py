import json
import subprocess
import sys

import pytest

from conftest import CORPUS_FILES, write_json
from fiberlattice.cli import main
from fiberlattice.errors import InvariantError, ParseError, SchemaError
from fiberlattice.loader import document_from_config, dumps, load, loads


class TestLoader:
    def test_a2(self, a2_doc):
        cfg = loads(json.dumps(a2_doc))
        assert cfg.size == 2 and cfg.pairing[0][1] == 1

    def test_round_trip(self):
        for path in CORPUS_FILES:
            cfg = load(path)
            again = loads(dumps(cfg))
            assert again == cfg
            assert document_from_config(again).to_dict() == document_from_config(cfg).to_dict()

    def test_divisibility(self, a2_doc):
        a2_doc["curves"][0].update(field_degree=2, self_int=-3)
        with pytest.raises(InvariantError, match="does not divide"):
            loads(json.dumps(a2_doc))

    def test_radical(self, a2_doc):
        a2_doc["is_full_fiber"] = True
        with pytest.raises(InvariantError, match="F.C"):
            loads(json.dumps(a2_doc))

    def test_schema(self, a2_doc):
        del a2_doc["edges"]
        with pytest.raises(SchemaError):
            loads(json.dumps(a2_doc))

    def test_schema_version(self, a2_doc):
        a2_doc["schema_version"] = 2
        with pytest.raises(SchemaError, match="schema_version"):
            loads(json.dumps(a2_doc))

    def test_parse(self):
        with pytest.raises(ParseError):
            loads("{not json")

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            load(tmp_path / "absent.json")

    def test_duplicate_edge(self, a2_doc):
        a2_doc["edges"].append({"a": 1, "b": 0, "intersection": 1})
        with pytest.raises(InvariantError, match="duplicates"):
            loads(json.dumps(a2_doc))


class TestCli:
    def corpus(self, stem):
        return str(next(p for p in CORPUS_FILES if p.stem == stem))

    def test_classify_g2(self, capsys):
        assert main(["classify", self.corpus("g2_char3")]) == 0
        assert "G2, n=1, char-admissible" in capsys.readouterr().out

    def test_classify_strict_mismatch(self, tmp_path, capsys):
        data = json.loads(open(self.corpus("g2_char3")).read())
        data["characteristic"] = 0
        path = write_json(tmp_path, "g2.json", data)
        assert main(["classify", str(path)]) == 0
        assert main(["classify", str(path), "--strict"]) == 2
        assert "error [CriterionNotMet]" in capsys.readouterr().err

    def test_check_table(self, capsys):
        assert main(["check", self.corpus("double_fiber"), "--m", "2"]) == 0
        out = capsys.readouterr().out
        assert "generation degree bound: 5" in out
        assert "omega^2(-1Y) on 1Y: True" in out

    def test_fundcycle_json(self, tmp_path):
        out = tmp_path / "fc.json"
        assert main(["fundcycle", self.corpus("case5b_a5"), "--json", str(out)]) == 0
        report = json.loads(out.read_text())
        (cyc,) = report["cycles"]
        assert cyc["Z"] == [1, 1, 1, 1, 1] and cyc["identity"] and cyc["minimal"]

    def test_replay_json(self, tmp_path):
        out = tmp_path / "replay.json"
        assert main(["replay", self.corpus("nonreduced_star"), "--m", "2", "3", "--json", str(out)]) == 0
        report = json.loads(out.read_text())
        assert [t["m"] for t in report["traces"]] == [2, 3]

    def test_enumerate_chains(self, capsys):
        assert main(["enumerate-chains", "--max-nodes", "2", "--max-n", "1", "--diagrams"]) == 0
        out = capsys.readouterr().out
        assert "G2, n=1" in out and "4 chains" in out

    def test_enumerate_5b(self, tmp_path):
        out = tmp_path / "5b.json"
        code = main(["enumerate-5b", "--max-nodes", "9", "--max-n", "1", "--no-glued", "--json", str(out)])
        assert code == 0
        report = json.loads(out.read_text())
        assert len({s["shape"] for s in report["admissible"]}) == 8
        assert report["unmatched_shapes"] == []

    def test_invariant_exit_code(self, tmp_path, a2_doc, capsys):
        a2_doc["curves"][0].update(field_degree=2, self_int=-3)
        path = write_json(tmp_path, "bad.json", a2_doc)
        assert main(["check", str(path)]) == 1
        assert "error [Invariant]" in capsys.readouterr().err

    def test_parse_exit_code(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{")
        assert main(["classify", str(path)]) == 1

    def test_bound_exit_code(self):
        assert main(["enumerate-chains", "--max-nodes", "12"]) == 1

    def test_console_script(self):
        proc = subprocess.run(
            [sys.executable, "-m", "fiberlattice.cli", "classify", self.corpus("case5b_a5")],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert "A5, n=1" in proc.stdout
