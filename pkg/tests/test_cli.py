import json
import subprocess
import sys

import pytest

from storagecode.algebra import dumps_polynomial, elem_from_monomials
from storagecode.cli import main, parse_range
from storagecode.families import hamming_element, seven_eighths_element


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def f4_file(tmp_path):
    path = tmp_path / "f4.poly"
    path.write_text(dumps_polynomial(hamming_element(4).element))
    return path


class TestFamily:
    def test_hamming_writes_files(self, capsys, tmp_path):
        out = tmp_path / "f4.poly"
        code, _, _ = run(capsys, "family", "--name", "hamming", "--r", "4", "--out", out)
        assert code == 0
        sidecar = json.loads((tmp_path / "f4.poly.json").read_text())
        assert (sidecar["rate_lower"], sidecar["rate_upper"]) == ("21/32", "3/4")
        assert out.read_text().startswith("#")

    def test_generalized_arity(self, capsys, tmp_path):
        out = tmp_path / "g.poly"
        assert run(capsys, "family", "--name", "generalized", "--r", "3", "--k", "2", "--out", out)[0] == 0
        assert json.loads((tmp_path / "g.poly.json").read_text())["arity"] == 9

    def test_bad_parameter(self, capsys):
        code, _, err = run(capsys, "family", "--name", "hamming", "--r", "1")
        assert code == 2 and "r >= 2" in err

    def test_missing_output_dir(self, capsys, tmp_path):
        code, _, _ = run(capsys, "family", "--name", "hamming", "--r", "3", "--out", tmp_path / "no" / "x")
        assert code == 3

    def test_usage_error(self, capsys):
        assert run(capsys, "family", "--name", "nope")[0] == 2
        assert run(capsys)[0] == 2


class TestRate:
    def test_n1(self, capsys, tmp_path):
        path = tmp_path / "a.poly"
        path.write_text("n=1\nx1 + 1\n")
        code, out, _ = run(capsys, "rate", path, "--format", "json")
        assert code == 0
        assert json.loads(out)["rate"]["exact"] == "1/2"

    def test_f4(self, capsys, f4_file):
        code, out, _ = run(capsys, "rate", f4_file, "--format", "json")
        data = json.loads(out)
        assert code == 0
        assert data["rate"]["exact"] == "11/16" and data["triangle_free"]

    def test_masks_input(self, capsys, tmp_path):
        path = tmp_path / "s.txt"
        path.write_text("n=2\n0\n3\n")
        code, out, _ = run(capsys, "rate", path, "--masks", "--format", "json")
        assert code == 0 and json.loads(out)["code_dim"] == 2

    def test_resource(self, capsys, tmp_path):
        path = tmp_path / "big.poly"
        path.write_text("n=20\nx20 + 1\n")
        code, _, err = run(capsys, "rate", path)
        assert code == 4 and "ceiling" in err

    def test_max_arity_override(self, capsys, tmp_path, monkeypatch):
        monkeypatch.delenv("STORAGECODE_MAX_ARITY", raising=False)
        path = tmp_path / "p.poly"
        path.write_text("n=6\nx1 + 1\n")
        assert run(capsys, "rate", path, "--max-arity", "5")[0] == 4
        assert run(capsys, "rate", path)[0] == 0

    def test_parse_error(self, capsys, tmp_path):
        path = tmp_path / "bad.poly"
        path.write_text("x1 + y2\n")
        assert run(capsys, "rate", path)[0] == 2

    def test_missing_file(self, capsys, tmp_path):
        assert run(capsys, "rate", tmp_path / "missing.poly")[0] == 3

    def test_out_file(self, capsys, tmp_path, f4_file):
        out = tmp_path / "r.json"
        run(capsys, "rate", f4_file, "--format", "json", "--out", out)
        assert json.loads(out.read_text())["code_length"] == 32


class TestVerify:
    def test_seven_eighths_k2(self, capsys, tmp_path):
        path = tmp_path / "f2.poly"
        path.write_text(dumps_polynomial(seven_eighths_element(2).element))
        code, out, _ = run(capsys, "verify", path, "--format", "json")
        data = json.loads(out)
        assert code == 0 and data["passed"]
        # the tightest ceiling is 3/4: the block x1 x2 occurs in one monomial
        assert data["report"]["ceiling_from_necessary_conditions"] == "3/4"
        assert {c["name"] for c in data["checks"]} >= {
            "triangle_free", "storage_property", "single_vertex_repair",
            "dual_code_is_principal_ideal", "code_is_annihilator",
        }

    def test_dependent_triple(self, capsys, tmp_path):
        path = tmp_path / "t.poly"
        path.write_text(dumps_polynomial(elem_from_monomials(2, [0, 1, 2, 3])))
        code, out, _ = run(capsys, "verify", path)
        assert code == 1 and "[FAIL] triangle_free" in out

    def test_constant_term_zero(self, capsys, tmp_path):
        path = tmp_path / "c.poly"
        path.write_text("n=3\nx1 + x2\n")
        code, _, err = run(capsys, "verify", path)
        assert code == 2 and "constant" in err

    def test_json_byte_identical(self, capsys, f4_file):
        first = run(capsys, "verify", f4_file, "--format", "json", "--seed", "9")[1]
        second = run(capsys, "verify", f4_file, "--format", "json", "--seed", "9")[1]
        assert first == second
        assert json.loads(first)["seed"] == 9


class TestTable:
    def test_hamming(self, capsys):
        code, out, _ = run(capsys, "table", "--family", "hamming", "--r", "3..8", "--format", "json")
        rows = json.loads(out)["rows"]
        assert code == 0 and len(rows) == 6
        rates = [r["rate_float"] for r in rows]
        assert rates == sorted(rates) and rates[-1] <= 0.75
        assert all(r["within_bounds"] and r["triangle_free"] for r in rows)

    def test_seven_eighths(self, capsys):
        code, out, _ = run(capsys, "table", "--family", "seven_eighths", "--k", "1..3", "--format", "json")
        assert code == 0
        assert all(r["within_bounds"] for r in json.loads(out)["rows"])

    def test_empty_range(self, capsys):
        code, out, _ = run(capsys, "table", "--family", "hamming", "--r", "5..4")
        assert code == 0 and out == "(empty table)\n"

    def test_text_alignment(self, capsys):
        out = run(capsys, "table", "--family", "hamming", "--r", "3..5")[1]
        lines = out.splitlines()
        assert len(lines) == 4 and len({len(line) for line in lines}) == 1

    def test_parse_range(self):
        assert parse_range("3..5") == [3, 4, 5]
        assert parse_range("4") == [4]
        assert parse_range(None) == [None]
        assert parse_range("5..4") == []


class TestIdealVerify:
    @pytest.mark.parametrize("n", [2, 10])
    def test_pass(self, capsys, n):
        code, out, _ = run(capsys, "ideal-verify", "--n", n, "--partitions", "10")
        assert code == 0 and "FAIL" not in out

    def test_resource(self, capsys):
        assert run(capsys, "ideal-verify", "--n", "20")[0] == 4

    def test_json_identical(self, capsys):
        a = run(capsys, "ideal-verify", "--n", "4", "--format", "json")[1]
        b = run(capsys, "ideal-verify", "--n", "4", "--format", "json")[1]
        assert a == b and json.loads(a)["passed"]


class TestExport:
    @pytest.mark.parametrize("what", ["matrix", "edges", "dimacs", "codewords", "connection-set"])
    def test_kinds(self, capsys, f4_file, what):
        code, out, _ = run(capsys, "export", f4_file, "--what", what)
        assert code == 0 and out

    def test_edges_count(self, capsys, f4_file):
        out = run(capsys, "export", f4_file, "--what", "edges")[1]
        assert len(out.splitlines()) == 32 * 9 // 2

    def test_codewords_count(self, capsys, f4_file):
        out = run(capsys, "export", f4_file, "--what", "codewords")[1]
        assert len(out.splitlines()) == 22

    def test_to_file(self, capsys, tmp_path, f4_file):
        out = tmp_path / "h.gf2"
        assert run(capsys, "export", f4_file, "--out", out)[0] == 0
        assert out.read_text().startswith("gf2 32 32")


def test_module_entry_point(f4_file):
    proc = subprocess.run(
        [sys.executable, "-m", "storagecode", "rate", str(f4_file)],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert "11/16" in proc.stdout
