"""
Test Suite for the Command-Line Interface

Runs ``main`` in-process with captured output and checks exit codes:
0 success, 2 invariant failure, 3 bad input.
"""

import csv
import io
import json
from pathlib import Path

import pytest

from src.main import EXIT_BAD_INPUT, EXIT_FAILURE, EXIT_OK, build_parser, main

ROOT = Path(__file__).resolve().parents[2]
STRUCTURES = ROOT / "config" / "structures"
PATTERN = ROOT / "config" / "golden" / "pattern_2y.yml"


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


class TestPolytopeCommand:
    """Face data of associahedra and multiplihedra."""

    def test_f_vector(self):
        code, text = run("polytope", "K", "4", "--f-vector")
        assert code == EXIT_OK
        assert text.strip() == "5,5,1"

    def test_f_vector_csv(self):
        code, text = run("polytope", "K", "4", "--f-vector", "--format", "csv")
        assert code == EXIT_OK
        rows = list(csv.DictReader(io.StringIO(text)))
        assert [int(r["faces"]) for r in rows] == [5, 5, 1]

    def test_multiplihedron_facets(self):
        code, text = run("polytope", "J", "3", "--facets")
        assert code == EXIT_OK
        assert text.strip().endswith("6 facets")

    def test_bad_family(self):
        code, _ = run("polytope", "L", "4")
        assert code == EXIT_BAD_INPUT

    def test_bad_size(self):
        code, _ = run("polytope", "K", "four")
        assert code == EXIT_BAD_INPUT


class TestStructureCommands:
    """Relation reports and Massey products on structure files."""

    def test_check_passes(self):
        code, text = run("check", str(STRUCTURES / "r_candidate.json"), "--nmax", "3")
        assert code == EXIT_OK
        assert "pass" in text

    def test_check_reports_failure(self):
        code, text = run("check", str(STRUCTURES / "r_candidate_minimal.json"), "--nmax", "5")
        assert code == EXIT_FAILURE
        assert "first failure: n = 5" in text

    def test_triple_product(self):
        code, text = run("massey", str(STRUCTURES / "strict_dga.json"), "a", "b", "c")
        assert code == EXIT_OK
        assert text.strip() == "<a, b, c> = u"

    def test_triple_product_json(self):
        code, text = run("massey", str(STRUCTURES / "strict_dga.json"), "a", "b", "c", "--format", "json")
        assert code == EXIT_OK
        assert json.loads(text) == {"inputs": ["a", "b", "c"], "classes": ["u"]}

    def test_wrong_number_of_elements(self):
        code, _ = run("massey", str(STRUCTURES / "strict_dga.json"), "a", "b")
        assert code == EXIT_BAD_INPUT

    def test_module_fourfold_product(self, tmp_path):
        path = tmp_path / "fourfold.json"
        path.write_text(json.dumps({
            "kind": "module",
            "side": "right",
            "algebra": {"kind": "algebra", "basis": [{"name": "r", "degree": -1}]},
            "basis": [{"name": "x", "degree": 0}, {"name": "z", "degree": -1}],
            "operations": [{"inputs": ["x", "r", "r", "r"], "output": ["z"]}],
        }))
        code, text = run("massey", str(path), "x", "r", "r", "r")
        assert code == EXIT_OK
        assert text.strip() == "<x, r, r, r> = z"

    def test_missing_structure_file(self, tmp_path):
        code, _ = run("check", str(tmp_path / "absent.json"))
        assert code == EXIT_BAD_INPUT


class TestTorCommand:
    """Both Tor paths with their cross-check."""

    def test_grid_output(self):
        code, text = run("tor", "--left", "F", "--right", "F", "-p", "3", "--nmax", "2")
        assert code == EXIT_OK
        assert "cross-check: agree" in text

    def test_window_and_json(self):
        code, text = run("tor", "--left", "F", "--right", "F", "-p", "3", "--nmax", "2", "--window=-6:0", "--format", "json")
        assert code == EXIT_OK
        doc = json.loads(text)
        assert doc["cross_check"]["agree"]
        assert doc["resolution"]["j_range"] == [-6, 0]

    def test_unknown_module(self):
        code, _ = run("tor", "--left", "F", "--right", "nonsense", "-p", "3")
        assert code == EXIT_BAD_INPUT

    def test_reversed_window(self):
        code, _ = run("tor", "--left", "F", "--right", "F", "--window=0:-6")
        assert code == EXIT_BAD_INPUT


class TestSpectralSequenceCommand:
    """Hypothesized patterns against a rank profile."""

    def test_pattern_against_rank_profile(self):
        code, text = run(
            "ss", "--left", "HS2311", "--right", "HS2311",
            "--pattern", str(PATTERN), "--target", "HS_hat_2Y",
        )
        assert code == EXIT_OK
        assert "target: agree" in text

    def test_missing_pattern(self, tmp_path):
        code, _ = run("ss", "--left", "F", "--right", "F", "--pattern", str(tmp_path / "absent.yml"))
        assert code == EXIT_BAD_INPUT


class TestGlobalOptions:
    """Flags shared by every command."""

    def test_missing_config_file(self, tmp_path):
        code, _ = run("--config", str(tmp_path / "absent.yml"), "polytope", "K", "4")
        assert code == EXIT_BAD_INPUT

    def test_log_flags_accepted(self):
        code, _ = run("--log-level", "DEBUG", "--json-logs", "polytope", "K", "3")
        assert code == EXIT_OK

    def test_bad_log_level(self):
        code, _ = run("--log-level", "LOUD", "polytope", "K", "3")
        assert code == EXIT_BAD_INPUT

    def test_command_required(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])

    def test_identical_runs_give_identical_output(self):
        commands = [
            ("tor", "--left", "F", "--right", "F", "-p", "3", "--nmax", "2", "--seed", "5"),
            ("tor", "--left", "F", "--right", "F", "-p", "3", "--nmax", "2", "--format", "json"),
            ("ss", "--left", "F", "--right", "F", "-p", "2", "--nmax", "2", "--rmax", "3", "--format", "json"),
            ("massey", str(STRUCTURES / "strict_dga_two_witnesses.json"), "a", "b", "c", "--seed", "3"),
            ("polytope", "J", "4", "--facets"),
        ]
        for argv in commands:
            first = run(*argv)
            assert first[0] == EXIT_OK, argv
            assert run(*argv) == first, argv
