"""
Test Suite for Spectral Sequences

Computed pages of small filtered complexes and of the ⊠ filtration,
hypothesized differential patterns with rank bookkeeping, and the Massey
product formulas for d₂ and d₃.
"""

from pathlib import Path

import pytest

from src.ainf import load_structure, strict_module, strict_ring_algebra, structure_from_dict
from src.boxtensor import box_tensor
from src.config_parser import golden_dir
from src.exceptions import (
    BadInputError,
    BidegreeMismatch,
    ChainComplexError,
    FiltrationError,
    InfeasiblePattern,
    StructureFormatError,
)
from src.resolve import load_table
from src.ring_r import ring_r
from src.rmodule import catalogue, rank_profile
from src.ssq import (
    DifferentialEntry,
    DifferentialPattern,
    FilteredComplex,
    apply_hypothesized,
    bidegree,
    e_infinity,
    e_infty_vs_target,
    em_ss,
    load_pattern,
    massey_differential_check,
    module_action_check,
    page_from_table,
    pages,
    run_patterns,
)

STRUCTURES = Path(__file__).resolve().parents[2] / "config" / "structures"

FOURFOLD_MODULE = {
    "kind": "module",
    "name": "x4",
    "side": "right",
    "algebra": {"kind": "algebra", "name": "r", "basis": [{"name": "r", "degree": -1}]},
    "basis": [{"name": "x", "degree": 0}, {"name": "z", "degree": -1}],
    "operations": [{"inputs": ["x", "r", "r", "r"], "output": ["z"]}],
}


class TestFilteredComplex:
    """Pages of hand-built two-level complexes."""

    def setup_method(self):
        # a (degree 1, level 1) bounds b (degree 0, level 0)
        self.fc = FilteredComplex((1, 0), (1, 0), {0: frozenset({1})}, ("a", "b"))

    def test_first_page_and_differential(self):
        e1, e2 = pages(self.fc, 2)
        assert e1.table.nonzero() == {(1, 0): 1, (0, 0): 1}
        assert len(e1.differentials) == 1
        entry = e1.differentials[0]
        assert (entry.source, entry.target, entry.rank) == ((1, 0), (0, 0), 1)
        assert e2.table.nonzero() == {}

    def test_e_infinity_matches_homology(self):
        assert self.fc.homology() == {}
        assert e_infinity(self.fc).table.nonzero() == {}

    def test_trivial_filtration_collapses(self):
        fc = FilteredComplex((1, 0, 0), (0, 0, 0), {0: frozenset({1})})
        first = pages(fc, 1)[0]
        assert first.table.nonzero() == {(0, 0): 1}
        assert first.differentials == ()

    def test_filtration_must_not_rise(self):
        with pytest.raises(FiltrationError):
            FilteredComplex((1, 0), (0, 1), {0: frozenset({1})})

    def test_boundary_degree_checked(self):
        with pytest.raises(ChainComplexError):
            FilteredComplex((1, 1), (1, 0), {0: frozenset({1})})


class TestBoxFiltration:
    """The ⊠ filtration of F ⊠ F over the strict ring."""

    def setup_method(self):
        alg = strict_ring_algebra(ring_r(2))
        f = catalogue("F", precision=2).module
        self.spectral = em_ss(strict_module(f, alg), strict_module(f, alg, side="left"), n_max=3, r_max=3)

    def test_second_page_is_tor(self):
        assert self.spectral.comparison is not None
        assert self.spectral.comparison.agree
        e2 = self.spectral.page(2)
        assert e2.get(0, 0) == 1
        assert e2.get(1, -1) == 1
        assert e2.get(1, -4) == 1

    def test_no_higher_differentials(self):
        assert self.spectral.page(2).differentials == ()

    def test_top_level_uncertified(self):
        assert not self.spectral.page(2).table.is_certified(3, -3)

    def test_missing_page(self):
        with pytest.raises(KeyError):
            self.spectral.page(9)


class TestBidegrees:
    """The two supported conventions for d_r."""

    def test_conventions(self):
        assert bidegree(2, "standard") == (-2, 1)
        assert bidegree(3, "standard") == (-3, 2)
        assert bidegree(2, "lagged") == (-3, 2)

    def test_unknown_convention(self):
        with pytest.raises(BidegreeMismatch):
            bidegree(2, "diagonal")

    def test_entry_with_wrong_step(self):
        entry = DifferentialEntry(source=(2, 0), target=(0, 0), rank=1)
        with pytest.raises(BidegreeMismatch):
            DifferentialPattern(r=2, convention="standard", entries=[entry]).check()


class TestHypothesizedPatterns:
    """Rank bookkeeping from the published self-sum table."""

    def setup_method(self):
        self.published = load_table(golden_dir() / "tor_2y_published.json")
        self.page = page_from_table(self.published, 2)

    def test_endgame_matches_rank_profile(self):
        pattern = load_pattern(golden_dir() / "pattern_2y.yml")
        assert pattern.convention == "standard"
        shown = run_patterns(page_from_table(self.published, pattern.start_page), pattern.patterns())
        assert [pg.r for pg in shown] == [2, 3, 4]
        totals = shown[-1].totals()
        assert {q: totals[q] for q in (3, 2, 1)} == {3: 2, 2: 1, 1: 1}
        report = e_infty_vs_target(shown, rank_profile("HS_hat_2Y"), degrees=[3, 2, 1])
        assert report.agree
        assert len(report.lines) == 3

    def test_missing_stages_are_zero(self):
        entry = DifferentialEntry(source=(3, -1), target=(0, 1), rank=1)
        shown = run_patterns(self.page, [DifferentialPattern(r=3, convention="standard", entries=[entry])])
        assert [pg.r for pg in shown] == [2, 3, 4]
        assert shown[1].table.nonzero() == self.published.nonzero()
        assert shown[2].get(0, 1) == 1

    def test_rank_exceeds_dimension(self):
        entry = DifferentialEntry(source=(2, 0), target=(0, 1), rank=3)
        with pytest.raises(InfeasiblePattern):
            apply_hypothesized(self.page, DifferentialPattern(r=2, convention="standard", entries=[entry]))

    def test_wrong_page(self):
        with pytest.raises(BidegreeMismatch):
            apply_hypothesized(self.page, DifferentialPattern(r=3, convention="standard"))

    def test_convention_fixed_by_page(self):
        page = page_from_table(self.published, 2, convention="standard")
        with pytest.raises(BidegreeMismatch):
            apply_hypothesized(page, DifferentialPattern(r=2, convention="lagged"))

    def test_pattern_files(self, tmp_path):
        with pytest.raises(BadInputError):
            load_pattern(tmp_path / "absent.yml")
        bad = tmp_path / "bad.yml"
        bad.write_text("stages:\n  - r: 0\n")
        with pytest.raises(StructureFormatError):
            load_pattern(bad)
        moved = tmp_path / "moved.yml"
        moved.write_text(
            "convention: lagged\nstages:\n  - r: 2\n    entries:\n"
            "      - {source: [2, 0], target: [0, 1], rank: 1}\n"
        )
        with pytest.raises(BidegreeMismatch):
            load_pattern(moved)


class TestMasseyDifferentials:
    """d₂ and d₃ of box words against Massey products."""

    def setup_method(self):
        self.bimodule = load_structure(STRUCTURES / "bridge_bimodule.json")
        self.left = load_structure(STRUCTURES / "bridge_left.json")
        self.box = box_tensor(self.bimodule, self.left, n_max=3)

    def test_d2_matches_triple_product(self):
        report = massey_differential_check(self.box, ["x", "r", "r", "y"])
        assert report.applicable
        assert report.agree
        assert report.computed == "[z|y]"
        assert report.formula == "[z|y]"

    def test_d4_is_not_wired(self):
        report = massey_differential_check(self.box, ["x", "r", "r", "y"], r=4)
        assert not report.applicable
        assert report.notes

    def test_d3_matches_fourfold_product(self):
        right = structure_from_dict(FOURFOLD_MODULE)
        left = structure_from_dict({**FOURFOLD_MODULE, "name": "y", "side": "left", "basis": [{"name": "y", "degree": 0}], "operations": []})
        box = box_tensor(right, left, n_max=3)
        report = massey_differential_check(box, ["x", "r", "r", "r", "y"], r=3)
        assert report.applicable
        assert report.agree
        assert report.computed == "[z|y]"
        assert report.formula == "[z|y]"

    def test_d3_needs_a_survivor(self):
        report = massey_differential_check(self.box, ["x", "r", "r", "y"], r=3)
        assert not report.applicable
    def test_word_outside_complex(self):
        with pytest.raises(BadInputError):
            massey_differential_check(self.box, ["x", "r", "r", "r", "r", "y"])

    def test_left_action_is_triple_product(self):
        report = module_action_check(self.bimodule, self.left, "r", ["x", "r", "y"], n_max=3)
        assert report.applicable
        assert report.agree
        assert report.computed == "[w|y]"

    def test_action_needs_a_letter(self):
        report = module_action_check(self.bimodule, self.left, "r", ["x", "y"], n_max=3)
        assert not report.applicable
