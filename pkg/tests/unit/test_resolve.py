"""
Test Suite for Free Resolutions, Bar Complexes and Tor

Checks the two Tor paths against each other, against the periodic
resolution of M_2311, against the golden tables, and the PID cone check.
"""

import pytest

from src.config_parser import golden_dir
from src.exceptions import PrecisionMismatch, StructureFormatError
from src.resolve import (
    BigradedTable,
    bar_complex,
    cross_check,
    default_j_range,
    free_resolution,
    load_table,
    periodic_resolution_2311,
    tor,
    tor_from_resolution,
    tor_pid_cone_check,
)
from src.rmodule import catalogue, tensor_over_R


def tor_ff_formula(i_max: int, j_lo: int):
    """Tor_R(F, F): F at (0,0), then two classes per homological degree."""
    cells = {(0, 0): 1}
    for i in range(1, i_max + 1):
        n, odd = divmod(i, 2)
        js = (-1 - 3 * n, -4 - 3 * n) if odd else (-3 * n, -3 * n - 2)
        for j in js:
            if j > j_lo:
                cells[(i, j)] = 1
    return cells


class TestFreeResolution:
    """Minimal resolutions and the periodic resolution of M_2311."""

    def setup_method(self):
        self.m = catalogue("M_2311", precision=3).module

    def test_resolution_is_a_complex_and_exact(self):
        res = free_resolution(self.m, 4)
        assert res.check_squares() == []
        assert res.exactness_defects() == {}

    def test_periodic_resolution_matches_minimal_one(self):
        periodic = periodic_resolution_2311(4, precision=3)
        minimal = free_resolution(self.m, 4)
        assert periodic.check_squares() == []
        for k in range(5):
            assert sorted(minimal.generator_degrees(k), reverse=True) == sorted(
                periodic.generator_degrees(k), reverse=True
            )

    def test_periodic_and_minimal_tor_agree(self):
        f = catalogue("F", precision=3).module
        periodic = tor_from_resolution(periodic_resolution_2311(4, precision=3), f, 3, (-8, 0))
        minimal = tor_from_resolution(free_resolution(self.m, 4), f, 3, (-8, 0))
        assert periodic == minimal
        # Tor_0(M, F) is the indecomposables of M
        assert periodic[(0, 0)] == 1
        assert periodic[(0, -2)] == 1

    def test_kernel_of_augmentation(self):
        # ker ε is N_2311 shifted into the degrees of M's resolution
        res = free_resolution(self.m, 1)
        kernel = res.kernel_dims(0)
        n = catalogue("N_2311", precision=3).module
        for d in range(-7, 1):
            assert kernel.get(d, 0) == n.dim(d)


class TestTor:
    """Bigraded Tor by both paths."""

    def setup_method(self):
        self.f = catalogue("F", precision=3).module

    def test_tor_of_residue_field(self):
        table = tor(self.f, self.f, "resolution", i_max=4)
        assert table.j_range == (-12, 0)
        assert table.certified_nonzero() == tor_ff_formula(4, -12)

    def test_uncertified_rows(self):
        table = tor(self.f, self.f, "resolution", i_max=2)
        assert not table.is_certified(0, -12)
        assert table.is_certified(0, -11)

    def test_bar_path_agrees(self):
        by_resolution = tor(self.f, self.f, "resolution", i_max=3, j_range=(-6, 0))
        by_bar = tor(self.f, self.f, "bar", i_max=3, j_range=(-6, 0), bar_max_dim=None)
        report = cross_check(by_resolution, by_bar)
        assert report.agree
        assert report.compared > 0

    def test_bar_budget_marks_skipped_cells(self):
        table = tor(self.f, self.f, "bar", i_max=3, j_range=(-6, 0), bar_max_dim=1)
        assert table.skipped
        assert not table.is_certified(*next(iter(table.skipped)))

    def test_bar_complex_squares_to_zero(self):
        m = catalogue("M_2311", precision=2).module
        bar = bar_complex(m, catalogue("F", precision=2).module, 2, (-4, 0))
        assert bar.homology(0, 0) == 1

    def test_golden_residue_field_table(self):
        golden = load_table(golden_dir() / "tor_ff.json")
        f = catalogue("F", precision=6).module
        table = tor(f, f, "resolution", i_max=6)
        assert table.j_range == golden.j_range
        assert table.certified_nonzero() == golden.certified_nonzero()
        assert table.uncertified == golden.uncertified

    def test_m2311_by_both_paths(self):
        m = catalogue("M_2311", precision=2).module
        n = catalogue("N_2311", precision=2).module
        j_range = (-6, -1)
        report = cross_check(
            tor(m, n, "resolution", i_max=2, j_range=j_range),
            tor(m, n, "bar", i_max=2, j_range=j_range, bar_max_dim=None),
        )
        assert report.agree

    def test_precision_mismatch(self):
        with pytest.raises(PrecisionMismatch):
            tor(self.f, catalogue("F", precision=4).module)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            tor(self.f, self.f, "spectral")

    def test_default_range_respects_floors(self):
        hs = catalogue("HS2311", precision=6).module
        assert default_j_range(hs, hs) == (-23, 0)

    def test_cells_outside_ranges_are_not_certified(self):
        table = tor(self.f, self.f, "resolution", i_max=2)
        assert not table.is_certified(0, -17)
        assert not table.is_certified(3, -1)
        assert not table.is_certified(0, 1)

    def test_symmetric_in_its_arguments(self):
        names = ["F", "R", "M_2311", "N_2311"]
        for a in names:
            for b in names:
                m = catalogue(a, precision=3).module
                n = catalogue(b, precision=3).module
                left = tor(m, n, "resolution", i_max=3)
                right = tor(n, m, "resolution", i_max=3)
                assert left.certified_nonzero() == right.certified_nonzero(), (a, b)

    def test_stable_under_higher_precision(self):
        for a, b in [("F", "F"), ("M_2311", "N_2311"), ("N_2311<1>", "N_2311<1>")]:
            low = tor(catalogue(a, precision=3).module, catalogue(b, precision=3).module, "resolution", i_max=3)
            lo, hi = low.j_range
            high = tor(
                catalogue(a, precision=4).module, catalogue(b, precision=4).module,
                "resolution", i_max=3, j_range=(lo - 4, hi),
            )
            for i, j in low.cells():
                if low.is_certified(i, j):
                    assert high.get(i, j) == low.get(i, j), (a, b, i, j)


class TestSelfSumTable:
    """The published Tor table of the self-sum against the computed one."""

    def setup_method(self):
        hs = catalogue("HS2311", precision=6).module
        self.hs = hs
        self.computed = tor(hs, hs, "resolution", i_max=5, j_range=(-11, 0))
        self.published = load_table(golden_dir() / "tor_2y_published.json")

    def test_positive_columns_are_shifted_by_four(self):
        j_lo, j_hi = self.published.j_range
        for i in range(1, 6):
            shifted = {j + 4: n for j, n in self.computed.column(i).items() if j_lo <= j + 4 <= j_hi}
            assert shifted == self.published.column(i), i

    def test_column_zero_is_the_tensor_product(self):
        tensor = tensor_over_R(self.hs, self.hs)
        expected = {d: n for d, n in tensor.dims_map().items() if d >= -11}
        assert self.computed.column(0) == expected

    def test_positive_columns_follow_residue_field(self):
        # Tor_i(m, m) = Tor_{i+2}(F, F) for i ≥ 1, and the shift by one moves j by 2
        ff = tor_ff_formula(7, -24)
        for (i, j), n in self.computed.certified_nonzero().items():
            if i >= 1:
                assert ff.get((i + 2, j - 2)) == n


class TestTables:
    """Table documents and cross-checking."""

    def test_document_round_trip_keeps_flags(self):
        table = BigradedTable({(0, 0): 1, (1, -1): 2}, (0, 1), (-2, 0), "x", frozenset({(1, -2)}))
        again = BigradedTable.from_document(table.to_document())
        assert again.nonzero() == table.nonzero()
        assert again.uncertified == table.uncertified

    def test_totals(self):
        table = BigradedTable({(0, 0): 1, (1, -1): 2, (2, -3): 1}, (0, 2), (-3, 0), "x")
        assert table.totals() == {0: 3, -1: 1}

    def test_shifted(self):
        table = BigradedTable({(1, -1): 1}, (0, 1), (-2, 0), "x").shifted(4)
        assert table.column(1) == {3: 1}
        assert table.j_range == (2, 4)

    def test_cross_check_reports_mismatch(self):
        a = BigradedTable({(0, 0): 1}, (0, 0), (0, 0), "a")
        b = BigradedTable({(0, 0): 2}, (0, 0), (0, 0), "b")
        report = cross_check(a, b)
        assert not report.agree
        assert report.mismatches == [(0, 0, 1, 2)]

    def test_malformed_document(self):
        with pytest.raises(StructureFormatError):
            BigradedTable.from_document({"entries": [[0, 0]]})


class TestPidCone:
    """Modules over F[[U]]: mapping cone against Tor."""

    def test_hm2311_self_tensor(self):
        hm = catalogue("HM2311", precision=6).module
        report = tor_pid_cone_check(hm, hm)
        assert report.lines
        assert report.passed
        assert report.shift == 1
