"""
Test Suite for Table and Page Renderings
"""

import json

from src.resolve import BigradedTable
from src.ssq import DifferentialEntry, Page
from src.utils.rendering import cell_text, render_page, render_table


class TestRendering:
    """Grid, CSV and JSON output of bigraded tables."""

    def setup_method(self):
        self.table = BigradedTable({(0, 0): 1, (1, -1): 2}, (0, 1), (-1, 0), "x", frozenset({(1, 0)}))

    def test_cells(self):
        assert cell_text(0) == "·"
        assert cell_text(1) == "F"
        assert cell_text(3) == "F^3"

    def test_grid(self):
        lines = render_table(self.table, "grid", "T").splitlines()
        assert lines[0] == "T"
        assert lines[2].split("|")[1].split() == ["F", "·?"]
        assert lines[3].split("|")[1].split() == ["·", "F^2"]

    def test_csv(self):
        rows = render_table(self.table, "csv").splitlines()
        assert rows == ["i,j,dim,certified", "0,0,1,1", "1,-1,2,1"]

    def test_page_json(self):
        entry = DifferentialEntry(source=(1, -1), target=(0, 0), rank=1)
        page = Page(1, self.table, (entry,), "computed", "standard")
        doc = json.loads(render_page(page, "json"))
        assert doc["r"] == 1
        assert doc["differentials"][0]["rank"] == 1

    def test_page_grid_lists_arrows(self):
        entry = DifferentialEntry(source=(1, -1), target=(0, 0), rank=1)
        text = render_page(Page(1, self.table, (entry,)), "grid")
        assert text.splitlines()[0] == "E1 (computed)"
        assert text.splitlines()[-1] == "(1,-1) -1-> (0,0): 1"
