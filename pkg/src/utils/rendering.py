"""
Text renderings of bigraded tables and spectral-sequence pages.

Grids put the internal degree on rows (decreasing downward) and the
homological degree on columns (increasing rightward). Zero cells print as
"·"; uncertified cells carry a "?" suffix.
"""

import csv
import io
import json
from typing import Iterable, List, Optional

from ..resolve import BigradedTable


def cell_text(n: int) -> str:
    if n == 0:
        return "·"
    return "F" if n == 1 else f"F^{n}"


def render_grid(table: BigradedTable, title: Optional[str] = None) -> str:
    i_lo, i_hi = table.i_range
    j_lo, j_hi = table.j_range
    columns = list(range(i_lo, i_hi + 1))
    rows = []
    for j in range(j_hi, j_lo - 1, -1):
        cells = []
        for i in columns:
            text = cell_text(table.get(i, j))
            if not table.is_certified(i, j):
                text += "?"
            cells.append(text)
        rows.append((str(j), cells))

    label_width = max([len(r[0]) for r in rows] + [1])
    width = max([len(c) for _, cells in rows for c in cells] + [len(str(i)) for i in columns] + [1])
    lines: List[str] = []
    if title:
        lines.append(title)
    lines.append(" " * (label_width + 3) + " ".join(str(i).rjust(width) for i in columns))
    for label, cells in rows:
        lines.append(f"{label.rjust(label_width)} | " + " ".join(c.rjust(width) for c in cells))
    return "\n".join(lines)


def render_csv(table: BigradedTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["i", "j", "dim", "certified"])
    for (i, j), n in sorted(table.nonzero().items()):
        writer.writerow([i, j, n, int(table.is_certified(i, j))])
    return buf.getvalue()


def render_json(table: BigradedTable) -> str:
    return json.dumps(table.to_document(), sort_keys=True)


def render_table(table: BigradedTable, fmt: str = "grid", title: Optional[str] = None) -> str:
    if fmt == "grid":
        return render_grid(table, title)
    if fmt == "csv":
        return render_csv(table)
    if fmt == "json":
        return render_json(table)
    raise ValueError(f"unknown output format {fmt!r}")


def render_arrows(r: int, entries: Iterable) -> List[str]:
    """Differentials as "(p,q) -r-> (p',q'): rank"."""
    return [
        f"({e.source[0]},{e.source[1]}) -{r}-> ({e.target[0]},{e.target[1]}): {e.rank}"
        for e in sorted(entries, key=lambda e: (e.source, e.target))
    ]


def render_page(page, fmt: str = "grid") -> str:
    if fmt == "json":
        doc = page.table.to_document()
        doc["r"] = page.r
        doc["provenance"] = page.provenance
        doc["convention"] = page.convention
        doc["differentials"] = [e.model_dump() for e in page.differentials]
        return json.dumps(doc, sort_keys=True)
    body = render_table(page.table, fmt, f"E{page.r} ({page.provenance})" if fmt == "grid" else None)
    arrows = render_arrows(page.r, page.differentials)
    if fmt == "grid" and arrows:
        body += "\n" + "\n".join(arrows)
    return body
