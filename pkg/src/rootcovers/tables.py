"""Built-in reference tables and the machinery to re-run them.

Each table bundles an arrangement generator, a prime (or one per row), and
explicit partitions with their expected invariants.  `run_table` recomputes
every row from scratch and reports computed vs expected; the CLI `tables`
subcommand turns this into a PASS/FAIL listing with a nonzero exit status
on any mismatch.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .arrangements import Arrangement, gen_ceva, gen_underline_ceva, resolve
from .covers import CoverSpec, report, truncate_decimal
from .partitions import assign, solution_from_parts, system_for

__all__ = ["TABLE_NAMES", "TableRow", "TableRun", "load_table", "run_table"]

TABLE_NAMES = ("remark71a", "remark71b", "section10")

_GENERATORS = {
    "ceva": gen_ceva,
    "underline_ceva": gen_underline_ceva,
}


def load_table(name: str) -> dict:
    if name not in TABLE_NAMES:
        raise ValueError(f"unknown table {name!r}; choose from {TABLE_NAMES}")
    text = resources.files("rootcovers.data").joinpath(f"{name}.json").read_text()
    return json.loads(text)


def _build_arrangement(gen: dict) -> Arrangement:
    kind = gen["kind"]
    return _GENERATORS[kind](gen["m"])


@dataclass(frozen=True)
class TableRow:
    index: int
    p: int
    parts: tuple[tuple[int, ...], ...]
    expected: dict
    computed: dict
    ok: bool


@dataclass(frozen=True)
class TableRun:
    name: str
    title: str
    rows: tuple[TableRow, ...]

    @property
    def ok(self) -> bool:
        return all(row.ok for row in self.rows)


def run_table(name: str) -> TableRun:
    """Recompute one reference table row by row."""
    doc = load_table(name)
    arrangement = _build_arrangement(doc["generator"])
    resolved = resolve(arrangement)
    decimals = doc.get("decimals", 3)
    rows = []
    for index, row in enumerate(doc["rows"], start=1):
        p = row.get("p", doc.get("p"))
        parts = tuple(tuple(block) for block in row["parts"])
        sysd = system_for(arrangement, p)
        sol = solution_from_parts(sysd, parts)
        rep = report(CoverSpec(p, resolved, assign(resolved, sol)))
        expected = {}
        computed = {}
        if "c1_sq" in row:
            expected["c1_sq"] = row["c1_sq"]
            computed["c1_sq"] = rep.c1_sq
        if "c2" in row:
            expected["c2"] = row["c2"]
            computed["c2"] = rep.c2
        if "ratio_c" in row:
            expected["ratio_c"] = row["ratio_c"]
            computed["ratio_c"] = truncate_decimal(rep.ratio_c, decimals)
        if "ratio_chi" in row:
            expected["ratio_chi"] = row["ratio_chi"]
            computed["ratio_chi"] = truncate_decimal(rep.ratio_chi, decimals)
        if "ratio_c_exact" in row:
            expected["ratio_c_exact"] = row["ratio_c_exact"]
            computed["ratio_c_exact"] = (
                f"{rep.ratio_c.numerator}/{rep.ratio_c.denominator}"
            )
        ok = all(expected[k] == computed[k] for k in expected)
        rows.append(TableRow(index, p, parts, expected, computed, ok))
    return TableRun(name, doc.get("title", name), tuple(rows))
