"""Reproduction of the existence/impossibility table over a fixed instance list."""

from __future__ import annotations

import io
import json
import time
from dataclasses import dataclass, field

from fnploc import graph as gr
from fnploc import rules
from fnploc.graph import Graph
from fnploc.prefs import DIPPED, PEAKED, Kind
from fnploc.prove import DEFAULT_TIMEOUT, Status, prove_existence, prove_via_embedding
from fnploc.verify import verify

KINDS = (PEAKED, DIPPED)


@dataclass
class Cell:
    graph: Graph
    kind: Kind
    expected: str  # "sat", "unsat" or "open"
    rule: rules.Rule | None = None

    @property
    def name(self) -> str:
        return f"{self.graph.name}-{self.kind.value}"


@dataclass
class CellResult:
    cell: Cell
    status: str
    search: str
    nodes: int
    seconds: float
    rule_verdict: dict | None = None
    reduction: dict | None = None
    witness: dict | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def match(self) -> str:
        if self.cell.expected == "open":
            return "new"
        return "yes" if self.status == self.cell.expected else "NO"

    def certificate(self) -> str:
        parts = []
        if self.rule_verdict is not None:
            ok = self.rule_verdict["pe"] == "holds" and self.rule_verdict["fnp"] == "holds"
            parts.append(f"{self.rule_verdict['rule']} ({'fnp+pe' if ok else 'fails'})")
        if self.reduction is not None:
            parts.append(f"embeds {self.reduction['pattern']}")
        if self.witness is not None and self.rule_verdict is None:
            parts.append(f"table ({len(self.witness['entries'])} entries)")
        return "; ".join(parts) if parts else "-"

    def to_json(self, timing: bool = True) -> dict:
        out = {
            "cell": self.cell.name,
            "graph": gr.to_spec(self.cell.graph),
            "kind": self.cell.kind.value,
            "expected": self.cell.expected,
            "status": self.status,
            "search": self.search,
            "match": self.match,
            "nodes": self.nodes,
        }
        if self.rule_verdict is not None:
            out["rule"] = self.rule_verdict
        if self.reduction is not None:
            out["embedding"] = self.reduction
        if self.witness is not None:
            out["witness_table"] = self.witness
        if timing:
            out["seconds"] = round(self.seconds, 3)
        return out


def _expected_cycle(k: int) -> str:
    return "sat" if k <= 5 else "unsat"


def _expected_grid(dims, kind: Kind) -> str:
    if kind is DIPPED:
        # the 2x2 grid is C4, which is settled
        return "sat" if list(dims) == [2, 2] else "open"
    ladder = len(dims) == 2 and min(dims) == 2
    return "sat" if ladder else "unsat"


def default_cells() -> list[Cell]:
    cells = []
    for k in range(3, 8):
        for kind in KINDS:
            cells.append(Cell(gr.cycle(k), kind, _expected_cycle(k), rules.preset_for(k, kind)))
    for kind in KINDS:
        for dims in ([2, 2], [2, 3], [2, 4], [3, 3], [2, 2, 2]):
            cells.append(Cell(gr.hypergrid(dims), kind, _expected_grid(dims, kind)))
    for t in (gr.path(5), gr.path(6), gr.star(5), gr.caterpillar_tree()):
        cells.append(Cell(t, PEAKED, "sat", rules.TargetRule(0)))
        cells.append(Cell(t, DIPPED, "sat", rules.LongestPathUnanimous()))
    return cells


def run_cell(cell: Cell, timeout: float = DEFAULT_TIMEOUT, jobs: int = 1) -> CellResult:
    g, kind = cell.graph, cell.kind
    start = time.monotonic()
    res = prove_existence(g, kind, timeout=timeout, jobs=jobs)
    out = CellResult(cell, res.status.value, res.status.value, res.stats.nodes, 0.0)
    if res.table is not None:
        out.witness = rules.table_to_json(g, res.table)
    sat_votes, unsat_votes = res.status is Status.SAT, res.status is Status.UNSAT

    if cell.rule is not None:
        v = verify(g, cell.rule, kind)
        out.rule_verdict = {"rule": cell.rule.describe(g), **v.to_json(g)}
        if v.pe_holds and v.fnp_holds:
            sat_votes = True

    if kind is PEAKED and not g.is_tree():
        red = prove_via_embedding(g, kind)
        if red is not None:
            out.reduction = red.to_json()
            unsat_votes = True

    if sat_votes and unsat_votes:
        out.status = "conflict"
        out.notes.append("search/rule and embedding reduction disagree")
    elif sat_votes:
        out.status = "sat"
    elif unsat_votes:
        out.status = "unsat"
    else:
        out.status = "timeout"
    out.seconds = time.monotonic() - start
    return out


def reproduce_table(
    timeout: float = DEFAULT_TIMEOUT,
    jobs: int = 1,
    only: list[str] | None = None,
) -> list[CellResult]:
    cells = default_cells()
    if only:
        wanted = set(only)
        unknown = wanted - {c.name for c in cells}
        if unknown:
            raise ValueError(f"unknown cells: {sorted(unknown)}")
        cells = [c for c in cells if c.name in wanted]
    return [run_cell(c, timeout, jobs) for c in cells]


COLUMNS = ["cell", "expected", "computed", "match", "certificate", "nodes", "seconds"]


def _row(r: CellResult, timing: bool) -> list[str]:
    row = [r.cell.name, r.cell.expected, r.status, r.match, r.certificate(), str(r.nodes)]
    if timing:
        row.append(f"{r.seconds:.3f}")
    return row


def render(results: list[CellResult], fmt: str = "md", timing: bool = True) -> str:
    cols = COLUMNS if timing else COLUMNS[:-1]
    if fmt == "json":
        return json.dumps([r.to_json(timing) for r in results], indent=2, sort_keys=True)
    buf = io.StringIO()
    if fmt == "tsv":
        buf.write("\t".join(cols) + "\n")
        for r in results:
            buf.write("\t".join(_row(r, timing)) + "\n")
        return buf.getvalue()
    buf.write("| " + " | ".join(cols) + " |\n")
    buf.write("|" + "|".join("---" for _ in cols) + "|\n")
    for r in results:
        buf.write("| " + " | ".join(_row(r, timing)) + " |\n")
    new = [r.cell.name for r in results if r.match == "new"]
    if new:
        buf.write("\nCells marked `new` have no published answer; their status comes from exhaustive search alone.\n")
    return buf.getvalue()
