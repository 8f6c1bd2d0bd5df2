"""
Social choice functions that ignore duplicate ballots.

A rule maps a non-empty occupied set (bitmask) to a vertex. Algorithmic
rules evaluate directly; any rule can be materialized as a :class:`Table`
with one entry per non-empty subset.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from fnploc.errors import GraphTooLarge, NotATree, SpecError
from fnploc.graph import Graph, members, nonempty_subsets
from fnploc.prefs import DIPPED, PEAKED, Kind, pe_set

TABLE_CAP = 20


def _require_tree(g: Graph) -> None:
    if not g.is_tree():
        raise NotATree(f"{g.name} is not a tree")


@dataclass(frozen=True)
class SequentialPareto:
    order: tuple[int, ...]
    kind: Kind = PEAKED

    def select(self, g: Graph, occ: int) -> int:
        return sequential_pareto(g, self.order, self.kind, occ)

    def describe(self, g: Graph) -> str:
        return "seq_pareto " + "->".join(g.labels[v] for v in self.order)


@dataclass(frozen=True)
class TargetRule:
    target: int
    kind: Kind = field(default=PEAKED, init=False)

    def select(self, g: Graph, occ: int) -> int:
        return target_rule(g, self.target, occ)

    def describe(self, g: Graph) -> str:
        return f"target {g.labels[self.target]}"


@dataclass(frozen=True)
class LongestPathUnanimous:
    kind: Kind = field(default=DIPPED, init=False)

    def select(self, g: Graph, occ: int) -> int:
        return longest_path_unanimous(g, occ)

    def describe(self, g: Graph) -> str:
        a, b = longest_path_endpoints(g)
        return f"longest_path {g.labels[a]}..{g.labels[b]}"


@dataclass(frozen=True)
class Table:
    """Explicit rule: ``entries[mask]`` is the outcome for occupied set ``mask``.

    ``entries[0]`` is unused and holds -1.
    """

    entries: tuple[int, ...]
    kind: Kind = PEAKED

    def select(self, g: Graph, occ: int) -> int:
        return self.entries[occ]

    def describe(self, g: Graph) -> str:
        return f"table ({len(self.entries) - 1} entries)"


Rule = SequentialPareto | TargetRule | LongestPathUnanimous | Table


def sequential_pareto(g: Graph, order, kind: Kind, occ: int) -> int:
    """First vertex of ``order`` that is Pareto efficient for ``occ``."""
    pe = pe_set(g, occ, kind)
    for v in order:
        if pe >> v & 1:
            return v
    raise AssertionError("Pareto set is never empty")


def steiner_subtree(g: Graph, occ: int) -> int:
    """Vertices of the minimal subtree spanning ``occ`` (tree metrics only)."""
    occupied = members(occ)
    d = g.dist
    out = 0
    for u in range(g.n):
        for i, a in enumerate(occupied):
            if any(d[a][u] + d[u][b] == d[a][b] for b in occupied[i:]):
                out |= 1 << u
                break
    return out


def target_rule(g: Graph, target: int, occ: int) -> int:
    _require_tree(g)
    span = steiner_subtree(g, occ)
    row = g.dist[target]
    return min(members(span), key=lambda u: (row[u], u))


def _farthest(g: Graph, src: int) -> int:
    row = g.dist[src]
    best = max(row)
    return row.index(best)


def longest_path_endpoints(g: Graph) -> tuple[int, int]:
    """Endpoints of a longest path by double BFS, smaller id first."""
    x = _farthest(g, 0)
    y = _farthest(g, x)
    return min(x, y), max(x, y)


def longest_path_unanimous(g: Graph, occ: int) -> int:
    _require_tree(g)
    a, b = longest_path_endpoints(g)
    d = g.dist
    if any(d[v][a] > d[v][b] for v in members(occ)):
        return a
    return b


def as_table(g: Graph, rule: Rule, cap: int = TABLE_CAP) -> Table:
    if isinstance(rule, Table):
        if len(rule.entries) != 1 << g.n:
            raise SpecError(f"table has {len(rule.entries) - 1} entries, expected {(1 << g.n) - 1}")
        return rule
    if g.n > cap:
        raise GraphTooLarge(f"cannot materialize a table for {g.n} vertices (cap {cap})")
    entries = [-1] + [rule.select(g, s) for s in nonempty_subsets(g.n)]
    return Table(tuple(entries), rule.kind)


# Orders proven false-name-proof on small cycles, as 1-based labels.
PRESET_ORDERS = {
    "c3-peaked": (3, (1, 2, 3), PEAKED),
    "c3-dipped": (3, (1, 2, 3), DIPPED),
    "c4-peaked": (4, (1, 3, 2, 4), PEAKED),
    "c4-dipped": (4, (1, 3, 2, 4), DIPPED),
    "c5-peaked": (5, (1, 2, 5, 3, 4), PEAKED),
    "c5-dipped": (5, (1, 2, 5, 3, 4), DIPPED),
}


def preset(name: str) -> SequentialPareto:
    try:
        _, order, kind = PRESET_ORDERS[name]
    except KeyError:
        raise SpecError(f"unknown preset {name!r}; choose from {sorted(PRESET_ORDERS)}") from None
    return SequentialPareto(tuple(v - 1 for v in order), kind)


def preset_for(k: int, kind: Kind) -> SequentialPareto | None:
    name = f"c{k}-{kind.value}"
    return preset(name) if name in PRESET_ORDERS else None


def from_spec(spec: dict | str, g: Graph, kind: Kind | None = None) -> Rule:
    """Parse a rule spec.

    Accepts ``preset:<name>`` strings or JSON objects such as
    ``{"rule": "seq_pareto", "order": [0, 2, 1, 3], "kind": "peaked"}``.
    """
    if isinstance(spec, str):
        if spec.startswith("preset:"):
            r = preset(spec[len("preset:"):])
            if len(r.order) != g.n:
                raise SpecError(f"preset {spec} does not fit {g.name}")
            return r
        raise SpecError(f"unrecognized rule spec {spec!r}")
    if not isinstance(spec, dict) or "rule" not in spec:
        raise SpecError(f"rule spec must be an object with a 'rule': {spec!r}")
    name = spec["rule"]
    spec_kind = Kind.parse(spec["kind"]) if "kind" in spec else kind
    if name == "seq_pareto":
        order = tuple(int(v) for v in spec.get("order", range(g.n)))
        if sorted(order) != list(range(g.n)):
            raise SpecError(f"order {list(order)} is not a permutation of 0..{g.n - 1}")
        return SequentialPareto(order, spec_kind or PEAKED)
    if name == "target":
        _require_tree(g)
        t = int(spec["target"])
        if not 0 <= t < g.n:
            raise SpecError(f"target {t} out of range")
        return TargetRule(t)
    if name == "longest_path":
        _require_tree(g)
        return LongestPathUnanimous()
    if name == "table":
        entries = [-1] * (1 << g.n)
        for key, val in spec["entries"].items():
            mask = int(key, 0)
            if not 0 < mask < 1 << g.n or not 0 <= int(val) < g.n:
                raise SpecError(f"bad table entry {key}: {val}")
            entries[mask] = int(val)
        if -1 in entries[1:]:
            raise SpecError("table must define every non-empty occupied set")
        return Table(tuple(entries), spec_kind or PEAKED)
    raise SpecError(f"unknown rule {name!r}")


def table_to_json(g: Graph, table: Table) -> dict:
    return {
        "rule": "table",
        "kind": table.kind.value,
        "entries": {f"0b{s:0{g.n}b}": table.entries[s] for s in nonempty_subsets(g.n)},
    }
