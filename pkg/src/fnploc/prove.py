"""
Exhaustive search for Pareto-efficient, false-name-proof rule tables.

One CSP variable per non-empty occupied set ``S`` with domain ``PE(S)``.
For every ``v`` in ``S`` and every ``S'`` containing ``S - {v}`` the agent at
``v`` must not strictly prefer ``f(S')`` to ``f(S)``. These binary
constraints are generated on demand per variable. The solver does
backtracking with forward checking, propagates singleton domains eagerly,
and branches on the smallest domain first.
"""

from __future__ import annotations

import enum
import multiprocessing
import time
from dataclasses import dataclass, field

from fnploc import graph as gr
from fnploc.errors import GraphTooLarge
from fnploc.graph import Embedding, Graph, members, nonempty_subsets
from fnploc.prefs import PEAKED, Kind, pe_set, utility
from fnploc.rules import Table

PROVER_CAP = 12
ENUMERATE_CAP = 5
DEFAULT_TIMEOUT = 300.0


class Status(enum.Enum):
    SAT = "sat"
    UNSAT = "unsat"
    TIMEOUT = "timeout"


@dataclass
class Stats:
    nodes: int = 0
    propagations: int = 0
    seconds: float = 0.0

    def merge(self, other: "Stats") -> None:
        self.nodes += other.nodes
        self.propagations += other.propagations


@dataclass
class ProverResult:
    status: Status
    table: Table | None = None
    stats: Stats = field(default_factory=Stats)
    solutions: list[Table] | None = None

    @property
    def sat(self) -> bool:
        return self.status is Status.SAT


class _Timeout(Exception):
    pass


def _popcount(x: int) -> int:
    return bin(x).count("1")


class Solver:
    """Backtracking search over one graph and preference kind.

    ``fixed`` maps occupied-set masks to forced outcomes. ``reverse_vars``
    and ``reverse_values`` flip the tie-breaking orders; the outcome status
    never depends on them.
    """

    def __init__(
        self,
        g: Graph,
        kind: Kind,
        deadline: float | None = None,
        fixed: dict[int, int] | None = None,
        reverse_vars: bool = False,
        reverse_values: bool = False,
    ):
        self.g = g
        self.kind = kind
        self.deadline = deadline
        self.reverse_vars = reverse_vars
        self.reverse_values = reverse_values
        self.stats = Stats()
        n = g.n
        self.full = g.full
        util = [[utility(kind, g, v, w) for w in range(n)] for v in range(n)]
        # not_better[v][x]: outcomes the agent at v does not strictly prefer to x
        self.not_better = [[gr.mask_of(w for w in range(n) if util[v][w] <= util[v][x]) for x in range(n)] for v in range(n)]
        # not_worse[v][y]: outcomes the agent at v weakly prefers to y
        self.not_worse = [[gr.mask_of(w for w in range(n) if util[v][w] >= util[v][y]) for y in range(n)] for v in range(n)]
        self.dom = [0] * (1 << n)
        for s in nonempty_subsets(n):
            self.dom[s] = pe_set(g, s, kind)
        self.fixed = dict(fixed or {})
        for s, x in self.fixed.items():
            self.dom[s] &= 1 << x
        self.assigned = [False] * (1 << n)
        self.assigned[0] = True
        self.trail: list[tuple[int, int]] = []
        self.assign_trail: list[int] = []
        self._arcs: dict[int, list[tuple[int, list[int]]]] = {}
        var_order = list(nonempty_subsets(n))
        # largest sets first: they constrain the most neighbours
        var_order.sort(key=lambda s: (-_popcount(s), s))
        if reverse_vars:
            var_order.reverse()
        self.var_order = var_order

    def arcs(self, s: int) -> list[tuple[int, list[int]]]:
        """Neighbours of ``s`` with the mask table that filters them.

        Each entry is ``(other, table)`` meaning ``dom[other] &= table[f(s)]``.
        """
        cached = self._arcs.get(s)
        if cached is not None:
            return cached
        out = []
        full = self.full
        for v in members(s):
            # s is the truthful set, other is reachable from it
            for s2 in gr.supersets(s & ~(1 << v), full):
                if s2 != s:
                    out.append((s2, self.not_better[v]))
        for v in range(self.g.n):
            # s is reachable from other = T | {v}, T a subset of s
            base = 1 << v
            sub = s
            while True:
                other = sub | base
                if other != s:
                    out.append((other, self.not_worse[v]))
                if sub == 0:
                    break
                sub = (sub - 1) & s
        self._arcs[s] = out
        return out

    # trail-based state

    def _narrow(self, s: int, mask: int) -> bool:
        old = self.dom[s]
        new = old & mask
        if new == old:
            return True
        self.trail.append((s, old))
        self.dom[s] = new
        return new != 0

    def _assign(self, s: int, x: int) -> bool:
        """Fix ``f(s) = x`` and propagate; ``False`` on a wipe-out."""
        if not self._narrow(s, 1 << x):
            return False
        queue = [s]
        while queue:
            t = queue.pop()
            if self.assigned[t]:
                continue
            self.assigned[t] = True
            self.assign_trail.append(t)
            val = self.dom[t].bit_length() - 1
            self.stats.propagations += 1
            for other, table in self.arcs(t):
                if not self._narrow(other, table[val]):
                    return False
                d = self.dom[other]
                if not self.assigned[other] and d & (d - 1) == 0:
                    queue.append(other)
        return True

    def _mark(self) -> tuple[int, int]:
        return len(self.trail), len(self.assign_trail)

    def _undo(self, mark: tuple[int, int]) -> None:
        t, a = mark
        trail, dom = self.trail, self.dom
        while len(trail) > t:
            s, old = trail.pop()
            dom[s] = old
        at = self.assign_trail
        while len(at) > a:
            self.assigned[at.pop()] = False

    def initial_propagation(self) -> bool:
        for s in self.var_order:
            d = self.dom[s]
            if d == 0:
                return False
            if not self.assigned[s] and d & (d - 1) == 0:
                if not self._assign(s, d.bit_length() - 1):
                    return False
        return True

    def _pick(self) -> int | None:
        best, best_size = None, None
        dom, assigned = self.dom, self.assigned
        for s in self.var_order:
            if assigned[s]:
                continue
            size = _popcount(dom[s])
            if best_size is None or size < best_size:
                best, best_size = s, size
                if size <= 2:
                    break
        return best

    def _values(self, s: int) -> list[int]:
        vals = members(self.dom[s])
        return vals[::-1] if self.reverse_values else vals

    def _check_time(self) -> None:
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise _Timeout

    def solutions(self):
        """Yield complete tables reachable from the current state."""
        self.stats.nodes += 1
        self._check_time()
        s = self._pick()
        if s is None:
            entries = [-1] + [self.dom[t].bit_length() - 1 for t in nonempty_subsets(self.g.n)]
            yield Table(tuple(entries), self.kind)
            return
        for x in self._values(s):
            mark = self._mark()
            if self._assign(s, x):
                yield from self.solutions()
            self._undo(mark)

    def try_root(self, s: int, x: int) -> Table | None:
        self.stats.nodes += 1
        self._check_time()
        mark = self._mark()
        try:
            if self._assign(s, x):
                return next(self.solutions(), None)
            return None
        finally:
            self._undo(mark)


def root_branches(g: Graph, kind: Kind, symmetry: bool = True) -> list[int]:
    """Candidate values for ``f(V)``, one per automorphism orbit when ``symmetry``."""
    cands = members(pe_set(g, g.full, kind))
    if not symmetry:
        return cands
    autos = gr.automorphisms(g)
    reps, seen = [], set()
    for x in cands:
        if x in seen:
            continue
        reps.append(x)
        seen.update(a[x] for a in autos)
    return reps


def _run_branch(args) -> tuple[str, tuple | None, int, int, int]:
    spec, kind_value, x, remaining, reverse_vars, reverse_values = args
    g = gr.from_spec(spec)
    kind = Kind(kind_value)
    deadline = None if remaining is None else time.monotonic() + remaining
    solver = Solver(g, kind, deadline, reverse_vars=reverse_vars, reverse_values=reverse_values)
    ok = solver.initial_propagation()
    # every worker repeats this step; the parent counts it once
    init = solver.stats.propagations
    solver.stats.propagations = 0
    if not ok:
        return "unsat", None, 0, 0, init
    try:
        table = solver.try_root(g.full, x)
    except _Timeout:
        return "timeout", None, solver.stats.nodes, solver.stats.propagations, init
    if table is None:
        return "unsat", None, solver.stats.nodes, solver.stats.propagations, init
    return "sat", table.entries, solver.stats.nodes, solver.stats.propagations, init


def prove_existence(
    g: Graph,
    kind: Kind,
    timeout: float | None = DEFAULT_TIMEOUT,
    jobs: int = 1,
    fixed: dict[int, int] | None = None,
    symmetry: bool = True,
    reverse_vars: bool = False,
    reverse_values: bool = False,
    check: bool = True,
) -> ProverResult:
    """Decide whether an FNP and PE rule exists on ``g``.

    The root branches over ``f(V)``; with ``symmetry`` only one value per
    automorphism orbit is tried. ``fixed`` pins outcomes for chosen sets and
    disables the symmetry reduction. ``jobs > 1`` spreads root branches over
    worker processes; the first satisfiable branch in branch order supplies
    the witness, so the result does not depend on scheduling. Witnesses are
    re-verified before returning unless ``check`` is false.
    """
    if g.n > PROVER_CAP:
        raise GraphTooLarge(f"prover limited to {PROVER_CAP} vertices, got {g.n}")
    start = time.monotonic()
    deadline = None if timeout is None else start + timeout
    stats = Stats()

    if fixed or jobs <= 1:
        solver = Solver(g, kind, deadline, fixed, reverse_vars, reverse_values)
        status, table = Status.UNSAT, None
        try:
            if solver.initial_propagation():
                if fixed:
                    table = next(solver.solutions(), None)
                else:
                    branches = root_branches(g, kind, symmetry)
                    if reverse_values:
                        branches.reverse()
                    for x in branches:
                        table = solver.try_root(g.full, x)
                        if table is not None:
                            break
            if table is not None:
                status = Status.SAT
        except _Timeout:
            status = Status.TIMEOUT
        stats.merge(solver.stats)
    else:
        branches = root_branches(g, kind, symmetry)
        if reverse_values:
            branches.reverse()
        args = [
            (gr.to_spec(g), kind.value, x, timeout, reverse_vars, reverse_values)
            for x in branches
        ]
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(min(jobs, len(args))) as pool:
            results = pool.map(_run_branch, args)
        stats.propagations = results[0][4]
        status, table = Status.UNSAT, None
        # account as the sequential loop would: stop at the first Sat branch
        for st, entries, nodes, props, _ in results:
            stats.nodes += nodes
            stats.propagations += props
            if st == "sat":
                status, table = Status.SAT, Table(entries, kind)
                break
            if st == "timeout":
                status = Status.TIMEOUT
                break
    if table is not None and check:
        _check_witness(g, kind, table)
    stats.seconds = time.monotonic() - start
    return ProverResult(status, table, stats)


def _check_witness(g: Graph, kind: Kind, table: Table) -> None:
    from fnploc.verify import verify_fnp_idb, verify_pe

    if verify_pe(g, table, kind) is not None or verify_fnp_idb(g, table, kind) is not None:
        raise AssertionError(f"solver produced an invalid witness on {g.name}")


def enumerate_witnesses(g: Graph, kind: Kind, limit: int | None = None, timeout: float | None = DEFAULT_TIMEOUT) -> ProverResult:
    """All FNP and PE tables (up to ``limit``), for graphs of at most five vertices."""
    if g.n > ENUMERATE_CAP:
        raise GraphTooLarge(f"enumeration limited to {ENUMERATE_CAP} vertices, got {g.n}")
    start = time.monotonic()
    solver = Solver(g, kind, None if timeout is None else start + timeout)
    found: list[Table] = []
    status = Status.UNSAT
    try:
        if solver.initial_propagation():
            for t in solver.solutions():
                found.append(t)
                if limit is not None and len(found) >= limit:
                    break
    except _Timeout:
        status = Status.TIMEOUT
    if found:
        status = Status.SAT
    solver.stats.seconds = time.monotonic() - start
    return ProverResult(status, found[0] if found else None, solver.stats, found)


# Reduction through distance-preserving subgraphs


def unsat_library() -> list[Graph]:
    return [gr.cycle(k) for k in range(6, 10)] + [gr.hypergrid([3, 3])]


@dataclass(frozen=True)
class Reduction:
    """``pattern`` (no FNP+PE rule) sits inside the host as ``embedding``."""

    pattern: Graph
    embedding: Embedding

    def to_json(self) -> dict:
        return {"pattern": self.pattern.name, "map": self.embedding.describe()}


def prove_via_embedding(host: Graph, kind: Kind = PEAKED) -> Reduction | None:
    """Impossibility by embedding a known-impossible pattern; ``None`` if inconclusive.

    Only single-peaked preferences transfer along such embeddings.
    """
    if kind is not PEAKED:
        raise ValueError("embedding reduction only applies to single-peaked preferences")
    for pattern in unsat_library():
        if pattern.n > host.n:
            continue
        emb = gr.find_dp_embedding(pattern, host)
        if emb is not None:
            return Reduction(pattern, emb)
    return None
