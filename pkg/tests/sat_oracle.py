"""Independent CNF encoding of the existence question, solved with PySAT."""

from fnploc.graph import Graph, members, nonempty_subsets, supersets
from fnploc.prefs import Kind, pe_set, utility


def sat_exists(g: Graph, kind: Kind) -> bool:
    from pysat.solvers import Cadical153

    var = {}
    clauses = []
    for s in nonempty_subsets(g.n):
        lits = []
        for w in members(pe_set(g, s, kind)):
            var[s, w] = len(var) + 1
            lits.append(var[s, w])
        clauses.append(lits)
        for i, a in enumerate(lits):
            for b in lits[i + 1:]:
                clauses.append([-a, -b])
    for s in nonempty_subsets(g.n):
        for v in members(s):
            for s2 in supersets(s & ~(1 << v), g.full):
                for x in members(pe_set(g, s, kind)):
                    for y in members(pe_set(g, s2, kind)):
                        if utility(kind, g, v, y) > utility(kind, g, v, x):
                            clauses.append([-var[s, x], -var[s2, y]])
    with Cadical153(bootstrap_with=clauses) as solver:
        return solver.solve()
