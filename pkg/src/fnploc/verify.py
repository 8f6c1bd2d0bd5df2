"""
Pareto efficiency and false-name-proofness checks with certificates.

Two independent routes decide false-name-proofness:

* :func:`verify_fnp_idb` quantifies over occupied sets. An agent at ``v``
  in ``S`` can reach exactly the sets ``S'`` containing ``S - {v}`` by
  misreporting and adding identities.
* :func:`verify_fnp_bruteforce` enumerates explicit multiset profiles,
  misreports and fake-identity multisets within small bounds.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from fnploc.errors import BoundsTooLarge, GraphTooLarge
from fnploc.graph import Graph, mask_of, members, nonempty_subsets, supersets
from fnploc.prefs import Cmp, Kind, compare, pareto_dominates, pe_set, utility
from fnploc.rules import TABLE_CAP, Rule, Table, as_table

BRUTE_MAX_N = 7


@dataclass(frozen=True)
class PeViolation:
    occ: int
    outcome: int
    dominator: int

    def check(self, g: Graph, kind: Kind) -> bool:
        return pareto_dominates(g, self.occ, kind, self.dominator, self.outcome)

    def to_json(self, g: Graph) -> dict:
        return {
            "occ": g.format_set(self.occ),
            "outcome": g.labels[self.outcome],
            "dominator": g.labels[self.dominator],
        }


@dataclass(frozen=True)
class Counterexample:
    """The agent at ``manipulator`` turns ``before`` into ``after`` and gains."""

    before: int
    manipulator: int
    after: int
    outcome_before: int
    outcome_after: int
    cost_before: int
    cost_after: int

    @property
    def gain(self) -> int:
        """Improvement in hops; positive means the manipulator is better off."""
        return abs(self.cost_after - self.cost_before)

    @property
    def added(self) -> int:
        return self.after & ~self.before

    @property
    def size(self) -> int:
        return bin(self.before ^ self.after).count("1")

    def check(self, g: Graph, table: Table, kind: Kind) -> bool:
        v = self.manipulator
        rest = self.before & ~(1 << v)
        return (
            self.before >> v & 1 == 1
            and self.after != 0
            and self.after & rest == rest
            and table.entries[self.before] == self.outcome_before
            and table.entries[self.after] == self.outcome_after
            and compare(kind, g, v, self.outcome_after, self.outcome_before) is Cmp.BETTER
        )

    def to_json(self, g: Graph) -> dict:
        return {
            "before": g.format_set(self.before),
            "manipulator": g.labels[self.manipulator],
            "after": g.format_set(self.after),
            "outcome_before": g.labels[self.outcome_before],
            "outcome_after": g.labels[self.outcome_after],
            "cost": [self.cost_before, self.cost_after],
            "gain": self.gain,
        }


@dataclass(frozen=True)
class Manipulation:
    """An explicit multiset manipulation found by the brute-force route."""

    profile: tuple[int, ...]
    agent: int
    misreport: int
    fakes: tuple[int, ...]
    outcome_before: int
    outcome_after: int

    def reported(self) -> tuple[int, ...]:
        rest = self.profile[: self.agent] + self.profile[self.agent + 1:]
        return tuple(sorted(rest + (self.misreport,) + self.fakes))

    def to_json(self, g: Graph) -> dict:
        lab = g.labels
        return {
            "profile": [lab[v] for v in self.profile],
            "agent_at": lab[self.profile[self.agent]],
            "misreport": lab[self.misreport],
            "fakes": [lab[v] for v in self.fakes],
            "outcome_before": lab[self.outcome_before],
            "outcome_after": lab[self.outcome_after],
        }


@dataclass(frozen=True)
class Verdict:
    pe: PeViolation | None
    fnp: Counterexample | Manipulation | None
    pe_checked: bool = True

    @property
    def pe_holds(self) -> bool:
        return self.pe is None

    @property
    def fnp_holds(self) -> bool:
        return self.fnp is None

    def to_json(self, g: Graph) -> dict:
        out = {}
        if self.pe_checked:
            out["pe"] = "holds" if self.pe is None else self.pe.to_json(g)
        out["fnp"] = "holds" if self.fnp is None else self.fnp.to_json(g)
        return out


def _table(g: Graph, rule: Rule) -> Table:
    if g.n > TABLE_CAP:
        raise GraphTooLarge(f"{g.n} vertices exceeds the verification cap of {TABLE_CAP}")
    return as_table(g, rule)


def verify_pe(g: Graph, rule: Rule, kind: Kind) -> PeViolation | None:
    """``None`` when every outcome is Pareto efficient, else the first witness."""
    table = _table(g, rule)
    for s in nonempty_subsets(g.n):
        out = table.entries[s]
        pe = pe_set(g, s, kind)
        if not pe >> out & 1:
            for w in range(g.n):
                if pareto_dominates(g, s, kind, w, out):
                    return PeViolation(s, out, w)
    return None


def iter_fnp_violations(g: Graph, rule: Rule, kind: Kind):
    """Yield every profitable set-level manipulation ``(S, v, S')``."""
    table = _table(g, rule)
    entries = table.entries
    full = g.full
    util = [[utility(kind, g, v, w) for w in range(g.n)] for v in range(g.n)]
    for s in nonempty_subsets(g.n):
        out = entries[s]
        for v in members(s):
            uv = util[v]
            here = uv[out]
            for s2 in supersets(s & ~(1 << v), full):
                there = uv[entries[s2]]
                if there > here:
                    yield Counterexample(
                        before=s,
                        manipulator=v,
                        after=s2,
                        outcome_before=out,
                        outcome_after=entries[s2],
                        cost_before=g.dist[v][out],
                        cost_after=g.dist[v][entries[s2]],
                    )


def verify_fnp_idb(g: Graph, rule: Rule, kind: Kind) -> Counterexample | None:
    """``None`` when false-name-proof, else a counterexample of minimal size.

    Size is ``|S xor S'|``; ties go to the smallest ``S`` in bitmask order,
    then the manipulator id, then ``S'``.
    """
    best = None
    best_key = None
    for cx in iter_fnp_violations(g, rule, kind):
        key = (cx.size, cx.before, cx.manipulator, cx.after)
        if best_key is None or key < best_key:
            best, best_key = cx, key
    return best


def verify(g: Graph, rule: Rule, kind: Kind) -> Verdict:
    return Verdict(pe=verify_pe(g, rule, kind), fnp=verify_fnp_idb(g, rule, kind))


def _reports(n: int, agents: int, max_fakes: int):
    # misreport + fake multiset, per agent position
    for f in range(max_fakes + 1):
        for fakes in itertools.combinations_with_replacement(range(n), f):
            for mis in range(n):
                yield mis, fakes


def verify_fnp_bruteforce(
    g: Graph,
    rule: Rule,
    kind: Kind,
    max_agents: int = 3,
    max_fakes: int = 2,
    profiles=None,
) -> Manipulation | None:
    """Search explicit profiles for a profitable misreport plus fake identities.

    ``profiles`` restricts the search to the given location tuples; by
    default every multiset of ``1..max_agents`` locations is tried.
    """
    if profiles is None and (g.n > BRUTE_MAX_N or max_agents > 4 or max_fakes > 3):
        raise BoundsTooLarge(
            f"brute force limited to n <= {BRUTE_MAX_N}, 4 agents, 3 fakes "
            f"(got n={g.n}, {max_agents}, {max_fakes})"
        )
    if profiles is None:
        profiles = (
            p
            for a in range(1, max_agents + 1)
            for p in itertools.combinations_with_replacement(range(g.n), a)
        )
    cache: dict[int, int] = {}

    def f(locs) -> int:
        occ = mask_of(locs)
        if occ not in cache:
            cache[occ] = rule.select(g, occ)
        return cache[occ]

    for prof in profiles:
        prof = tuple(sorted(prof))
        truthful = f(prof)
        for i, loc in enumerate(prof):
            if i and prof[i - 1] == loc:
                continue  # identical agents
            rest = prof[:i] + prof[i + 1:]
            here = utility(kind, g, loc, truthful)
            for mis, fakes in _reports(g.n, len(prof), max_fakes):
                got = f(rest + (mis,) + fakes)
                if utility(kind, g, loc, got) > here:
                    return Manipulation(prof, i, mis, fakes, truthful, got)
    return None


def to_manipulation(cx: Counterexample) -> tuple[tuple[int, ...], int, int, tuple[int, ...]]:
    """Realize a set-level counterexample as an explicit profile manipulation.

    One agent sits on each vertex of ``before``; the manipulator misreports
    to one vertex of ``after - (before - {v})`` and fakes the rest.
    Returns ``(profile, agent index, misreport, fakes)``.
    """
    v = cx.manipulator
    profile = tuple(members(cx.before))
    rest = cx.before & ~(1 << v)
    extra = members(cx.after & ~rest)
    if extra:
        misreport, fakes = extra[0], tuple(extra[1:])
    else:
        misreport, fakes = members(rest)[0], ()
    return profile, profile.index(v), misreport, fakes


def confirm_counterexample(g: Graph, rule: Rule, kind: Kind, cx: Counterexample) -> Manipulation | None:
    """Re-derive ``cx`` through the brute-force route on its explicit profile."""
    profile, _, _, fakes = to_manipulation(cx)
    return verify_fnp_bruteforce(
        g, rule, kind, max_agents=len(profile), max_fakes=max(len(fakes), 0), profiles=[profile]
    )


def removal_violations(g: Graph, rule: Rule) -> list[tuple[int, int]]:
    """Pairs ``(S, v)`` where the outcome sits on ``S - {v}`` yet changes when ``v`` leaves."""
    table = _table(g, rule)
    bad = []
    for s in nonempty_subsets(g.n):
        out = table.entries[s]
        for v in members(s):
            rest = s & ~(1 << v)
            if rest >> out & 1 and table.entries[rest] != out:
                bad.append((s, v))
    return bad


def fnp_sequential_orders(g: Graph, kind: Kind, max_n: int = 6) -> list[tuple[int, ...]]:
    """Orders whose sequential Pareto rule is false-name-proof.

    Exploratory only: lists what holds on ``g`` and makes no claim of a
    characterization.
    """
    from fnploc.rules import SequentialPareto

    if g.n > max_n:
        raise GraphTooLarge(f"ordering enumeration limited to {max_n} vertices")
    return [
        order
        for order in itertools.permutations(range(g.n))
        if verify_fnp_idb(g, SequentialPareto(order, kind), kind) is None
    ]
