import random

import networkx as nx
import pytest

from fnploc import graph as gr
from fnploc import rules
from fnploc.errors import GraphTooLarge, NotATree, SpecError
from fnploc.graph import mask_of, members, nonempty_subsets
from fnploc.prefs import DIPPED, PEAKED, Cmp, compare, pe_set
from fnploc.verify import fnp_sequential_orders, removal_violations, verify_fnp_idb

from test_prefs import oracle_pe

TREES = [gr.path(3), gr.path(5), gr.path(6), gr.star(4), gr.star(5), gr.caterpillar_tree()] + [
    gr.tree(sorted(nx.random_labeled_tree(n, seed=s).edges()), n=n) for n, s in [(6, 1), (7, 2), (8, 3)]
]


def pruned_subtree(g, occ):
    """Minimal spanning subtree by repeatedly stripping unoccupied leaves."""
    keep = set(range(g.n))
    adj = {v: set(g.neighbors(v)) for v in range(g.n)}
    changed = True
    while changed:
        changed = False
        for v in list(keep):
            if not occ >> v & 1 and len(adj[v] & keep) <= 1:
                keep.discard(v)
                changed = True
    return keep


def test_sequential_pareto_identity_order():
    c5 = gr.cycle(5)
    order = (0, 1, 2, 3, 4)
    assert rules.sequential_pareto(c5, order, PEAKED, mask_of([2, 3, 4])) == 2
    assert rules.sequential_pareto(c5, order, PEAKED, mask_of([0, 2, 3])) == 0


def test_sequential_pareto_singleton():
    assert rules.sequential_pareto(gr.cycle(4), (0, 2, 1, 3), PEAKED, 1 << 1) == 1


def test_identity_order_manipulation_gains():
    c5 = gr.cycle(5)
    f = rules.SequentialPareto((0, 1, 2, 3, 4), PEAKED)
    truthful = f.select(c5, mask_of([2, 3, 4]))
    lied = f.select(c5, mask_of([0, 2, 3]))
    assert compare(PEAKED, c5, 4, lied, truthful) is Cmp.BETTER


def test_target_rule_examples():
    assert rules.target_rule(gr.path(5), 0, mask_of([2, 3, 4])) == 2
    assert rules.target_rule(gr.star(4), 1, mask_of([2, 3])) == 0
    for t in TREES:
        for v in range(t.n):
            assert rules.target_rule(t, 0, 1 << v) == v


@pytest.mark.parametrize("t", TREES, ids=lambda g: g.name)
def test_target_rule_against_pruning_oracle(t):
    for occ in nonempty_subsets(t.n):
        span = pruned_subtree(t, occ)
        assert members(rules.steiner_subtree(t, occ)) == sorted(span)
        for target in range(t.n):
            best = min(span, key=lambda u: t.dist[target][u])
            assert rules.target_rule(t, target, occ) == best
            if target in span:
                assert rules.target_rule(t, target, occ) == target


def test_target_rule_needs_tree():
    with pytest.raises(NotATree):
        rules.target_rule(gr.cycle(4), 0, 1)
    with pytest.raises(NotATree):
        rules.longest_path_unanimous(gr.cycle(4), 1)


def test_longest_path_caterpillar():
    g = gr.caterpillar_tree()
    assert rules.longest_path_endpoints(g) == (0, 7)
    # agents on the two pendant leaves and their shared neighbour
    assert rules.longest_path_unanimous(g, mask_of([3, 4, 5])) == 0


def test_longest_path_endpoint_cases():
    g = gr.caterpillar_tree()
    assert rules.longest_path_unanimous(g, 1 << 0) == 7
    p4 = gr.path(4)
    assert rules.longest_path_endpoints(p4) == (0, 3)
    # agent at 3 strictly prefers a = 0
    assert rules.longest_path_unanimous(p4, mask_of([0, 3])) == 0
    unanimity = 0 if any(p4.dist[v][0] > p4.dist[v][3] for v in (0, 3)) else 3
    assert unanimity == 0


@pytest.mark.parametrize("t", TREES, ids=lambda g: g.name)
def test_longest_path_output_is_someones_favourite(t):
    for occ in nonempty_subsets(t.n):
        out = rules.longest_path_unanimous(t, occ)
        assert any(t.dist[v][out] == max(t.dist[v]) for v in members(occ))


def test_as_table_c3_total_and_efficient():
    c3 = gr.cycle(3)
    table = rules.as_table(c3, rules.SequentialPareto((2, 0, 1), PEAKED))
    assert len(table.entries) - 1 == 7
    assert all(pe_set(c3, s, PEAKED) >> table.entries[s] & 1 for s in nonempty_subsets(3))


def test_as_table_c4_preset_matches_oracle():
    c4 = gr.cycle(4)
    order = [0, 2, 1, 3]
    table = rules.as_table(c4, rules.preset("c4-peaked"))
    for s in nonempty_subsets(4):
        pe = oracle_pe(c4, s, PEAKED)
        assert table.entries[s] == next(v for v in order if v in pe)


def test_as_table_target_path3():
    table = rules.as_table(gr.path(3), rules.TargetRule(0))
    assert table.entries[mask_of([1, 2])] == 1
    assert table.entries[mask_of([0, 2])] == 0


def test_as_table_cap():
    with pytest.raises(GraphTooLarge):
        rules.as_table(gr.path(21), rules.TargetRule(0))


FNP_PEAKED = [(gr.cycle(k), rules.preset(f"c{k}-peaked")) for k in (3, 4, 5)] + [
    (t, rules.TargetRule(x)) for t in TREES for x in range(t.n)
]


@pytest.mark.parametrize("g, rule", FNP_PEAKED, ids=lambda x: getattr(x, "name", None) or repr(x))
def test_removal_property_on_fnp_rules(g, rule):
    assert verify_fnp_idb(g, rule, PEAKED) is None
    assert removal_violations(g, rule) == []


@pytest.mark.parametrize("g", [gr.cycle(4), gr.cycle(5), gr.path(4), gr.star(4)], ids=lambda g: g.name)
def test_removal_violation_implies_manipulable(g):
    rng = random.Random(g.n)
    seen_violation = False
    for _ in range(200):
        entries = [-1] + [rng.choice(members(pe_set(g, s, PEAKED))) for s in nonempty_subsets(g.n)]
        table = rules.Table(tuple(entries), PEAKED)
        if removal_violations(g, table):
            seen_violation = True
            assert verify_fnp_idb(g, table, PEAKED) is not None
    assert seen_violation


def test_presets():
    assert rules.preset("c5-dipped").order == (0, 1, 4, 2, 3)
    assert rules.preset("c4-peaked").order == (0, 2, 1, 3)
    assert rules.preset_for(6, PEAKED) is None
    with pytest.raises(SpecError):
        rules.preset("c9-peaked")


def test_rule_spec_parsing():
    c4 = gr.cycle(4)
    r = rules.from_spec({"rule": "seq_pareto", "order": [0, 2, 1, 3], "kind": "peaked"}, c4)
    assert r == rules.preset("c4-peaked")
    assert rules.from_spec("preset:c4-dipped", c4).kind is DIPPED
    p3 = gr.path(3)
    assert rules.from_spec({"rule": "target", "target": 0}, p3) == rules.TargetRule(0)
    assert isinstance(rules.from_spec({"rule": "longest_path"}, p3), rules.LongestPathUnanimous)
    with pytest.raises(SpecError):
        rules.from_spec({"rule": "seq_pareto", "order": [0, 0, 1, 2]}, c4)
    with pytest.raises(SpecError):
        rules.from_spec("preset:c5-peaked", c4)
    with pytest.raises(NotATree):
        rules.from_spec({"rule": "target", "target": 0}, c4)


def test_table_json_round_trip():
    c4 = gr.cycle(4)
    table = rules.as_table(c4, rules.preset("c4-peaked"))
    spec = rules.table_to_json(c4, table)
    assert spec["entries"]["0b0110"] == table.entries[0b0110]
    assert rules.from_spec(spec, c4) == table
    del spec["entries"]["0b0001"]
    with pytest.raises(SpecError):
        rules.from_spec(spec, c4)


def test_c3_every_order_is_fnp():
    for kind in (PEAKED, DIPPED):
        assert len(fnp_sequential_orders(gr.cycle(3), kind)) == 6


def test_preset_orders_among_fnp_orders():
    for k in (4, 5):
        for kind in (PEAKED, DIPPED):
            orders = fnp_sequential_orders(gr.cycle(k), kind)
            assert rules.preset_for(k, kind).order in orders
    assert (0, 1, 2, 3, 4) not in fnp_sequential_orders(gr.cycle(5), PEAKED)
