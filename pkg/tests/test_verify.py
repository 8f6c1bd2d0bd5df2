import random

import pytest

from fnploc import graph as gr
from fnploc import rules
from fnploc.errors import BoundsTooLarge, GraphTooLarge
from fnploc.graph import mask_of, members, nonempty_subsets
from fnploc.prefs import DIPPED, PEAKED, Kind, pe_set
from fnploc.verify import (
    Counterexample,
    confirm_counterexample,
    iter_fnp_violations,
    to_manipulation,
    verify,
    verify_fnp_bruteforce,
    verify_fnp_idb,
    verify_pe,
)

IDENTITY_ORDER = rules.SequentialPareto((0, 1, 2, 3, 4), PEAKED)


def constant(g, v, kind=PEAKED):
    return rules.Table(tuple([-1] + [v] * ((1 << g.n) - 1)), kind)


def random_table(g, kind, rng):
    return rules.Table(
        tuple([-1] + [rng.choice(members(pe_set(g, s, kind))) for s in nonempty_subsets(g.n)]),
        kind,
    )


def test_pe_holds_for_presets():
    for k in (3, 4, 5):
        for kind in Kind:
            assert verify_pe(gr.cycle(k), rules.preset_for(k, kind), kind) is None


def test_pe_constant_rule_on_c6():
    c6 = gr.cycle(6)
    f = constant(c6, 0)
    w = verify_pe(c6, f, PEAKED)
    assert w is not None and w.check(c6, PEAKED)
    assert w.occ == 1 << 1 and w.dominator == 1
    # the singleton at v4 is another witness
    assert rules.as_table(c6, f).entries[1 << 3] == 0
    assert members(pe_set(c6, 1 << 3, PEAKED)) == [3]


def test_pe_caterpillar_longest_path():
    assert verify_pe(gr.caterpillar_tree(), rules.LongestPathUnanimous(), DIPPED) is None


def test_fnp_identity_order_refuted():
    c5 = gr.cycle(5)
    cx = verify_fnp_idb(c5, IDENTITY_ORDER, PEAKED)
    assert cx is not None
    assert cx.check(c5, rules.as_table(c5, IDENTITY_ORDER), PEAKED)
    before, after = mask_of([2, 3, 4]), mask_of([0, 2, 3])
    matches = [c for c in iter_fnp_violations(c5, IDENTITY_ORDER, PEAKED) if (c.before, c.manipulator, c.after) == (before, 4, after)]
    assert len(matches) == 1
    assert (matches[0].outcome_before, matches[0].outcome_after) == (2, 0)


def test_fnp_preset_c5_holds():
    assert verify_fnp_idb(gr.cycle(5), rules.preset("c5-peaked"), PEAKED) is None


def test_c6_no_table_passes():
    c6 = gr.cycle(6)
    rng = random.Random(6)
    for kind in Kind:
        for _ in range(30):
            assert verify_fnp_idb(c6, random_table(c6, kind, rng), kind) is not None
        for order in [(0, 1, 2, 3, 4, 5), (0, 3, 1, 4, 2, 5), (5, 4, 3, 2, 1, 0)]:
            assert verify_fnp_idb(c6, rules.SequentialPareto(order, kind), kind) is not None


def test_bruteforce_examples():
    c4, c5 = gr.cycle(4), gr.cycle(5)
    assert verify_fnp_bruteforce(c4, rules.preset("c4-peaked"), PEAKED, 3, 2) is None
    m = verify_fnp_bruteforce(c5, IDENTITY_ORDER, PEAKED, 3, 2)
    assert m is not None
    m = verify_fnp_bruteforce(c5, IDENTITY_ORDER, PEAKED, 3, 2, profiles=[(2, 3, 4)])
    assert m.profile == (2, 3, 4) and m.profile[m.agent] == 4
    assert m.misreport == 0 and m.fakes == ()
    assert m.reported() == (0, 2, 3)
    assert (m.outcome_before, m.outcome_after) == (2, 0)


def test_bruteforce_single_vertex():
    p1 = gr.path(1)
    assert verify_fnp_bruteforce(p1, rules.TargetRule(0), PEAKED, 3, 2) is None
    assert verify_fnp_idb(p1, rules.TargetRule(0), PEAKED) is None


def test_bruteforce_bounds():
    with pytest.raises(BoundsTooLarge):
        verify_fnp_bruteforce(gr.cycle(8), IDENTITY_ORDER, PEAKED)
    with pytest.raises(BoundsTooLarge):
        verify_fnp_bruteforce(gr.cycle(5), IDENTITY_ORDER, PEAKED, 5, 2)


def test_verification_cap():
    with pytest.raises(GraphTooLarge):
        verify_pe(gr.path(21), rules.TargetRule(0), PEAKED)


def _assert_minimal(g, table, kind, cx: Counterexample):
    # vertices outside before; dropping the manipulator itself would grow the diff
    for u in members(cx.after & ~cx.before):
        smaller = cx.after & ~(1 << u)
        if not smaller:
            continue
        here = table.entries[cx.before]
        there = table.entries[smaller]
        # dropping any added vertex loses the gain
        if kind is PEAKED:
            assert g.dist[cx.manipulator][there] >= g.dist[cx.manipulator][here]
        else:
            assert g.dist[cx.manipulator][there] <= g.dist[cx.manipulator][here]


SMALL = [gr.cycle(3), gr.cycle(4), gr.cycle(5), gr.cycle(6), gr.path(4), gr.star(5), gr.hypergrid([2, 3])]


@pytest.mark.parametrize("g", SMALL, ids=lambda g: g.name)
@pytest.mark.parametrize("kind", list(Kind))
def test_certificates_self_check_and_oracles_agree(g, kind):
    rng = random.Random(g.n * 7 + (kind is DIPPED))
    for _ in range(10):
        table = random_table(g, kind, rng)
        cx = verify_fnp_idb(g, table, kind)
        brute = verify_fnp_bruteforce(g, table, kind, 3, 2)
        if cx is None:
            assert brute is None
            continue
        assert cx.check(g, table, kind)
        assert cx.gain > 0
        _assert_minimal(g, table, kind, cx)
        assert confirm_counterexample(g, table, kind, cx) is not None


def test_to_manipulation_shapes():
    c5 = gr.cycle(5)
    table = rules.as_table(c5, IDENTITY_ORDER)
    ex = Counterexample(mask_of([2, 3, 4]), 4, mask_of([0, 2, 3]), 2, 0, 2, 1)
    assert ex.check(c5, table, PEAKED)
    assert to_manipulation(ex) == ((2, 3, 4), 2, 0, ())
    # shrink-only manipulation: the agent reports onto an occupied vertex
    shrink = Counterexample(mask_of([0, 1]), 1, mask_of([0]), 0, 0, 1, 1)
    assert to_manipulation(shrink) == ((0, 1), 1, 0, ())


def test_verdict_json():
    c5 = gr.cycle(5)
    v = verify(c5, IDENTITY_ORDER, PEAKED)
    out = v.to_json(c5)
    assert out["pe"] == "holds"
    assert set(out["fnp"]) == {"before", "manipulator", "after", "outcome_before", "outcome_after", "cost", "gain"}
    assert verify(c5, rules.preset("c5-peaked"), PEAKED).to_json(c5) == {"pe": "holds", "fnp": "holds"}
