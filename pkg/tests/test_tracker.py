from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ggmlab.algebra import ContractViolation, LinPolyModN
from ggmlab.algorithms import bsgs, mdl_bsgs, random_collision
from ggmlab.oracle import GateRecord, dl_instance, mdl_instance, run_algorithm
from ggmlab.tracker import (
    CollisionClass, PolyList, ReplayError, ZeroSet, analyze, classify_collision,
    informative_rate_stats, replay_without_oracle, reveal_indices, solve_mdl,
)


def test_track_gate_examples():
    pl = PolyList(11, 1)
    pl.add(0, (0, 1))  # X1
    pl.track(GateRecord(0, "Label", (7,), None, 1))
    assert pl.poly(1) == (7, 0)
    pl.track(GateRecord(1, "Label", (3,), None, 2))
    pl.track(GateRecord(2, "GroupOp", (0, 2), 0, 3))
    assert pl.poly(3) == (3, 1)
    pl.track(GateRecord(3, "GroupOp", (0, 0), 1, 4))
    assert pl.poly(4) == (0, 0)
    with pytest.raises(ContractViolation):
        pl.track(GateRecord(4, "GroupOp", (0, 99), 0, 5))


def test_label_out_of_range_tracks_bot():
    pl = PolyList(11, 1)
    pl.track(GateRecord(0, "Label", (12,), None, 0))
    assert pl.poly(0) is None


def test_classify_examples():
    zs = ZeroSet(11, 1)
    assert classify_collision(zs, LinPolyModN(11, (3, 1)), LinPolyModN(11, (3, 1))) is CollisionClass.TRIVIAL
    assert classify_collision(zs, LinPolyModN(11, (0, 1)), LinPolyModN(11, (7, 0))) is CollisionClass.INFORMATIVE
    assert zs.rank == 1
    assert zs.classify((-14, 2)) is CollisionClass.PREDICTABLE
    assert zs.rank == 1


def test_classify_integer_mode():
    zs = ZeroSet(None, 0)
    assert zs.classify((15,)) is CollisionClass.INFORMATIVE
    assert zs.classify((45,)) is CollisionClass.PREDICTABLE
    assert zs.classify((10,)) is CollisionClass.INFORMATIVE
    assert zs.rank == 1  # the lattice 5Z still has rank one


def test_zero_set_needs_prime():
    with pytest.raises(ContractViolation):
        ZeroSet(15, 1)


def _view(recs):
    return [(r.kind, r.inputs, r.sign, r.answer) for r in recs]


def test_replay_matches_live_bsgs():
    inst = dl_instance(11, 7)
    out, tr = run_algorithm(bsgs(8), inst, seed=3)
    ev = analyze(tr).informative()
    assert ev
    res = replay_without_oracle(bsgs(8), 3, inst.public(), [ev[0].seq], halt=False)
    assert _view(res.records) == _view(tr.records)
    assert res.output == out


def test_replay_empty_directives_collision_free():
    inst = dl_instance(101, 100)
    out, tr = run_algorithm(bsgs(4), inst, seed=0)
    assert out is None and not analyze(tr).informative()
    res = replay_without_oracle(bsgs(4), 0, inst.public())
    assert _view(res.records) == _view(tr.records)
    assert not res.halted


def test_replay_directive_on_label_fails():
    inst = dl_instance(11, 7)
    with pytest.raises(ReplayError):
        replay_without_oracle(bsgs(8), 0, inst.public(), [0])


def test_replay_directive_past_end_fails():
    inst = dl_instance(11, 7)
    with pytest.raises(ReplayError):
        replay_without_oracle(bsgs(8), 0, inst.public(), [10**6])


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100), st.integers(0, 1000), st.integers(2, 40))
def test_replay_reproduces_live_run(x, seed, T):
    """With the live run's informative indices as directives, replay sees the same transcript."""
    alg = random_collision(T)
    inst = dl_instance(101, x)
    out, tr = run_algorithm(alg, inst, seed)
    dirs = [e.seq for e in analyze(tr).informative()]
    res = replay_without_oracle(alg, seed, inst.public(), dirs, halt=False)
    assert _view(res.records) == _view(tr.records)
    assert res.output == out


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100), st.integers(0, 1000), st.integers(2, 40))
def test_live_collisions_vanish_at_secret(x, seed, T):
    inst = dl_instance(101, x)
    _, tr = run_algorithm(random_collision(T), inst, seed)
    an = analyze(tr)
    for e in an.events:
        c0, c1 = e.relation
        assert (c0 + c1 * x) % 101 == 0
    # distinct informative relations are linearly independent
    assert an.zeroset.rank == len(an.informative())


def test_solve_mdl_examples():
    zs = ZeroSet(7, 2)
    zs.classify((-3, 1, 1))
    zs.classify((-1, 1, -1))
    assert solve_mdl(zs, 2, 7) == (2, 1)
    zs = ZeroSet(11, 2)
    zs.classify((-7, 1, 0))
    zs.classify((-3, 0, 1))
    assert solve_mdl(zs, 2, 11) == (7, 3)
    short = ZeroSet(11, 2)
    short.classify((-7, 1, 0))
    with pytest.raises(ContractViolation):
        solve_mdl(short, 2, 11)


def test_reveal_indices_examples():
    zs = ZeroSet(11, 2)
    zs.classify((-5, 1, 1))
    assert reveal_indices(zs, 2) == [2]
    zs = ZeroSet(11, 3)
    zs.classify((-7, 1, 0, 0))
    zs.classify((-3, 0, 1, 0))
    assert reveal_indices(zs, 3) == [3]
    zs = ZeroSet(7, 2)
    zs.classify((0, 1, 1))
    zs.classify((0, 1, -1))
    assert reveal_indices(zs, 2) == []


@settings(max_examples=50, deadline=None)
@given(st.data())
def test_reveal_keeps_system_solvable(data):
    p, b = 11, data.draw(st.integers(1, 4))
    zs = ZeroSet(p, b)
    for _ in range(data.draw(st.integers(0, b))):
        zs.classify(tuple(data.draw(st.integers(0, p - 1)) for _ in range(b + 1)))
    if 0 in zs.basis.pivots:
        return
    rev = reveal_indices(zs, b)
    assert len(rev) == b - zs.rank
    # fixing the revealed variables leaves a unique solution for the rest
    vals = {i: data.draw(st.integers(0, p - 1)) for i in rev}
    sols = 0
    rest = [i for i in range(1, b + 1) if i not in vals]
    for combo in itertools.product(range(p), repeat=len(rest)):
        v = {**vals, **dict(zip(rest, combo))}
        if all((r[0] + sum(r[i] * v[i] for i in range(1, b + 1))) % p == 0 for r in zs.collisions):
            sols += 1
    assert sols == 1


def test_mdl_pipeline_round_trip():
    inst = mdl_instance(11, (7, 3))
    out, tr = run_algorithm(mdl_bsgs(12), inst, seed=0)
    assert out == (7, 3)
    an = analyze(tr)
    assert solve_mdl(an.zeroset, 2, 11) == (7, 3)


def test_rate_stats_in_span_is_zero():
    st_ = informative_rate_stats(11, 2, trials=20, queries=30, seed=1, in_span=True)
    assert st_.informative == 0 and st_.rate == 0.0


def test_rate_stats_small():
    st_ = informative_rate_stats(101, 2, trials=30, queries=190, seed=5)
    assert st_.queries == 30 * 190
    assert st_.rate_ok
    assert st_.tail_E == 190
