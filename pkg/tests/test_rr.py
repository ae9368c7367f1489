from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ggmlab.algebra import ContractViolation
from ggmlab.oracle import dl_instance, run_algorithm
from ggmlab.rr import (
    LabelTable, RROracle, UnfaithfulQuery, coupled_trial, equivalence_experiment, rr_bsgs,
    rr_probe, translate_faithful, translate_general,
)


def test_label_table_function_and_injective():
    t = LabelTable(101, random.Random(0), slack_bits=4)
    labs = [t.label(x) for x in range(101)]
    assert len(set(labs)) == 101
    assert t.label(5) == labs[5]
    assert t.label(106) == labs[5]


def test_label_table_too_small():
    with pytest.raises(ContractViolation):
        LabelTable(1 << 20, random.Random(0), slack_bits=-5)


def test_native_op():
    rr = RROracle(11, (1, 7), random.Random(1), slack_bits=8)
    assert rr.op(rr.label(3), rr.label(5)) == rr.label(8)
    assert rr.op(rr.label(3), rr.label(3), 1) == rr.label(0)


def test_native_garbage_label_is_bot():
    # a huge label set makes an unseen label invalid with overwhelming probability
    rr = RROracle(11, (1, 7), random.Random(1), slack_bits=64)
    issued = {rr.label(5)}
    garbage = "1" * len(next(iter(issued)))
    assert garbage not in issued
    assert rr.op(garbage, rr.label(5)) is None


def test_faithful_zero_queries_is_identity():
    alg = translate_faithful(lambda rr, rng: "done", random.Random(0))
    out, tr = run_algorithm(alg, dl_instance(11, 7), 0)
    assert out == "done"
    # only the input wires are compared against each other
    assert tr.tallies()["T"] == 0


def test_faithful_rejects_fresh_label():
    alg = translate_faithful(lambda rr, rng: rr_probe(rr, rng), random.Random(0))
    with pytest.raises(UnfaithfulQuery):
        run_algorithm(alg, dl_instance(101, 7), 0)


def test_general_needs_retries():
    with pytest.raises(ContractViolation):
        translate_general(rr_bsgs, 0, random.Random(0))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10), st.integers(0, 1000))
def test_faithful_bsgs_coupling(x, seed):
    res = coupled_trial(rr_bsgs, 11, x, seed, 0)
    assert res.agree and res.native == x


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10), st.integers(0, 1000))
def test_general_equals_faithful_without_unfaithful_queries(x, seed):
    a = coupled_trial(rr_bsgs, 11, x, seed, 0)
    b = coupled_trial(rr_bsgs, 11, x, seed, 0, retries=2)
    assert a.translated == b.translated and b.retry_labels == 0


def test_faithful_equivalence_small():
    rep = equivalence_experiment(rr_bsgs, 11, 100, seed=0)
    assert rep.disagreements == 0 and rep.ok


def test_unfaithful_equivalence_small():
    rep = equivalence_experiment(lambda rr, rng: rr_probe(rr, rng), 101, 300, seed=1,
                                 retries=2, slack_bits=0, T=10)
    assert rep.ok


def test_degenerate_bound():
    rep = equivalence_experiment(lambda rr, rng: rr_probe(rr, rng, labels=10), 11, 50, seed=2,
                                 retries=1, slack_bits=0, T=11)
    assert rep.degenerate and rep.bound == 1.0 and rep.rate <= 1.0
