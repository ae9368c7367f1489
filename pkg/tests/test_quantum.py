from __future__ import annotations

import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _qtools import (
    ALL_GATES, GROUP_GATES, RING_GATES, bot_sector_deviation, dims, gate_matrix, random_states, run_batch,
)
from ggmlab.algebra import ContractViolation
from ggmlab.algorithms import bsgs, random_collision
from ggmlab.quantum import (
    DelegationTally, Machine, eq_removal_experiment, factoring_output_ok, multiplicative_order,
    run_program, shor_dl_qggm, shor_order_qgrm,
)


def _basis(m, regs):
    probs = m.probabilities(regs)
    assert len(probs) == 1
    return next(iter(probs))


def test_controlled_op_example():
    m = Machine(5)
    b = m.qubit(1)
    X, Y = m._element_any(2), m._element_any(3)
    m._promote(X)
    m.op(b, X, Y)
    assert _basis(m, [b, X, Y]) == (1, 0, 3)
    assert m.tally.Q == 1 and m.tally.C == 0


def test_op_on_bot_unchanged():
    m = Machine(5)
    b = m.qubit(1)
    X, Y = m._element_any(None), m._element_any(3)
    m._promote(X)
    m.op(b, X, Y)
    assert _basis(m, [b, X, Y]) == (1, 5, 3)


def test_op_linearity():
    m = Machine(5)
    b = m.qubit(0)
    X, Y = m._element_any(1), m._element_any(1)
    m.h(b)
    m.op(b, X, Y)
    p = m.probabilities([b, X, Y])
    assert p.keys() == {(0, 1, 1), (1, 2, 1)}
    assert all(abs(v - 0.5) < 1e-12 for v in p.values())


def test_ring_examples():
    m = Machine(15, "ring")
    b = m.qubit(1)
    X, Y, Z = (m._element_any(v) for v in (1, 2, 4))
    m._promote(X)
    m.prodadd(b, X, Y, Z)
    assert _basis(m, [X]) == (9,)

    m = Machine(15, "ring")
    X, c = m._element_any(5), m.qubit(0)
    m._promote(c)
    m.testinv(X, c)
    assert _basis(m, [c]) == (0,)

    m = Machine(15, "ring")
    b = m.qubit(1)
    X, Y, Z = (m._element_any(v) for v in (0, 3, 2))
    m._promote(X)
    m.invadd(b, X, Y, Z)
    assert _basis(m, [X]) == (3 * pow(2, -1, 15) % 15,) == (9,)
    assert m.tally.Q == 1


def test_classical_label():
    m = Machine(11)
    qs = m.qubits(4, 0b0110)
    r = m.classical_label(qs, random.Random(0))
    assert m.regs[r].value == 6 and not m.regs[r].quantum
    qs = m.qubits(4, 13)
    r = m.classical_label(qs, random.Random(0))
    assert m.regs[r].value == m.bot


def test_classical_label_uniform_input():
    seen = {0: 0, 1: 0}
    for s in range(400):
        m = Machine(11)
        q = m.qubit(0)
        m.h(q)
        seen[m.regs[m.classical_label([q], random.Random(s))].value] += 1
    assert 150 < seen[0] < 250


def test_element_init_rules():
    m = Machine(7)
    with pytest.raises(ContractViolation):
        m.element(3)
    with pytest.raises(ContractViolation):
        m.unitary([m.element(1)], np.eye(8))


@pytest.mark.parametrize("N", [2, 3, 4, 5])
@pytest.mark.parametrize("name", sorted(ALL_GATES))
def test_gates_are_unitary_permutations(N, name):
    U = gate_matrix(N, name)
    assert np.abs(U @ U.conj().T - np.eye(len(U))).max() < 1e-10
    assert set(np.unique(np.round(np.abs(U), 12))) <= {0.0, 1.0}


@pytest.mark.parametrize("pair", [("op", "inv"), ("add", "sub")])
@settings(max_examples=10, deadline=None)
@given(N=st.sampled_from([2, 3, 5, 7]), seed=st.integers(0, 2**32 - 1))
def test_forward_then_inverse_is_identity(pair, N, seed):
    V = random_states(math.prod(dims(N, "bee")), 8, np.random.default_rng(seed))
    fwd, back = pair
    U1, U2 = gate_matrix(N, fwd), gate_matrix(N, back)
    assert np.abs(U2 @ (U1 @ V) - V).max() < 1e-10


@pytest.mark.parametrize("N", [4, 5, 6])
@pytest.mark.parametrize("name", sorted(ALL_GATES))
def test_bot_sector_fixed(N, name):
    assert bot_sector_deviation(gate_matrix(N, name), N, ALL_GATES[name]) < 1e-10


@settings(max_examples=5, deadline=None)
@given(st.sampled_from([3, 5]), st.integers(0, 2**32 - 1))
def test_delegated_matches_monolithic(N, seed):
    rng = np.random.default_rng(seed)
    for name, kinds in ALL_GATES.items():
        V = random_states(math.prod(dims(N, kinds)), 4, rng)
        assert np.abs(run_batch(N, name, V) - run_batch(N, name, V, delegated=True)).max() < 1e-10


def test_batched_matrix_matches_single_column():
    U = gate_matrix(3, "prodadd")
    e = np.zeros((len(U), 1), dtype=complex)
    e[37, 0] = 1
    assert np.allclose(run_batch(3, "prodadd", e)[:, 0], U[:, 37])


def test_delegation_tally():
    t = DelegationTally(Q=7)
    assert t.per_gate == 1 and t.qubits == 7
    assert DelegationTally(t=2, w=3, Q=4).per_gate == math.ceil(math.log2(12))
    assert t.audit(10.0, 0.5)
    assert not DelegationTally(Q=1).audit(10.0, 1.0)


def test_shor_dl_small():
    r = shor_dl_qggm(17, 0)
    assert r.answer == 0 and abs(r.success - 1) < 1e-9
    r = shor_dl_qggm(11, 7)
    assert r.answer == 7 and r.quantum_eq == 0


def test_shor_dl_delegated_identical():
    a = shor_dl_qggm(13, 4)
    b = shor_dl_qggm(13, 4, delegated=True)
    sa = a.extra["machine"].state_vector()
    sb = b.extra["machine"].state_vector()
    assert np.abs(sa - sb).max() < 1e-10


def test_shor_order_small():
    r = shor_order_qgrm(15, 1)
    assert r.success == pytest.approx(1.0)
    with pytest.raises(ContractViolation):
        shor_order_qgrm(15, 5)


def test_order_helpers():
    assert multiplicative_order(2, 15) == 4
    assert factoring_output_ok(3, 15) and not factoring_output_ok(15, 15)


def test_eq_removal_identical_polynomials():
    def alg(api, rng):
        a = api.op(api.label(3), api.label(4))
        return api.eq(a, api.label(7))
    rep = eq_removal_experiment(alg, 10403, 3, 50, seed=0)
    assert rep.rate == 1.0


def test_eq_removal_large_prime():
    rep = eq_removal_experiment(random_collision(10), 1000003, 10, 300, seed=1)
    assert rep.rate > 0.99 and rep.ok


def test_run_program():
    prog = {
        "order": 5, "model": "group",
        "registers": [{"name": "b", "kind": "Qubit", "init": 1},
                      {"name": "X", "kind": "Element", "init": 1},
                      {"name": "Y", "kind": "Element", "init": 1}],
        "gates": [{"gate": "h", "regs": ["b"]}, {"gate": "op", "regs": ["b", "X", "Y"]}],
        "measure": ["X"],
    }
    _, dist = run_program(prog)
    assert dist.keys() == {(1,), (2,)}
    _, dist2 = run_program(prog, delegated=True)
    assert all(abs(dist[k] - dist2[k]) < 1e-12 for k in dist)
