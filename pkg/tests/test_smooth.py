from __future__ import annotations

import random

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from ggmlab.algebra import ContractViolation
from ggmlab.smooth import (
    AffineSpace, concrete_session, idealized_session, index_calculus, index_calculus_dl,
    is_primitive_root, primitive_root, random_subspace, smooth_density, smooth_rate_stats,
    subspace_smooth_count,
)


def _wire_for(sess, rep):
    r = next(e for e in range(sess.order) if pow(sess.g, e, sess.q) == rep)
    return sess.label(r)


def test_primitive_root_matches_sympy():
    for q in (7, 11, 101, 1019):
        assert primitive_root(q) == sympy.primitive_root(q)
        assert is_primitive_root(primitive_root(q), q)


def test_factor_base_logs_are_true_logs():
    s = concrete_session(1019, 30, 5)
    for p, z in zip(s.fb.primes, s.fb.z):
        assert pow(s.g, z, 1019) == p


def test_smooth_test_and_smoothing_examples():
    s = concrete_session(1019, 7, 5)
    assert s.smooth_test(_wire_for(s, 12)) == 1
    assert s.smooth_test(_wire_for(s, 11)) == 0
    assert s.smooth_test(_wire_for(s, 1)) == 1
    assert s.smoothing(_wire_for(s, 12)) == (2, 1, 0, 0)
    assert s.smoothing(_wire_for(s, 11)) is None
    assert s.smoothing(_wire_for(s, 1)) == (0, 0, 0, 0)


def test_smoothing_records_sound_relation():
    s = concrete_session(1019, 7, 5)
    s.smoothing(_wire_for(s, 12))
    assert s.informative == 1 and s.rank == 1
    # the same element again is predictable
    s.smoothing(_wire_for(s, 12))
    assert s.informative == 1


def test_equality_gate_in_smooth_session():
    s = concrete_session(101, 7, 5)
    a, b = s.label(3), s.label(3)
    assert s.eq(a, b) == 1
    with pytest.raises(ContractViolation):
        s.eq(b, a)


def test_index_calculus_examples():
    res = index_calculus(1019, 30, 1, budget=5000, seed=0)
    assert res.x == 1 and res.verified
    fail = index_calculus(1019, 2, 77, budget=3, seed=0)
    assert fail.x is None and not fail.verified


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 1017), st.integers(0, 100))
def test_index_calculus_verifies(x, seed):
    res = index_calculus(1019, 30, x, budget=20000, seed=seed)
    assert res.x is not None
    assert pow(primitive_root(1019), res.x, 1019) == pow(primitive_root(1019), x, 1019)


def test_index_calculus_needs_concrete():
    sess = idealized_session(101, 7, 0.1, 3, random.Random(0))
    with pytest.raises(ContractViolation):
        index_calculus_dl(sess, 10, random.Random(0))


def test_concrete_density_matches_count():
    s = concrete_session(1019, 7, 5)
    brute = sum(1 for r in range(1, 1019) if max(sympy.primefactors(r) or [1]) <= 7)
    assert smooth_density(s) == brute / 1018


def test_concrete_rates():
    s = concrete_session(1019, 7, 5)
    rates = smooth_rate_stats(s, 3000, random.Random(2))
    assert rates.fresh_ok and rates.cumulative_ok


def test_idealized_rates():
    s = idealized_session(10007, 13, 0.05, 17, random.Random(3))
    assert smooth_density(s) <= 0.05
    rates = smooth_rate_stats(s, 10000, random.Random(4))
    assert rates.cumulative_rate <= 0.05 + 3 * rates.sigma
    assert rates.fresh_ok and rates.cumulative_ok


def test_idealized_empty_smooth_set():
    s = idealized_session(101, 7, 0.0, 3, random.Random(0))
    rates = smooth_rate_stats(s, 200, random.Random(1))
    assert rates.fresh == rates.cumulative == 0


def test_subspace_examples():
    s = concrete_session(1019, 7, 5)
    full = AffineSpace.coordinate(4, range(4))
    assert subspace_smooth_count(s, full) == smooth_density(s)
    # a point subspace at a vector no residue below 1019 realises
    point = AffineSpace((), (50, 0, 0, 0))
    assert subspace_smooth_count(s, point) == 0
    s23 = subspace_smooth_count(s, AffineSpace.coordinate(4, [0, 1]))
    s57 = subspace_smooth_count(s, AffineSpace.coordinate(4, [2, 3]))
    brute = [r for r in range(1, 1019) if set(sympy.primefactors(r)) <= {2, 3}]
    assert s23 == len(brute) / 1018
    assert s23 >= s57


def test_random_subspaces_smaller():
    s = concrete_session(1019, 30, 5)
    coord = subspace_smooth_count(s, AffineSpace.coordinate(s.fb.b, [0, 1]))
    rng = random.Random(7)
    assert all(coord >= subspace_smooth_count(s, random_subspace(s.fb.b, 2, s.order, rng))
               for _ in range(5))
