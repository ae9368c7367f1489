"""Helpers for checking gates as explicit matrices.

A spare qudit register of dimension K rides along as a batch axis: no gate
touches it, so one gate application acts on K input states at once.
"""
from __future__ import annotations

import math

import numpy as np

from ggmlab.quantum import Machine

# gate name -> register kinds; "b" is a control qubit, "e" an element/ring register
GROUP_GATES = {"op": "bee", "inv": "bee", "eq": "bee"}
RING_GATES = {"add": "bee", "sub": "bee", "prodadd": "beee", "invadd": "beee", "testinv": "eb"}
ALL_GATES = {**GROUP_GATES, **RING_GATES}


def model_of(name):
    return "group" if name in GROUP_GATES else "ring"


def dims(N, kinds):
    return [2 if k == "b" else N + 1 for k in kinds]


def fresh(N, model, kinds, delegated=False, states=None):
    """Machine with the listed registers quantum; ``states`` is (D,) or (D, K) with unit columns."""
    m = Machine(N, model, delegated=delegated)
    regs = [m.qubit(0) if k == "b" else m._element_any(0) for k in kinds]
    for r in regs:
        m._promote(r)
    if states is not None:
        S = np.asarray(states, dtype=complex)
        if S.ndim == 2:
            batch = m.qudit(S.shape[1], 0, "batch")
            m._promote(batch)
            S = S / math.sqrt(S.shape[1])
        m.psi = S.reshape(m.psi.shape)
    return m, regs


def apply(m, name, regs, K=None):
    getattr(m, name)(*regs)
    v = m.state_vector()
    if K is None:
        return v.reshape(-1)
    return v.reshape(-1, K) * math.sqrt(K)


def run_batch(N, name, states, delegated=False):
    kinds = ALL_GATES[name]
    m, regs = fresh(N, model_of(name), kinds, delegated, states)
    return apply(m, name, regs, states.shape[1])


def gate_matrix(N, name, delegated=False):
    D = math.prod(dims(N, ALL_GATES[name]))
    return run_batch(N, name, np.eye(D, dtype=complex), delegated)


def random_states(D, K, rng):
    V = rng.normal(size=(D, K)) + 1j * rng.normal(size=(D, K))
    return V / np.linalg.norm(V, axis=0)


def bot_indices(N, kinds):
    shape = dims(N, kinds)
    D = math.prod(shape)
    return [j for j in range(D)
            if any(k == "e" and i == N for k, i in zip(kinds, np.unravel_index(j, shape)))]


def bot_sector_deviation(U, N, kinds):
    """Max |U e_j - e_j| over basis states with an invalid element register."""
    idx = bot_indices(N, kinds)
    return float(np.abs(U[:, idx] - np.eye(len(U))[:, idx]).max()) if idx else 0.0
