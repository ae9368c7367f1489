"""Reference generic algorithms.

Each takes the oracle interface ``api`` and a ``random.Random``; factories
such as :func:`bsgs` bind the budget so the result matches the
``alg(api, rng)`` shape that sessions and replays expect.
"""
from __future__ import annotations

import math
from functools import partial

from .algebra import crt, factor_integer, inv_mod


def scalar_mul(api, w, k: int):
    """w^k by double-and-add, at most 2*log2(k) group operations."""
    if k == 0:
        return api.op(w, w, 1)
    if k < 0:
        return api.op(api.op(w, w, 1), scalar_mul(api, w, -k), 1)
    acc = w
    for bit in bin(k)[3:]:
        acc = api.op(acc, acc)
        if bit == "1":
            acc = api.op(acc, w)
    return acc


def _giant_search(api, babies, target, step, s, N):
    """Giant steps target - k*step for k < s against the baby wires; returns k*s + j."""
    y = target
    for k in range(s):
        if k:
            y = api.op(y, step, 1)
        for j, b in enumerate(babies):
            if api.eq(b, y):
                return (k * s + j) % N
    return None


def bsgs_dl(api, rng, T: int):
    """Baby-step giant-step with s = floor(T/2); finds x exactly when x < s*s."""
    s = T // 2
    if s < 1:
        return None
    N = api.order
    h = api.inputs[1]
    babies = [api.label(j) for j in range(s)]
    for j, b in enumerate(babies):
        if api.eq(b, h):
            return j
    if s == 1:
        return None
    step = api.label(s % N)
    y = h
    for k in range(1, s):
        y = api.op(y, step, 1)
        for j, b in enumerate(babies):
            if api.eq(b, y):
                return (k * s + j) % N
    return None


def bsgs(T: int):
    return partial(bsgs_dl, T=T)


def mdl_bsgs_dl(api, rng, T: int):
    """BSGS for every instance with shared baby steps; all-or-nothing output."""
    m = len(api.inputs) - 1
    s = (T + m - 1) // (m + 1)
    if s < 1:
        return None
    N = api.order
    babies = [api.label(j) for j in range(s)]
    step = api.label(s % N) if s > 1 else None
    out = []
    for h in api.inputs[1:]:
        y, found = h, None
        for k in range(s):
            if k:
                y = api.op(y, step, 1)
            for j, b in enumerate(babies):
                if api.eq(b, y):
                    found = (k * s + j) % N
                    break
            if found is not None:
                break
        if found is None:
            return None
        out.append(found)
    return tuple(out)


def mdl_bsgs(T: int):
    return partial(mdl_bsgs_dl, T=T)


def random_collision_dl(api, rng, T: int):
    """Birthday tester: ceil(T/2) random g-side labels, the rest h-side shifts."""
    if T <= 0:
        return None
    N = api.order
    h = api.inputs[1]
    k = min((T + 1) // 2, N)
    rs = rng.sample(range(N), k)
    ls = [api.label(r) for r in rs]
    for r, w in zip(rs, ls):
        if api.eq(w, h):
            return r
    for i in range(min(T - k, k)):
        y = api.op(h, ls[i])
        for r, w in zip(rs, ls):
            if api.eq(w, y):
                return (r - rs[i]) % N
    return None


def random_collision(T: int):
    return partial(random_collision_dl, T=T)


def _subgroup_dlog(api, target, gen_exp: int, order: int, N: int) -> int | None:
    # target = g^(d*gen_exp) with 0 <= d < order
    s = math.isqrt(order - 1) + 1
    babies = [api.label((j * gen_exp) % N) for j in range(s)]
    step = api.label((s * gen_exp) % N)
    y = target
    for k in range(s):
        if k:
            y = api.op(y, step, 1)
        for j, b in enumerate(babies):
            if api.eq(b, y):
                return k * s + j
    return None


def pohlig_hellman_dl(api, rng, factorization=None):
    N = api.order
    fac = factorization or api.spec.factorization or factor_integer(N)
    h = api.inputs[1]
    residues, moduli = [], []
    for p, e in fac:
        pe = p**e
        cof = N // pe
        h_i = scalar_mul(api, h, cof)
        x_i = 0
        for k in range(e):
            t = h_i if x_i == 0 else api.op(h_i, api.label((x_i * cof) % N), 1)
            if e - 1 - k:
                t = scalar_mul(api, t, p ** (e - 1 - k))
            d = _subgroup_dlog(api, t, N // p, p, N)
            if d is None:
                return None
            x_i += d * p**k
        residues.append(x_i)
        moduli.append(pe)
    return crt(residues, moduli) if moduli else 0


def pohlig_hellman(factorization=None):
    return partial(pohlig_hellman_dl, factorization=factorization)


def generic_order_find(api, rng, n: int | None = None, budget: int | None = None):
    """Order of g by baby steps g^0..g^(s-1) against giant steps g^(k*s), s*s >= 2^n."""
    n = n or api.bit_length
    s = math.isqrt((1 << n) - 1) + 1
    used = 0

    def op(a, b, sign=0):
        nonlocal used
        if budget is not None and used >= budget:
            raise _OutOfBudget
        used += 1
        return api.op(a, b, sign)

    g = api.inputs[0]
    try:
        babies = [op(g, g, 1), g]
        while len(babies) < s:
            babies.append(op(babies[-1], g))
        babies = babies[:s]
        step = op(babies[-1], g) if s > 1 else g
        y = step
        for k in range(1, s + 1):
            if k > 1:
                y = op(y, step)
            for j in range(s - 1, -1, -1):
                if api.eq(babies[j], y):
                    return k * s - j
    except _OutOfBudget:
        return None
    return None


class _OutOfBudget(Exception):
    pass


def order_finder(n: int | None = None, budget: int | None = None):
    return partial(generic_order_find, n=n, budget=budget)


def omdl_adversary(api, rng, q: int, n: int, m: int, T: int):
    """Spend q DL queries on the first challenges and BSGS on the next n.

    Returns {challenge index: exponent} for the challenges it solved.
    """
    N = api.order
    chals = [api.chal() for _ in range(q + m)]
    out = {}
    for i in range(q):
        z = api.dl(chals[i])
        if z is not None:
            out[i] = z
    if n <= 0:
        return out
    s = (T + n - 1) // (n + 1)
    if s < 1:
        return out
    babies = [api.label(j) for j in range(s)]
    step = api.label(s % N) if s > 1 else None
    for i in range(q, q + n):
        z = _giant_search(api, babies, chals[i], step, s, N)
        if z is not None:
            out[i] = z
    return out


def omdl(q: int, n: int, m: int, T: int):
    return partial(omdl_adversary, q=q, n=n, m=m, T=T)


def gap_dl_adversary(api, rng, T: int, probes: int | None = None):
    """Square-probing with the DDH oracle, then BSGS with what is left of the budget."""
    N = api.order
    h = api.inputs[1]
    probes = T // 2 if probes is None else probes
    probes = max(0, min(probes, T - 1))
    for r in rng.sample(range(1, N), min(probes, N - 1)):
        if api.ddh(h, h, api.label(r * r % N)):
            return r if api.eq(api.label(r), h) else (-r) % N
    return bsgs_dl(api, rng, T - probes - 1)


def gap_dl(T: int, probes: int | None = None):
    return partial(gap_dl_adversary, T=T, probes=probes)


def gap_cdh_adversary(api, rng, T: int):
    """Find x by BSGS, then raise g^y to x; returns the output wire or None."""
    N = api.order
    spare = 2 * N.bit_length()
    x = bsgs_dl(api, rng, T - spare)
    if x is None:
        return None
    return scalar_mul(api, api.inputs[2], x)


def gap_cdh(T: int):
    return partial(gap_cdh_adversary, T=T)


def root_extractor(api, rng, e: int, budget: int | None = None):
    """Find the order, then output (e, (g^x)^(1/e)) when e is invertible."""
    N = generic_order_find(api, rng, budget=budget)
    if N is None or math.gcd(e, N) != 1:
        return None
    return e, scalar_mul(api, api.inputs[1], inv_mod(e, N))


def trivial_root_claim(api, rng, e: int = 2):
    return e, api.inputs[1]


def squaring_prover(api, rng, t: int):
    w = api.inputs[0]
    for _ in range(t):
        w = api.op(w, w)
    return w


def shortcut_prover(api, rng, t: int, budget: int | None = None):
    """Find the order N, then build g^(2^t mod N) directly."""
    N = generic_order_find(api, rng, budget=budget)
    if N is None:
        return None
    return scalar_mul(api, api.inputs[0], pow(2, t, N))
