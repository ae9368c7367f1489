"""Generic groups with a smoothness oracle, and a basic index calculus.

Two flavours of session:

* Concrete: the multiplicative group mod a prime q with a primitive root g,
  order N = q - 1; an element is smooth when its canonical representative
  factors over the primes <= B, and the hidden factor-base exponents are
  the true discrete logs of those primes.
* Idealized: prime order N, uniform hidden z, and a smooth set S formed as
  the image of exponent vectors read off random B-smooth integers.

Polynomials live over the variables (X, Z1..Zb); relations are kept in one
span per prime factor of N so composite orders still classify sensibly.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field

from .algebra import (
    ContractViolation, SingularSystemError, SpanBasisModP, SpanBasisZ, crt, factor_integer,
    primes_upto, smooth_exponents,
)
from .rng import derive, stream


def is_primitive_root(g: int, q: int) -> bool:
    N = q - 1
    return all(pow(g, N // p, q) != 1 for p in factor_integer(N).primes())


def primitive_root(q: int) -> int:
    for g in range(2, q):
        if is_primitive_root(g, q):
            return g
    raise ContractViolation(f"{q} has no primitive root")


@dataclass
class FactorBase:
    B: int
    primes: tuple[int, ...]
    z: tuple[int, ...]

    @property
    def b(self) -> int:
        return len(self.primes)

    def to_json(self) -> str:
        return json.dumps({"B": self.B, "primes": list(self.primes), "z": list(self.z)})


@dataclass(frozen=True)
class SWire:
    id: int


class SmoothSession:
    """Element gates plus smooth-test and smoothing gates over a hidden (x, z)."""

    def __init__(self, N: int, B: int, x: int, *, q: int | None = None, g: int | None = None,
                 z=None, smooth_set: dict | None = None):
        self.order = N
        self.mode = "Concrete" if q is not None else "Idealized"
        self.q, self.g = q, g
        primes = tuple(primes_upto(B))
        self.fb = FactorBase(B, primes, tuple(z) if z is not None else (0,) * len(primes))
        self.x = x % N
        self._smooth = smooth_set
        self.nvars = 1 + self.fb.b
        self.moduli = factor_integer(N).primes()
        self.spans = {p: SpanBasisModP(p, self.nvars + 1) for p in self.moduli}
        self._vals: list[int | None] = []
        self._polys: list[tuple[int, ...] | None] = []
        self._pairs: set = set()
        self.tally = {"labels": 0, "group_ops": 0, "E": 0, "smooth_tests": 0, "smoothings": 0}
        self.relations: list[tuple[int, ...]] = []
        self.informative = 0
        one = [0] * (self.nvars + 1)
        one[0] = 1
        X = [0] * (self.nvars + 1)
        X[1] = 1
        self.inputs = (self._new(1, tuple(one)), self._new(self.x, tuple(X)))

    # -- bookkeeping -------------------------------------------------------
    def _new(self, v, poly) -> SWire:
        self._vals.append(v)
        self._polys.append(poly)
        return SWire(len(self._vals) - 1)

    def value(self, w: SWire):
        return self._vals[w.id]

    def representative(self, v: int) -> int:
        return pow(self.g, v, self.q)

    def truth(self) -> tuple[int, ...]:
        return (self.x,) + self.fb.z

    def _record(self, rel) -> bool:
        rel = tuple(c % self.order for c in rel)
        val = (rel[0] + sum(c * t for c, t in zip(rel[1:], self.truth()))) % self.order
        if val:
            raise ContractViolation("recorded relation does not vanish at the hidden point")
        self.relations.append(rel)
        new = False
        for p, span in self.spans.items():
            new |= span.insert(tuple(c % p for c in rel))
        self.informative += new
        return new

    @property
    def rank(self) -> int:
        return max(s.rank for s in self.spans.values())

    # -- element gates -----------------------------------------------------
    def label(self, r: int) -> SWire:
        self.tally["labels"] += 1
        poly = [0] * (self.nvars + 1)
        poly[0] = r % self.order
        return self._new(r % self.order, tuple(poly))

    def op(self, a: SWire, b: SWire, sign: int = 0) -> SWire:
        self.tally["group_ops"] += 1
        va, vb = self.value(a), self.value(b)
        pa, pb = self._polys[a.id], self._polys[b.id]
        if va is None or vb is None:
            return self._new(None, None)
        s = -1 if sign else 1
        poly = tuple((u + s * w) % self.order for u, w in zip(pa, pb))
        return self._new((va + s * vb) % self.order, poly)

    def eq(self, a: SWire, b: SWire) -> int:
        key = (min(a.id, b.id), max(a.id, b.id))
        if key in self._pairs:
            raise ContractViolation("equality gate repeated")
        self._pairs.add(key)
        self.tally["E"] += 1
        va, vb = self.value(a), self.value(b)
        ans = int(va is not None and va == vb)
        if ans:
            self._record(tuple(u - w for u, w in zip(self._polys[a.id], self._polys[b.id])))
        return ans

    # -- smoothness gates --------------------------------------------------
    def exponents(self, v: int):
        if self.mode == "Concrete":
            return smooth_exponents(self.representative(v), self.fb.primes)
        return self._smooth.get(v)

    def smooth_test(self, w: SWire) -> int:
        self.tally["smooth_tests"] += 1
        v = self.value(w)
        return int(v is not None and self.exponents(v) is not None)

    def smoothing(self, w: SWire):
        """Exponent vector over the factor base, or None; records P - sum c_i Z_i."""
        self.tally["smoothings"] += 1
        v = self.value(w)
        if v is None:
            return None
        c = self.exponents(v)
        if c is None:
            return None
        rel = list(self._polys[w.id])
        for i, ci in enumerate(c):
            rel[2 + i] -= ci
        self.last_informative = self._record(rel)
        return c


def concrete_session(q: int, B: int, x: int, g: int | None = None) -> SmoothSession:
    g = g or primitive_root(q)
    logs = {}
    acc = 1
    for e in range(q - 1):
        logs.setdefault(acc, e)
        acc = acc * g % q
    z = tuple(logs[p % q] for p in primes_upto(B))
    return SmoothSession(q - 1, B, x, q=q, g=g, z=z)


def smooth_integer_vector(N: int, primes, rng: random.Random, max_tries: int = 1_000_000):
    for _ in range(max_tries):
        c = smooth_exponents(rng.randint(1, N), primes)
        if c is not None:
            return c
    raise ContractViolation("no smooth integer found")


def idealized_session(N: int, B: int, p_S: float, x: int, rng: random.Random) -> SmoothSession:
    primes = primes_upto(B)
    z = tuple(rng.randrange(N) for _ in primes)
    S: dict[int, tuple[int, ...]] = {}
    for _ in range(round(p_S * N)):
        c = smooth_integer_vector(N, primes, rng)
        S.setdefault(sum(ci * zi for ci, zi in zip(c, z)) % N, c)
    return SmoothSession(N, B, x, z=z, smooth_set=S)


def smooth_density(sess: SmoothSession) -> float:
    """|S| / N, counted exhaustively."""
    if sess.mode == "Idealized":
        return len(sess._smooth) / sess.order
    return sum(smooth_exponents(r, sess.fb.primes) is not None for r in range(1, sess.q)) / sess.order


# ---------------------------------------------------------------------------
# rates

@dataclass
class SmoothRates:
    samples: int
    density: float
    fresh: int
    cumulative: int

    @property
    def fresh_rate(self) -> float:
        return self.fresh / self.samples

    @property
    def cumulative_rate(self) -> float:
        return self.cumulative / self.samples

    @property
    def sigma(self) -> float:
        d = self.density
        return math.sqrt(d * (1 - d) / self.samples) if self.samples else 0.0

    @property
    def fresh_ok(self) -> bool:
        return abs(self.fresh_rate - self.density) <= 3 * self.sigma

    @property
    def cumulative_ok(self) -> bool:
        return self.cumulative_rate <= self.density + 3 * self.sigma


def smooth_rate_stats(sess: SmoothSession, samples: int, rng: random.Random) -> SmoothRates:
    """Smoothing on fresh uniform elements g^r h^e.

    ``fresh`` counts samples informative against an empty zero set (two-sided
    comparison with the density); ``cumulative`` counts those informative
    against everything recorded so far in this session (one-sided).
    """
    N = sess.order
    fresh = cum = 0
    h = sess.inputs[1]
    for _ in range(samples):
        w = sess.op(sess.label(rng.randrange(N)), _power(sess, h, rng.randrange(N)))
        probe = {p: SpanBasisModP(p, sess.nvars + 1) for p in sess.moduli}
        before = len(sess.relations)
        c = sess.smoothing(w)
        if c is None:
            continue
        cum += sess.last_informative
        rel = sess.relations[before]
        fresh += any(s.insert(tuple(v % p for v in rel)) for p, s in probe.items())
    return SmoothRates(samples, smooth_density(sess), fresh, cum)


def _power(sess: SmoothSession, w: SWire, k: int) -> SWire:
    if k == 0:
        return sess.op(w, w, 1)
    acc = w
    for bit in bin(k)[3:]:
        acc = sess.op(acc, acc)
        if bit == "1":
            acc = sess.op(acc, w)
    return acc


# ---------------------------------------------------------------------------
# subspace counts

@dataclass
class AffineSpace:
    basis: tuple[tuple[int, ...], ...]
    offset: tuple[int, ...]

    @classmethod
    def coordinate(cls, b: int, coords) -> "AffineSpace":
        rows = tuple(tuple(int(j == i) for j in range(b)) for i in coords)
        return cls(rows, (0,) * b)

    def membership(self, N: int):
        b = len(self.offset)
        span = SpanBasisZ(b)
        for row in self.basis:
            span.insert(tuple(v % N for v in row))
        for j in range(b):
            span.insert(tuple(N if i == j else 0 for i in range(b)))
        return lambda c: span.contains(tuple(ci - oi for ci, oi in zip(c, self.offset)))


def subspace_smooth_count(sess: SmoothSession, V: AffineSpace, samples: int | None = None,
                          rng: random.Random | None = None) -> float:
    """|S_V| / N; exhaustive when ``samples`` is None, Monte Carlo otherwise."""
    N = sess.order
    inside = V.membership(N)

    def hit(v):
        c = sess.exponents(v)
        return c is not None and inside(c)

    if samples is None:
        values = sess._smooth if sess.mode == "Idealized" else range(N)
        return sum(hit(v) for v in values) / N
    rng = rng or random.Random(0)
    return sum(hit(rng.randrange(N)) for _ in range(samples)) / samples


def random_subspace(b: int, rank: int, N: int, rng: random.Random) -> AffineSpace:
    return AffineSpace(tuple(tuple(rng.randrange(N) for _ in range(b)) for _ in range(rank)), (0,) * b)


# ---------------------------------------------------------------------------
# index calculus

def _solve_prime_power(rows, p: int, k: int):
    """Solve rows (c_0 | c_1..c_n) meaning c_0 + sum c_i u_i = 0 mod p^k; None if underdetermined."""
    M = p**k
    n = len(rows[0]) - 1
    A = [[v % M for v in r[1:]] + [(-r[0]) % M] for r in rows]
    piv_rows = []
    r = 0
    for col in range(n):
        sel = next((i for i in range(r, len(A)) if A[i][col] % p), None)
        if sel is None:
            return None
        A[r], A[sel] = A[sel], A[r]
        inv = pow(A[r][col], -1, M)
        A[r] = [v * inv % M for v in A[r]]
        for i in range(len(A)):
            if i != r and A[i][col]:
                f = A[i][col]
                A[i] = [(u - f * w) % M for u, w in zip(A[i], A[r])]
        piv_rows.append(r)
        r += 1
    return [A[i][n] for i in piv_rows]


@dataclass
class IndexCalculusResult:
    x: int | None
    relations: int
    attempts: int
    verified: bool
    tally: dict = field(default_factory=dict)


def index_calculus_dl(sess: SmoothSession, budget: int, rng: random.Random) -> IndexCalculusResult:
    """Collect g^r h^e smooth relations, then solve for (x, z) mod every prime power of N."""
    if sess.mode != "Concrete":
        raise ContractViolation("index calculus needs a concrete session")
    N = sess.order
    fac = list(factor_integer(N))
    g, h = sess.inputs
    rows = []
    b = sess.fb.b
    attempts = 0
    x = None
    while attempts < budget:
        attempts += 1
        r, e = rng.randrange(N), rng.randrange(1, N)
        w = sess.op(sess.label(r), _power(sess, h, e))
        c = sess.smoothing(w)
        if c is None:
            continue
        # r + e*X - sum c_i Z_i = 0, unknowns ordered (Z_1..Z_b, X)
        rows.append((r,) + tuple(-ci for ci in c) + (e,))
        if len(rows) <= b:
            continue
        parts = []
        for p, k in fac:
            sol = _solve_prime_power(rows, p, k)
            if sol is None:
                break
            parts.append(sol[-1])
        else:
            cand = crt(parts, [p**k for p, k in fac])
            if pow(sess.g, cand, sess.q) == sess.representative(sess.x):
                x = cand
                break
            raise SingularSystemError("inconsistent relation system")
    return IndexCalculusResult(x, len(rows), attempts, x is not None, dict(sess.tally))


def index_calculus(q: int, B: int, x: int, budget: int, seed: int, trial: int = 0) -> IndexCalculusResult:
    sess = concrete_session(q, B, x)
    return index_calculus_dl(sess, budget, stream(seed, "algorithm", trial))
