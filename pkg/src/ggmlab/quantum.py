"""Exact statevector simulation of quantum generic group and ring algorithms.

Registers are qubits, qudits, element registers (basis g^0..g^(N-1) plus
the invalid element at index N) or ring registers (0..N-1 plus invalid).
A register stays classical, i.e. outside the amplitude tensor, until a gate
with a quantum input writes to it.  Element and ring gates are basis
permutations; the count of those touching a quantum register is Q.

``Machine(delegated=True)`` applies every gate through an explicit dense
unitary (``np.tensordot``) instead of index permutation, which is how the
delegated Alice/Bob run is checked against the monolithic one.
"""
from __future__ import annotations

import cmath
import itertools
import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .algebra import ContractViolation

AMPLITUDE_CAP = 1 << 22
NORM_TOL = 1e-10
DENSE_LIMIT = 1024

QUBIT, QUDIT, ELEMENT, RING = "Qubit", "Qudit", "Element", "Ring"


@dataclass
class Register:
    name: str
    kind: str
    dim: int
    value: int | None = 0
    quantum: bool = False


@dataclass
class DelegationTally:
    t: int = 1
    w: int = 1
    Q: int = 0
    C: int = 0
    quantum_eq: int = 0
    classical_eq: int = 0

    @property
    def per_gate(self) -> int:
        return max(1, math.ceil(math.log2(2 * self.t * self.w)))

    @property
    def qubits(self) -> int:
        return self.Q * self.per_gate

    def audit(self, log_m: float, eps: float) -> bool:
        """Interactive compression check 2 * Q * log2(2tw) >= log2|M| + log2(eps)."""
        if eps <= 0:
            return True
        return 2 * self.Q * math.log2(2 * self.t * self.w) >= log_m + math.log2(eps) - 1e-12


class Machine:
    def __init__(self, N: int, model: str = "group", delegated: bool = False, t: int = 1, w: int = 1,
                 cap: int = AMPLITUDE_CAP):
        self.N = N
        self.bot = N
        self.model = model
        self.delegated = delegated
        self.cap = cap
        self.regs: list[Register] = []
        self.axes: list[int] = []
        self.psi = np.ones((), dtype=complex)
        self.tally = DelegationTally(t, w)

    # -- registers ---------------------------------------------------------
    def _add(self, name, kind, dim, value) -> int:
        if not 0 <= value < dim:
            raise ContractViolation(f"initial value {value} outside register of dimension {dim}")
        self.regs.append(Register(name or f"r{len(self.regs)}", kind, dim, value))
        return len(self.regs) - 1

    def qubit(self, value: int = 0, name: str | None = None) -> int:
        return self._add(name, QUBIT, 2, value)

    def qubits(self, k: int, value: int = 0, name: str = "q") -> list[int]:
        return [self.qubit((value >> i) & 1, f"{name}{i}") for i in range(k)]

    def qudit(self, d: int, value: int = 0, name: str | None = None) -> int:
        return self._add(name, QUDIT, d, value)

    def element(self, x: int | None = 1, name: str | None = None) -> int:
        """Element register |g^x> (ring register |x> in ring mode); None is the invalid element."""
        kind = RING if self.model == "ring" else ELEMENT
        if self.model == "group" and x not in (1, None):
            raise ContractViolation("element registers start at g; use classical_label for g^x")
        if self.model == "ring" and x not in (0, 1, None):
            raise ContractViolation("ring registers start at 0 or 1")
        return self._add(name, kind, self.N + 1, self.bot if x is None else x % self.N)

    def _element_any(self, x: int | None, name=None) -> int:
        kind = RING if self.model == "ring" else ELEMENT
        return self._add(name, kind, self.N + 1, self.bot if x is None else x % self.N)

    def name(self, r: int) -> str:
        return self.regs[r].name

    def swap_names(self, a: int, b: int):
        """Relabel two registers; no gate is applied."""
        self.regs[a], self.regs[b] = self.regs[b], self.regs[a]
        self.axes = [b if r == a else a if r == b else r for r in self.axes]

    @property
    def size(self) -> int:
        return int(self.psi.size)

    def _promote(self, r: int):
        reg = self.regs[r]
        if reg.quantum:
            return
        if self.size * reg.dim > self.cap:
            raise ContractViolation("amplitude cap exceeded")
        onehot = np.zeros(reg.dim, dtype=complex)
        onehot[reg.value] = 1
        self.psi = np.multiply.outer(self.psi, onehot)
        self.axes.append(r)
        reg.quantum, reg.value = True, None

    def _axis(self, r: int) -> int:
        return self.axes.index(r)

    def _check_norm(self):
        n = float(np.vdot(self.psi, self.psi).real)
        if abs(n - 1) > NORM_TOL:
            raise ContractViolation(f"norm drifted to {n}")

    # -- core application --------------------------------------------------
    def _permute(self, regs, fn, targets, element: bool = True, is_eq: bool = False):
        regs = list(dict.fromkeys(regs))
        quantum_in = any(self.regs[r].quantum for r in regs)
        if element:
            if quantum_in:
                self.tally.Q += 1
                self.tally.quantum_eq += is_eq
            else:
                self.tally.C += 1
                self.tally.classical_eq += is_eq
        if not quantum_in:
            vals = fn(tuple(self.regs[r].value for r in regs))
            for r, v in zip(regs, vals):
                self.regs[r].value = v
            return
        for r in targets:
            self._promote(r)
        q = [r for r in regs if self.regs[r].quantum]
        dims = [self.regs[r].dim for r in q]
        D = math.prod(dims)
        const = {r: self.regs[r].value for r in regs if not self.regs[r].quantum}
        pos = {r: i for i, r in enumerate(q)}
        perm = np.empty(D, dtype=np.int64)
        for src, combo in enumerate(itertools.product(*[range(d) for d in dims])):
            full = tuple(combo[pos[r]] if r in pos else const[r] for r in regs)
            out = fn(full)
            for r, v, old in zip(regs, out, full):
                if r not in pos and v != old:
                    raise ContractViolation("gate wrote to a classical register it did not declare")
            perm[src] = np.ravel_multi_index(tuple(out[regs.index(r)] for r in q), dims)
        if len(np.unique(perm)) != D:
            raise ContractViolation("gate is not a basis permutation")
        self._apply(q, perm)
        self._check_norm()

    def _apply(self, q, perm):
        axes = [self._axis(r) for r in q]
        dims = [self.regs[r].dim for r in q]
        D = len(perm)
        if self.delegated and D <= DENSE_LIMIT:
            U = np.zeros((D, D), dtype=complex)
            U[perm, np.arange(D)] = 1
            self._apply_matrix(q, U)
            return
        moved = np.moveaxis(self.psi, axes, list(range(len(q))))
        shape = moved.shape
        flat = moved.reshape(D, -1)
        out = np.empty_like(flat)
        out[perm] = flat
        self.psi = np.moveaxis(out.reshape(shape), list(range(len(q))), axes)

    def _apply_matrix(self, q, U):
        dims = [self.regs[r].dim for r in q]
        k = len(q)
        axes = [self._axis(r) for r in q]
        T = U.reshape(dims + dims)
        res = np.tensordot(T, self.psi, axes=(list(range(k, 2 * k)), axes))
        # tensordot puts the gate's axes first, then the remaining axes in order
        rest = [a for a in range(self.psi.ndim) if a not in axes]
        order = axes + rest
        self.psi = np.moveaxis(res, list(range(len(order))), order)

    def unitary(self, regs, U):
        """Arbitrary unitary on qubit/qudit registers (free)."""
        for r in regs:
            if self.regs[r].kind not in (QUBIT, QUDIT):
                raise ContractViolation("qubit gates cannot touch element registers")
            self._promote(r)
        D = math.prod(self.regs[r].dim for r in regs)
        U = np.asarray(U, dtype=complex)
        if U.shape != (D, D):
            raise ContractViolation("unitary shape does not match the registers")
        self._apply_matrix(list(regs), U)
        self._check_norm()

    def h(self, r: int):
        self.unitary([r], np.array([[1, 1], [1, -1]]) / math.sqrt(2))

    def x(self, r: int):
        self.unitary([r], np.array([[0, 1], [1, 0]]))

    def qft(self, regs, inverse: bool = False):
        """QFT on qubits read little-endian (regs[0] is the low bit)."""
        D = 1 << len(regs)
        s = -1 if inverse else 1
        U = np.array([[cmath.exp(s * 2j * math.pi * u * a / D) for a in range(D)] for u in range(D)])
        self.unitary(list(reversed(regs)), U / math.sqrt(D))

    # -- element gates (group) --------------------------------------------
    def _valid(self, *vals) -> bool:
        return all(v != self.bot for v in vals)

    def op(self, b: int, X: int, Y: int):
        self._need(ELEMENT, X, Y)
        N = self.N
        self._permute([b, X, Y], lambda v: (v[0], (v[1] + v[0] * v[2]) % N if self._valid(v[1], v[2]) else v[1], v[2]), [X])

    def inv(self, b: int, X: int, Y: int):
        self._need(ELEMENT, X, Y)
        N = self.N
        self._permute([b, X, Y], lambda v: (v[0], (v[1] - v[0] * v[2]) % N if self._valid(v[1], v[2]) else v[1], v[2]), [X])

    def eq(self, b: int, X: int, Y: int):
        self._need(None, X, Y)
        self._permute([b, X, Y], lambda v: (v[0] ^ int(self._valid(v[1], v[2]) and v[1] == v[2]), v[1], v[2]),
                      [b], is_eq=True)

    def op_tw(self, b: int, T: int, W: int, Xs, Ys, sign: int = 0):
        """(t, w) group operation: X_T += b * Y_W, identity where the indexed registers coincide."""
        regs = list(dict.fromkeys([b, T, W, *Xs, *Ys]))
        N = self.N
        s = -1 if sign else 1

        def fn(v):
            val = dict(zip(regs, v))
            X, Y = Xs[val[T]], Ys[val[W]]
            if X == Y or not self._valid(val[X], val[Y]):
                return v
            val[X] = (val[X] + s * val[b] * val[Y]) % N
            return tuple(val[r] for r in regs)

        self._permute(regs, fn, list(Xs))

    # -- ring gates ---------------------------------------------------------
    def _need(self, kind, *regs):
        for r in regs:
            k = self.regs[r].kind
            if k not in (ELEMENT, RING) or (kind is not None and self.model == "group" and k != kind):
                raise ContractViolation(f"register {self.regs[r].name} has kind {k}")

    def add(self, b, X, Y):
        self._need(RING, X, Y)
        N = self.N
        self._permute([b, X, Y], lambda v: (v[0], (v[1] + v[0] * v[2]) % N if self._valid(v[1], v[2]) else v[1], v[2]), [X])

    def sub(self, b, X, Y):
        self._need(RING, X, Y)
        N = self.N
        self._permute([b, X, Y], lambda v: (v[0], (v[1] - v[0] * v[2]) % N if self._valid(v[1], v[2]) else v[1], v[2]), [X])

    def prodadd(self, b, X, Y, Z):
        self._need(RING, X, Y, Z)
        N = self.N

        def fn(v):
            bb, x, y, z = v
            if not self._valid(x, y, z):
                return v
            return (bb, (x + bb * y * z) % N, y, z)

        self._permute([b, X, Y, Z], fn, [X])

    def _invertible(self, z) -> bool:
        return z != self.bot and math.gcd(z, self.N) == 1

    def testinv(self, X, Cq):
        self._need(RING, X)
        self._permute([X, Cq], lambda v: (v[0], v[1] ^ int(self._invertible(v[0]))), [Cq])

    def invadd(self, b, X, Y, Z):
        """X += b * Y * Z^-1 when Z is invertible; an ancilla holds Test(Z) and is uncomputed."""
        self._need(RING, X, Y, Z)
        N = self.N
        c = self.qubit(0, "anc")
        before = self.tally.Q, self.tally.C
        self.testinv(Z, c)

        def fn(v):
            bb, cc, x, y, z = v
            if not (bb and cc and self._valid(x, y) and self._invertible(z)):
                return v
            return (bb, cc, (x + y * pow(z, -1, N)) % N, y, z)

        self._permute([b, c, X, Y, Z], fn, [X])
        self.testinv(Z, c)
        quantum = self.tally.Q > before[0]
        self.tally.Q, self.tally.C = before
        if quantum:
            self.tally.Q += 1
        else:
            self.tally.C += 1
        self._drop_zero(c)

    def _drop_zero(self, r: int):
        reg = self.regs[r]
        if reg.quantum:
            ax = self._axis(r)
            rest = np.take(self.psi, 1, axis=ax)
            if np.vdot(rest, rest).real > NORM_TOL:
                raise ContractViolation("ancilla not returned to |0>")
            self.psi = np.take(self.psi, 0, axis=ax)
            self.axes.remove(r)
        elif reg.value != 0:
            raise ContractViolation("ancilla not returned to |0>")
        reg.kind, reg.quantum, reg.value = "Dropped", False, None

    # -- measurement -------------------------------------------------------
    def probabilities(self, regs) -> dict[tuple[int, ...], float]:
        q = [r for r in regs if self.regs[r].quantum]
        probs = np.abs(self.psi) ** 2
        axes = [self._axis(r) for r in q]
        other = tuple(a for a in range(probs.ndim) if a not in axes)
        marg = probs.sum(axis=other) if other else probs
        if q:
            srt = sorted(axes)
            marg = np.transpose(marg, [srt.index(a) for a in axes])
        out = {}
        for combo in itertools.product(*[range(self.regs[r].dim) for r in q]):
            p = float(marg[combo]) if q else float(marg)
            if p > 1e-15:
                full = tuple(combo[q.index(r)] if r in q else self.regs[r].value for r in regs)
                out[full] = out.get(full, 0.0) + p
        return out

    def measure(self, regs, rng: random.Random) -> tuple[int, ...]:
        dist = sorted(self.probabilities(regs).items())
        u = rng.random()
        acc = 0.0
        outcome = dist[-1][0]
        for k, p in dist:
            acc += p
            if u < acc:
                outcome = k
                break
        for r, v in zip(regs, outcome):
            reg = self.regs[r]
            if reg.quantum:
                ax = self._axis(r)
                self.psi = np.take(self.psi, v, axis=ax)
                self.axes.remove(r)
                reg.quantum = False
            reg.value = v
        n = math.sqrt(float(np.vdot(self.psi, self.psi).real))
        self.psi = self.psi / n
        return outcome

    def classical_label(self, qubit_regs, rng: random.Random, name: str | None = None) -> int:
        """Measure qubits (little-endian) and append a classical element register |g^x> or |bot>."""
        bits = self.measure(qubit_regs, rng)
        x = sum(bit << i for i, bit in enumerate(bits))
        return self._element_any(x if x < self.N else None, name)

    def label_const(self, x: int, rng: random.Random, name: str | None = None) -> int:
        """Classical labeling of a known constant: prepare |x> on fresh qubits, then label."""
        k = max(1, math.ceil(math.log2(self.N)))
        return self.classical_label(self.qubits(k, x, "lbl"), rng, name)

    def state_vector(self) -> np.ndarray:
        """Amplitudes with quantum axes sorted by register index."""
        order = sorted(range(len(self.axes)), key=lambda i: self.axes[i])
        return np.transpose(self.psi, order) if order else self.psi


# ---------------------------------------------------------------------------
# classical-equality removal

class EqFreeApi:
    """Wraps a classical session; equalities are answered from polynomial identity alone."""

    def __init__(self, api):
        self._api = api
        self.order = api.order
        self.spec = api.spec
        self.inputs = api.inputs
        self.challenges = getattr(api, "challenges", [])
        inst_polys = api.transcript.input_polys
        self._polys = {w.id: tuple(c % api.order for c in p) for w, p in zip(api.inputs, inst_polys)}
        self.removed = 0

    def label(self, v):
        w = self._api.label(v)
        n = len(next(iter(self._polys.values())))
        self._polys[w.id] = (v % self.order,) + (0,) * (n - 1)
        return w

    def op(self, a, b, sign=0):
        w = self._api.op(a, b, sign)
        s = -1 if sign else 1
        self._polys[w.id] = tuple((u + s * v) % self.order for u, v in zip(self._polys[a.id], self._polys[b.id]))
        return w

    def eq(self, a, b):
        self.removed += 1
        return int(self._polys[a.id] == self._polys[b.id])


def remove_classical_equalities(alg):
    def run(api, rng):
        return alg(EqFreeApi(api), rng)
    return run


@dataclass
class EqRemovalReport:
    N: int
    p: int
    C: int
    m: int
    trials: int
    agree: int

    @property
    def rate(self) -> float:
        return self.agree / self.trials

    @property
    def bound(self) -> float:
        return 1 - (self.C + self.m + 1) ** 2 / (2 * self.p)

    @property
    def sigma(self) -> float:
        b = min(max(self.bound, 0.0), 1.0)
        return math.sqrt(b * (1 - b) / self.trials)

    @property
    def ok(self) -> bool:
        return self.rate >= self.bound - 3 * self.sigma


def eq_removal_experiment(alg, N: int, C: int, trials: int, seed: int, m: int = 1) -> EqRemovalReport:
    from .algebra import factor_integer
    from .oracle import GroupSpec, Instance, dl_instance, run_algorithm
    from .rng import derive, stream

    p = min(factor_integer(N).primes())
    agree = 0
    for i in range(trials):
        x = stream(seed, "instance", i).randrange(N)
        inst = dl_instance(N, x)
        aseed = derive(seed, "algorithm", i)
        a, _ = run_algorithm(alg, inst, aseed)
        b, _ = run_algorithm(remove_classical_equalities(alg), inst, aseed)
        agree += a == b
    return EqRemovalReport(N, p, C, m, trials, agree)


# ---------------------------------------------------------------------------
# Shor demonstrations

@dataclass
class ShorResult:
    answer: int | None
    success: float
    Q: int
    C: int
    quantum_eq: int
    distribution: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def audit(self, log_m: float) -> bool:
        t = DelegationTally(Q=self.Q)
        return t.audit(log_m, self.success)


def _dl_post(u: int, v: int, N: int, M: int) -> int:
    k = round(N * u / M) % N
    l = round(N * v / M) % N
    if k == 0:
        return 0
    return l * pow(k, -1, N) % N


def shor_dl_qggm(N: int, x: int, seed: int = 0, delegated: bool = False) -> ShorResult:
    """DL in a prime-order group with controlled group operations and no equality gates."""
    if N > 64:
        raise ContractViolation("shor_dl_qggm supports N <= 64")
    rng = random.Random(seed)
    n = max(1, math.ceil(math.log2(N)))
    M = 1 << n
    m = Machine(N, "group", delegated=delegated)
    h = m.label_const(x, rng, "h")
    a = m.qubits(n, 0, "a")
    b = m.qubits(n, 0, "b")
    for r in a + b:
        m.h(r)
    acc = m.label_const(0, rng, "acc")
    one = m.qubit(1, "one")
    G = [m.label_const(pow(2, i, N), rng, f"G{i}") for i in range(n)]
    Hs = [h]
    for i in range(1, n):
        cp = m.label_const(0, rng, f"H{i}")
        m.op(one, cp, Hs[-1])
        m.op(one, cp, Hs[-1])
        Hs.append(cp)
    for i in range(n):
        m.op(a[i], acc, G[i])
        m.op(b[i], acc, Hs[i])
    m.qft(a, inverse=True)
    m.qft(b, inverse=True)
    probs = m.probabilities(a + b)
    dist: dict[int, float] = {}
    for bits, p in probs.items():
        u = sum(bit << i for i, bit in enumerate(bits[:n]))
        v = sum(bit << i for i, bit in enumerate(bits[n:]))
        z = _dl_post(u, v, N, M)
        dist[z] = dist.get(z, 0.0) + p
    best = max(dist, key=dist.get)
    return ShorResult(best, dist.get(x % N, 0.0), m.tally.Q, m.tally.C, m.tally.quantum_eq, dist,
                      {"machine": m})


def multiplicative_order(a: int, N: int) -> int:
    if math.gcd(a, N) != 1:
        raise ContractViolation("a is not invertible mod N")
    r, v = 1, a % N
    while v != 1 % N:
        v = v * a % N
        r += 1
    return r


def _order_post(u: int, L: int, N: int, a: int) -> int | None:
    frac = Fraction(u, 1 << L).limit_denominator(N)
    r = frac.denominator
    return r if pow(a, r, N) == 1 % N else None


def factoring_output_ok(Z: int, N: int) -> bool:
    """Validator for an integer that should share a nontrivial factor with N."""
    return 1 < math.gcd(Z, N) < N


def shor_order_qgrm(N: int, a: int, L: int | None = None, seed: int = 0) -> ShorResult:
    """Order finding with controlled multiplication built from ring gates.

    Each controlled multiply by c on y uses a work register t = 0 and a
    multiplier register m = 1:
      Add(b, m, c-1); Sub(1, m2, m); ProdAdd(1, t, y, m);
      InvAdd(1, y, t, m2); Add(1, m2, m); Sub(b, m, c-1)
    leaves t = c^b y, y = 0, then y and t swap names.
    """
    if N > 21:
        raise ContractViolation("shor_order_qgrm supports N <= 21")
    if math.gcd(a, N) != 1:
        raise ContractViolation("a is not invertible mod N")
    rng = random.Random(seed)
    L = L or max(1, math.ceil(math.log2(N)))
    m = Machine(N, "ring")
    ctrl = m.qubits(L, 0, "c")
    for r in ctrl:
        m.h(r)
    one = m.qubit(1, "one")
    y = m.element(1, "y")
    t = m.element(0, "t")
    mul = m.element(1, "m")
    neg = m.element(0, "m2")
    for i in range(L):
        c = pow(a, 1 << i, N)
        K = m.label_const((c - 1) % N, rng, f"K{i}")
        m.add(ctrl[i], mul, K)
        m.sub(one, neg, mul)
        m.prodadd(one, t, y, mul)
        m.invadd(one, y, t, neg)
        m.add(one, neg, mul)
        m.sub(ctrl[i], mul, K)
        m.swap_names(y, t)
    m.qft(ctrl, inverse=True)
    probs = m.probabilities(ctrl)
    order = multiplicative_order(a, N)
    dist: dict[int | None, float] = {}
    for bits, p in probs.items():
        u = sum(bit << i for i, bit in enumerate(bits))
        r = _order_post(u, L, N, a)
        dist[r] = dist.get(r, 0.0) + p
    best = max((k for k in dist if k is not None), key=dist.get, default=None)
    extra = {"order": order}
    if order % 2 == 0:
        Z = pow(a, order // 2) - 1
        extra["Z"] = Z
        extra["factor_ok"] = factoring_output_ok(Z, N)
    return ShorResult(best, dist.get(order, 0.0), m.tally.Q, m.tally.C, m.tally.quantum_eq, dist, extra)


# ---------------------------------------------------------------------------
# JSON programs

PROGRAM_SCHEMA = """\
{
  "order": N,                    # group or ring order
  "model": "group" | "ring",
  "seed": 0,                     # randomness for measurements
  "registers": [ {"name": "a0", "kind": "Qubit" | "Qudit" | "Element" | "Ring",
                  "init": 0, "dim": d} ],         # dim only for Qudit
  "gates": [ {"gate": "h" | "x" | "qft" | "iqft", "regs": [names]},
             {"gate": "label", "regs": [qubit names], "out": name},
             {"gate": "op" | "inv" | "eq" | "add" | "sub", "regs": [b, X, Y]},
             {"gate": "prodadd" | "invadd", "regs": [b, X, Y, Z]},
             {"gate": "testinv", "regs": [X, C]} ],
  "measure": [names]            # registers whose joint distribution is reported
}
"""


def run_program(program: dict | str, delegated: bool = False):
    """Run a JSON program; returns (machine, distribution over the measured registers)."""
    if isinstance(program, str):
        program = json.loads(program)
    N = int(program["order"])
    m = Machine(N, program.get("model", "group"), delegated=delegated)
    rng = random.Random(program.get("seed", 0))
    ids: dict[str, int] = {}
    for spec in program.get("registers", []):
        kind, name, init = spec["kind"], spec["name"], spec.get("init", 0)
        if kind == QUBIT:
            ids[name] = m.qubit(init, name)
        elif kind == QUDIT:
            ids[name] = m.qudit(int(spec["dim"]), init, name)
        elif kind in (ELEMENT, RING):
            ids[name] = m.element(init, name)
        else:
            raise ContractViolation(f"unknown register kind {kind}")
    gates = {"h": m.h, "x": m.x, "op": m.op, "inv": m.inv, "eq": m.eq, "add": m.add, "sub": m.sub,
             "prodadd": m.prodadd, "invadd": m.invadd, "testinv": m.testinv}
    for g in program.get("gates", []):
        name = g["gate"]
        regs = [ids[r] for r in g.get("regs", [])]
        if name in ("qft", "iqft"):
            m.qft(regs, inverse=name == "iqft")
        elif name == "label":
            ids[g["out"]] = m.classical_label(regs, rng, g["out"])
        elif name in ("h", "x"):
            for r in regs:
                gates[name](r)
        elif name in gates:
            gates[name](*regs)
        else:
            raise ContractViolation(f"unknown gate {name}")
    meas = [ids[r] for r in program.get("measure", [])]
    return m, (m.probabilities(meas) if meas else {})
