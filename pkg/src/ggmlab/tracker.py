"""Polynomial lists, zero sets, collision classification and oracle-free replay."""
from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from .algebra import (
    ContractViolation, LinPolyInt, LinPolyModN, SpanBasisModP, SpanBasisZ,
    is_prime, solve_square_system_mod,
)
from .oracle import (
    CHAL, DDH, DL, EQUALITY, GROUP_OP, LABEL, BudgetExhausted, GateRecord,
    PublicInstance, Wire,
)


class CollisionClass(enum.Enum):
    TRIVIAL = "trivial"
    PREDICTABLE = "predictable"
    INFORMATIVE = "informative"


class ReplayError(RuntimeError):
    """Replay could not follow the encoding's directives (a decode failure)."""


# ---------------------------------------------------------------------------
# polynomial list

def _sub(u, v, mod):
    if mod is None:
        return tuple(a - b for a, b in zip(u, v))
    return tuple((a - b) % mod for a, b in zip(u, v))


def _add(u, v, mod):
    if mod is None:
        return tuple(a + b for a, b in zip(u, v))
    return tuple((a + b) % mod for a, b in zip(u, v))


class PolyList:
    """Symbolic value of every element wire, in creation order.

    ``modulus=None`` selects integer polynomials (unknown-order groups).
    A wire holding the invalid element maps to ``None``.
    """

    def __init__(self, modulus: int | None, nvars: int, chal_offset: int = 0):
        self.modulus = modulus
        self.nvars = nvars
        self.chal_offset = chal_offset
        self._polys: dict[int, tuple[int, ...] | None] = {}
        self.rows: list[int] = []
        self._chals = 0

    @classmethod
    def from_transcript(cls, tr) -> "PolyList":
        pl = cls(tr.modulus, tr.nvars, tr.chal_offset)
        for wid, poly in zip(tr.input_wires, tr.input_polys):
            pl.add(wid, poly)
        return pl

    @property
    def counter(self) -> int:
        return len(self.rows)

    def add(self, wid: int, coeffs: Sequence[int] | None):
        if coeffs is not None:
            coeffs = tuple(coeffs) if self.modulus is None else tuple(c % self.modulus for c in coeffs)
            if len(coeffs) != self.nvars + 1:
                raise ContractViolation("polynomial has the wrong number of variables")
        self._polys[wid] = coeffs
        self.rows.append(wid)

    def poly(self, wid: int):
        try:
            return self._polys[wid]
        except KeyError:
            raise ContractViolation(f"unknown wire id {wid}") from None

    def as_linpoly(self, wid: int):
        c = self.poly(wid)
        if c is None:
            return None
        return LinPolyInt(c) if self.modulus is None else LinPolyModN(self.modulus, c)

    def track(self, rec: GateRecord) -> "PolyList":
        if rec.kind == LABEL:
            v = rec.inputs[0]
            if self.modulus is not None and not 0 <= v < self.modulus:
                self.add(rec.output, None)
            else:
                self.add(rec.output, (v,) + (0,) * self.nvars)
        elif rec.kind == GROUP_OP:
            a, b = self.poly(rec.inputs[0]), self.poly(rec.inputs[1])
            if a is None or b is None:
                self.add(rec.output, None)
            else:
                self.add(rec.output, (_sub if rec.sign else _add)(a, b, self.modulus))
        elif rec.kind == CHAL:
            self._chals += 1
            v = [0] * (self.nvars + 1)
            v[self.chal_offset + self._chals] = 1
            self.add(rec.output, v)
        else:
            for wid in rec.inputs:
                self.poly(wid)
        return self

    def relation(self, i: int, j: int):
        a, b = self.poly(i), self.poly(j)
        if a is None or b is None:
            return None
        return _sub(a, b, self.modulus)

    def dl_relation(self, wid: int, z: int):
        a = self.poly(wid)
        return None if a is None else _sub(a, (z,) + (0,) * self.nvars, self.modulus)

    def ddh_relation(self, i: int, j: int, k: int):
        a, b, c = self.poly(i), self.poly(j), self.poly(k)
        if None in (a, b, c):
            return None
        return Quad.from_product(a, b, c, self.modulus)


def track_gate(plist: PolyList, record: GateRecord) -> PolyList:
    return plist.track(record)


@dataclass(frozen=True)
class Quad:
    """Quadratic relation sum c_ij * V_i * V_j with V_0 = 1 (i <= j)."""

    terms: tuple[tuple[tuple[int, int], int], ...]
    modulus: int | None

    @classmethod
    def from_product(cls, a, b, c, modulus):
        d: dict[tuple[int, int], int] = {}
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        key = (i, j) if i <= j else (j, i)
                        d[key] = d.get(key, 0) + ai * bj
        for i, ci in enumerate(c):
            d[(0, i)] = d.get((0, i), 0) - ci
        if modulus is not None:
            d = {k: v % modulus for k, v in d.items()}
        return cls(tuple(sorted((k, v) for k, v in d.items() if v)), modulus)

    def degree2(self) -> bool:
        return any(i > 0 and j > 0 for (i, j), _ in self.terms)

    def linear_part(self, nvars: int) -> tuple[int, ...]:
        v = [0] * (nvars + 1)
        for (i, j), c in self.terms:
            v[j if i == 0 else i] += c
        return tuple(v)

    def is_zero(self) -> bool:
        return not self.terms

    def evaluate(self, values: Sequence[int]) -> int:
        vals = (1,) + tuple(values)
        s = sum(c * vals[i] * vals[j] for (i, j), c in self.terms)
        return s if self.modulus is None else s % self.modulus

    def substitute(self, var: int, value: int) -> "Quad":
        d: dict[tuple[int, int], int] = {}
        for (i, j), c in self.terms:
            if i == var and j == var:
                key, c = (0, 0), c * value * value
            elif i == var:
                key, c = (0, j), c * value
            elif j == var:
                key, c = (0, i), c * value
            else:
                key = (i, j)
            key = (min(key), max(key))
            d[key] = d.get(key, 0) + c
        if self.modulus is not None:
            d = {k: v % self.modulus for k, v in d.items()}
        return Quad(tuple(sorted((k, v) for k, v in d.items() if v)), self.modulus)

    def univariate(self, var: int) -> tuple[int, int, int]:
        """(c0, c1, c2) when the relation only involves ``var``."""
        c = [0, 0, 0]
        for (i, j), v in self.terms:
            deg = (i == var) + (j == var)
            if deg != (i > 0) + (j > 0):
                raise ContractViolation("relation involves other variables")
            c[deg] += v
        return tuple(c)


def relation_from_quad(q: Quad, nvars: int):
    """Linear coefficient vector if the quadratic part vanishes, else the Quad itself."""
    return q if q.degree2() else q.linear_part(nvars)


# ---------------------------------------------------------------------------
# zero set

class ZeroSet:
    """Relations known to vanish at the hidden point, with a span-membership test.

    Mod-prime mode keeps a row-reduced basis over Z_p; integer mode keeps a
    Hermite basis over Z.  Quadratic relations (from DDH answers) are stored
    separately: they never enter the linear span.
    """

    def __init__(self, modulus: int | None, nvars: int):
        if modulus is not None and not is_prime(modulus):
            raise ContractViolation("known-order span logic needs a prime modulus")
        self.modulus = modulus
        self.nvars = nvars
        self.basis = SpanBasisZ(nvars + 1) if modulus is None else SpanBasisModP(modulus, nvars + 1)
        self.collisions: list[tuple[int, ...]] = []
        self.quads: list[Quad] = []

    @property
    def mode(self) -> str:
        return "Integer" if self.modulus is None else "ModPrime"

    @classmethod
    def for_transcript(cls, tr) -> "ZeroSet":
        return cls(tr.modulus, tr.nvars)

    @property
    def rank(self) -> int:
        return self.basis.rank

    def contains(self, rel) -> bool:
        if isinstance(rel, Quad):
            if rel.degree2():
                return rel.is_zero()
            rel = rel.linear_part(self.nvars)
        return not any(rel) or self.basis.contains(rel)

    def classify(self, rel) -> CollisionClass:
        if isinstance(rel, Quad):
            if rel.is_zero():
                return CollisionClass.TRIVIAL
            if rel.degree2():
                self.quads.append(rel)
                return CollisionClass.INFORMATIVE
            rel = rel.linear_part(self.nvars)
        if not any(rel):
            return CollisionClass.TRIVIAL
        if self.basis.insert(rel):
            self.collisions.append(tuple(rel))
            return CollisionClass.INFORMATIVE
        return CollisionClass.PREDICTABLE

    def predicts_dl(self, poly) -> bool:
        """True if the discrete log of an element with this polynomial is already determined."""
        if not any(poly[1:]):
            return True
        if self.modulus is None:
            return False
        b = self.basis.copy()
        b.insert((1,) + (0,) * self.nvars)
        return b.contains((0,) + tuple(poly[1:]))


def classify_collision(zs: ZeroSet, Pi, Pj) -> CollisionClass:
    a = Pi.coeffs if hasattr(Pi, "coeffs") else tuple(Pi)
    b = Pj.coeffs if hasattr(Pj, "coeffs") else tuple(Pj)
    if isinstance(Pi, LinPolyModN) and zs.modulus is None or isinstance(Pi, LinPolyInt) and zs.modulus is not None:
        raise ContractViolation("mode mismatch between polynomial and zero set")
    return zs.classify(_sub(a, b, zs.modulus))


# ---------------------------------------------------------------------------
# live-transcript analysis

@dataclass
class CollisionEvent:
    seq: int
    kind: str
    ordinal: int | None
    cand: int | None
    relation: Any
    cls: CollisionClass
    answer: int | None = None


@dataclass
class Analysis:
    plist: PolyList
    zeroset: ZeroSet | None
    events: list[CollisionEvent]

    def informative(self, kinds: Iterable[str] = (EQUALITY, DDH, DL)) -> list[CollisionEvent]:
        kinds = set(kinds)
        return [e for e in self.events if e.cls is CollisionClass.INFORMATIVE and e.kind in kinds]


def analyze(transcript) -> Analysis:
    """Rebuild the polynomial list and classify every collision of a live run."""
    pl = PolyList.from_transcript(transcript)
    zs = ZeroSet.for_transcript(transcript)
    events: list[CollisionEvent] = []
    n_eq = n_cand = 0
    for rec in transcript.records:
        if rec.kind == EQUALITY:
            ordinal, cand = n_eq, n_cand
            n_eq += 1
            n_cand += 1
            if rec.answer:
                rel = pl.relation(*rec.inputs)
                events.append(CollisionEvent(rec.seq, EQUALITY, ordinal, cand, rel, zs.classify(rel)))
        elif rec.kind == DDH:
            cand = n_cand
            n_cand += 1
            if rec.answer:
                rel = relation_from_quad(pl.ddh_relation(*rec.inputs), pl.nvars)
                events.append(CollisionEvent(rec.seq, DDH, None, cand, rel, zs.classify(rel)))
        elif rec.kind == DL:
            if rec.answer is not None:
                rel = pl.dl_relation(rec.inputs[0], rec.answer)
                if rel is not None:
                    events.append(CollisionEvent(rec.seq, DL, None, None, rel, zs.classify(rel), rec.answer))
        else:
            pl.track(rec)
    return Analysis(pl, zs, events)


# ---------------------------------------------------------------------------
# oracle-free replay

class _Halt(Exception):
    pass


class SymbolicSession:
    """Answers every query from polynomials alone (no hidden values).

    An equality/DDH query is answered 1 iff its relation lies in the current
    zero-set span, or if the query is one of ``directives``; directive answers
    are inserted into the zero set.  DL queries are answered from
    ``dl_answers`` in order.  ``by`` says how directives are numbered:
    ``"seq"`` (transcript index), ``"eq"`` (among equality gates) or
    ``"cand"`` (among equality and DDH gates).
    """

    def __init__(self, public: PublicInstance, directives: Sequence[int] = (), by: str = "seq",
                 dl_answers: Sequence[int] = (), max_gates: int | None = None,
                 halt: bool = True, identity_only: bool = False):
        spec = public.spec
        self.spec = spec
        self.order = spec.order
        self.bit_length = spec.bit_length
        self.max_gates = max_gates
        self._pub = public
        mod = spec.order if spec.known_order else None
        self.plist = PolyList(mod, public.nvars, public.chal_offset)
        self.inputs = tuple(Wire(i) for i in range(len(public.input_polys)))
        for w, poly in zip(self.inputs, public.input_polys):
            self.plist.add(w.id, poly)
        self._next = len(self.inputs)
        self.zeroset = None if identity_only else ZeroSet(mod, public.nvars)
        self.directives = list(directives)
        self._pending = set(self.directives)
        if len(self._pending) != len(self.directives):
            raise ReplayError("duplicate directive")
        self.by = by
        self.dl_answers = list(dl_answers)
        self._dl_pos = 0
        self._halt = halt and (self.directives or self.dl_answers)
        self.records: list[GateRecord] = []
        self.cut_relations: dict[int, Any] = {}
        self.dl_relations: list[Any] = []
        self.challenges: list[Wire] = []
        self._pairs: set[tuple[int, int]] = set()
        self._n_eq = self._n_cand = 0
        self._elem = 0
        self._dl_used = 0
        self._chal_used = 0

    # -- plumbing ----------------------------------------------------------
    def _seq(self) -> int:
        return len(self.records)

    def _check_not_directive(self):
        if self.by == "seq" and self._seq() in self._pending:
            raise ReplayError(f"directive {self._seq()} points at a non-query gate")

    def _meter(self):
        if self.max_gates is not None and self._elem >= self.max_gates:
            raise BudgetExhausted
        self._elem += 1

    def _maybe_halt(self):
        if self._halt and not self._pending and self._dl_pos >= len(self.dl_answers):
            raise _Halt

    def _contains(self, rel) -> bool:
        if rel is None:
            return False
        if self.zeroset is None:
            return rel.is_zero() if isinstance(rel, Quad) else not any(rel)
        return self.zeroset.contains(rel)

    def _query(self, kind: str, rel, inputs) -> int:
        seq = self._seq()
        key = {"seq": seq, "eq": self._n_eq if kind == EQUALITY else None, "cand": self._n_cand}[self.by]
        if kind == EQUALITY:
            self._n_eq += 1
        self._n_cand += 1
        if key is not None and key in self._pending:
            if rel is None:
                raise ReplayError("directive on a query involving the invalid element")
            self._pending.discard(key)
            cls = self.zeroset.classify(rel)
            if cls is not CollisionClass.INFORMATIVE:
                raise ReplayError("directive does not induce an informative collision")
            self.cut_relations[key] = rel
            ans = 1
        else:
            ans = 1 if self._contains(rel) else 0
        self.records.append(GateRecord(seq, kind, inputs, None, None, ans))
        self._maybe_halt()
        return ans

    # -- gates -------------------------------------------------------------
    def label(self, value: int) -> Wire:
        spec = self.spec
        if not spec.known_order and value not in spec.permitted_labels:
            raise ContractViolation("labeling gate disabled in unknown-order sessions")
        self._check_not_directive()
        self._meter()
        rec = GateRecord(self._seq(), LABEL, (int(value),), None, self._next, None)
        self._next += 1
        self.plist.track(rec)
        self.records.append(rec)
        return Wire(rec.output)

    def op(self, w1: Wire, w2: Wire, sign: int = 0) -> Wire:
        self._check_not_directive()
        self.plist.poly(w1.id)
        self.plist.poly(w2.id)
        self._meter()
        rec = GateRecord(self._seq(), GROUP_OP, (w1.id, w2.id), 1 if sign else 0, self._next, None)
        self._next += 1
        self.plist.track(rec)
        self.records.append(rec)
        return Wire(rec.output)

    def eq(self, w1: Wire, w2: Wire) -> int:
        key = (w1.id, w2.id) if w1.id <= w2.id else (w2.id, w1.id)
        if key in self._pairs:
            raise ContractViolation(f"equality gate repeated on wires {key}")
        self._pairs.add(key)
        return self._query(EQUALITY, self.plist.relation(*key), key)

    def ddh(self, w1: Wire, w2: Wire, w3: Wire) -> int:
        if DDH not in self._pub.oracles:
            raise ContractViolation("DDH oracle not available for this problem")
        q = self.plist.ddh_relation(w1.id, w2.id, w3.id)
        rel = None if q is None else relation_from_quad(q, self.plist.nvars)
        return self._query(DDH, rel, (w1.id, w2.id, w3.id))

    def dl(self, w: Wire) -> int | None:
        if DL not in self._pub.oracles:
            raise ContractViolation("DL oracle not available for this problem")
        self._check_not_directive()
        seq = self._seq()
        budget = self._pub.dl_budget
        if budget is not None and self._dl_used >= budget:
            self.records.append(GateRecord(seq, DL, (w.id,), None, None, None))
            return None
        if self._dl_pos >= len(self.dl_answers):
            raise ReplayError("encoding carries too few DL answers")
        z = self.dl_answers[self._dl_pos]
        self._dl_pos += 1
        self._dl_used += 1
        rel = self.plist.dl_relation(w.id, z)
        if rel is not None and self.zeroset is not None:
            self.zeroset.classify(rel)
            self.dl_relations.append(rel)
        self.records.append(GateRecord(seq, DL, (w.id,), None, None, z))
        self._maybe_halt()
        return z

    def chal(self) -> Wire:
        if CHAL not in self._pub.oracles:
            raise ContractViolation("challenge oracle not available for this problem")
        if self._chal_used >= self._pub.chal_budget:
            raise ContractViolation("challenge budget exhausted")
        self._check_not_directive()
        self._chal_used += 1
        rec = GateRecord(self._seq(), CHAL, (), None, self._next, None)
        self._next += 1
        self.plist.track(rec)
        self.records.append(rec)
        w = Wire(rec.output)
        self.challenges.append(w)
        return w


@dataclass
class ReplayResult:
    plist: PolyList
    zeroset: ZeroSet | None
    records: list[GateRecord]
    cut_relations: list[Any]
    dl_relations: list[Any]
    halted: bool
    output: Any = None
    truncated: bool = False


def replay_without_oracle(alg, seed: int, public: PublicInstance, directives: Sequence[int] = (),
                          by: str = "seq", dl_answers: Sequence[int] = (),
                          max_gates: int | None = None, halt: bool = True,
                          identity_only: bool = False) -> ReplayResult:
    """Re-execute ``alg`` with the same seed, answering queries from the zero set."""
    sess = SymbolicSession(public, directives, by, dl_answers, max_gates, halt, identity_only)
    rng = random.Random(seed)
    out, halted, truncated = None, False, False
    try:
        out = alg(sess, rng)
    except _Halt:
        halted = True
    except BudgetExhausted:
        truncated = True
    if sess._pending:
        raise ReplayError("replay ended before reaching every directive")
    cuts = [sess.cut_relations[d] for d in sess.directives]
    return ReplayResult(sess.plist, sess.zeroset, sess.records, cuts, sess.dl_relations,
                        halted, out, truncated)


# ---------------------------------------------------------------------------
# solving and reveal selection

def solve_mdl(zs: ZeroSet, m: int, p: int) -> tuple[int, ...]:
    if zs.mode != "ModPrime" or zs.modulus != p:
        raise ContractViolation("solve_mdl needs a mod-p zero set")
    if zs.nvars != m or zs.rank != m:
        raise ContractViolation("zero set must have rank m over m variables")
    return solve_square_system_mod(zs.collisions, p)


def reveal_indices(zs, b: int) -> list[int]:
    """Variables (1-based) outside the pivot columns: fixing them keeps the rows independent."""
    basis = zs.basis if isinstance(zs, ZeroSet) else zs
    a = basis.rank
    if a > b:
        raise ContractViolation("more independent rows than variables")
    piv = set(basis.pivots)
    if 0 in piv:
        raise ContractViolation("zero set contains a nonzero constant")
    return [i for i in range(1, b + 1) if i not in piv]


# ---------------------------------------------------------------------------
# Monte Carlo statistics for informative collisions

@dataclass
class RateStats:
    p: int
    queries: int
    informative: int
    rate: float
    sigma: float
    rate_bound: float
    tail_m: int
    tail_E: int
    tail_hits: int
    tail_trials: int
    tail_rate: float
    tail_sigma: float
    tail_bound: float
    rows: list[tuple[int, int, int]] = field(default_factory=list)

    @property
    def rate_ok(self) -> bool:
        return self.rate <= self.rate_bound + 3 * self.sigma

    @property
    def tail_ok(self) -> bool:
        return self.tail_rate <= self.tail_bound + 3 * self.tail_sigma


def informative_rate_stats(p: int, t: int, trials: int, queries: int, seed: int,
                           m: int = 2, in_span: bool = False) -> RateStats:
    """Random relations against a random hidden point, one zero set per trial.

    Each query is a uniformly random relation outside the current span (or,
    with ``in_span=True``, a random combination of the span); it collides
    when it vanishes at the hidden point.  The per-trial query count doubles
    as E in the Chernoff tail (e*E/(m*p))^m for Pr[C >= m].
    """
    from .rng import stream

    total = hits = tail = 0
    rows = []
    for tr in range(trials):
        rng = stream(seed, "instance", tr)
        xs = [rng.randrange(p) for _ in range(t)]
        zs = ZeroSet(p, t)
        count = 0
        for _ in range(queries):
            if in_span:
                rows_ = zs.basis.rows()
                rel = [0] * (t + 1)
                for r in rows_:
                    k = rng.randrange(p)
                    rel = [(a + k * b) % p for a, b in zip(rel, r)]
            else:
                while True:
                    rel = [rng.randrange(p) for _ in range(t + 1)]
                    if not zs.contains(rel):
                        break
            total += 1
            if (rel[0] + sum(a * x for a, x in zip(rel[1:], xs))) % p == 0:
                if zs.classify(rel) is CollisionClass.INFORMATIVE:
                    count += 1
        hits += count
        tail += count >= m
        rows.append((tr, queries, count))
    rate = hits / total if total else 0.0
    sigma = math.sqrt((1 / p) * (1 - 1 / p) / total) if total else 0.0
    tail_rate = tail / trials if trials else 0.0
    tail_bound = (math.e * queries / (m * p)) ** m
    tb = min(tail_bound, 1.0)
    tail_sigma = math.sqrt(tb * (1 - tb) / trials) if trials else 0.0
    return RateStats(p, total, hits, rate, sigma, 1 / p, m, queries, tail, trials,
                     tail_rate, tail_sigma, tail_bound, rows)
