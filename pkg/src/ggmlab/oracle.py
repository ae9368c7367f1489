"""Type-safe generic group oracle with transcript recording.

Algorithms are plain callables ``alg(api, rng) -> output``.  ``api`` hands
out opaque :class:`Wire` handles and bits; hidden exponents stay inside the
session.  The same callable can later be re-executed against
``tracker.SymbolicSession`` without any oracle access.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Any, Callable

from .algebra import ContractViolation, Factorization, factor_integer, is_prime

LABEL, GROUP_OP, EQUALITY, DDH, DL, CHAL = "Label", "GroupOp", "Equality", "Ddh", "Dl", "Chal"
QUERY_KINDS = (EQUALITY, DDH, DL)


class BudgetExhausted(Exception):
    """The algorithm tried to exceed its element-gate budget."""


@dataclass(frozen=True)
class GroupSpec:
    order: int
    known_order: bool = True
    factorization: Factorization | None = None
    bit_length: int = 0
    permitted_labels: frozenset[int] = frozenset({1})

    def __post_init__(self):
        if self.order < 1:
            raise ContractViolation("group order must be positive")
        if not self.bit_length:
            object.__setattr__(self, "bit_length", self.order.bit_length())
        if self.known_order and self.factorization is None and not is_prime(self.order) and self.order > 1:
            object.__setattr__(self, "factorization", factor_integer(self.order))

    @property
    def prime(self) -> bool:
        return is_prime(self.order)

    def public(self) -> "GroupSpec":
        """What an algorithm may know: the order only when it is known."""
        if self.known_order:
            return self
        return _PublicUnknown(self.bit_length, self.permitted_labels)


class _PublicUnknown:
    known_order = False
    order = None
    factorization = None
    prime = False

    def __init__(self, bit_length: int, permitted: frozenset[int]):
        self.bit_length = bit_length
        self.permitted_labels = permitted

    def public(self):
        return self


@dataclass(frozen=True, slots=True)
class Wire:
    id: int


@dataclass(slots=True)
class GateRecord:
    seq: int
    kind: str
    inputs: tuple[int, ...]
    sign: int | None = None
    output: int | None = None
    answer: int | None = None

    def to_dict(self) -> dict:
        return {
            "seq": self.seq,
            "kind": self.kind,
            "inputs": list(self.inputs),
            "sign": self.sign,
            "output": self.output,
            "answer": self.answer,
        }


@dataclass
class Instance:
    """A problem instance: hidden secrets plus everything public about it.

    ``input_polys`` gives the symbolic value of each input wire as a
    coefficient vector over ``nvars`` variables; ``input_values`` their hidden
    exponents.  Challenge wires take ``secrets`` in order and variables
    ``chal_offset+1, chal_offset+2, ...``.
    """

    spec: GroupSpec
    input_polys: tuple[tuple[int, ...], ...]
    input_values: tuple[int, ...]
    nvars: int
    secrets: tuple[int, ...]
    problem: str = "dl"
    oracles: frozenset[str] = frozenset()
    dl_budget: int | None = None
    chal_budget: int = 0
    chal_offset: int = 0

    def public(self) -> "PublicInstance":
        return PublicInstance(
            self.spec.public(), self.input_polys, self.nvars, self.problem,
            self.oracles, self.dl_budget, self.chal_budget, self.chal_offset,
        )

    def describe(self) -> dict:
        return {"problem": self.problem, "order": self.spec.order, "nvars": self.nvars,
                "secrets": list(self.secrets)}


@dataclass(frozen=True)
class PublicInstance:
    spec: Any
    input_polys: tuple[tuple[int, ...], ...]
    nvars: int
    problem: str
    oracles: frozenset[str]
    dl_budget: int | None
    chal_budget: int
    chal_offset: int


@dataclass
class Transcript:
    instance: dict
    input_wires: tuple[int, ...]
    input_polys: tuple[tuple[int, ...], ...]
    modulus: int | None
    nvars: int
    records: list[GateRecord] = field(default_factory=list)
    output: Any = None
    truncated: bool = False
    invalid: bool = False
    chal_wires: list[int] = field(default_factory=list)
    chal_offset: int = 0

    def tallies(self) -> dict[str, int]:
        t = {LABEL: 0, GROUP_OP: 0, EQUALITY: 0, DDH: 0, DL: 0, CHAL: 0}
        for r in self.records:
            t[r.kind] += 1
        return {
            "T": t[LABEL] + t[GROUP_OP],
            "labels": t[LABEL],
            "group_ops": t[GROUP_OP],
            "E": t[EQUALITY],
            "T_DDH": t[DDH],
            "q": t[DL],
            "chal": t[CHAL],
        }

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r.to_dict(), sort_keys=True) + "\n" for r in self.records)

    @staticmethod
    def records_from_jsonl(text: str) -> list[GateRecord]:
        out = []
        for line in text.splitlines():
            if line.strip():
                d = json.loads(line)
                out.append(GateRecord(d["seq"], d["kind"], tuple(d["inputs"]), d["sign"], d["output"], d["answer"]))
        return out


class Session:
    """Live oracle.  Exponents are kept mod N; ``None`` stands for the invalid element."""

    def __init__(self, instance: Instance, max_gates: int | None = None, strict_dl: bool = False):
        self._inst = instance
        self._N = instance.spec.order
        self._vals: list[int | None] = [v % self._N for v in instance.input_values]
        self._pairs: set[tuple[int, int]] = set()
        self._chal_used = 0
        self._dl_used = 0
        self._strict_dl = strict_dl
        self._dl_span = None
        self.max_gates = max_gates
        self.spec = instance.spec.public()
        self.order = self.spec.order
        self.bit_length = instance.spec.bit_length
        self.inputs = tuple(Wire(i) for i in range(len(self._vals)))
        self.challenges: list[Wire] = []
        self.transcript = Transcript(
            instance=instance.describe(),
            input_wires=tuple(w.id for w in self.inputs),
            input_polys=instance.input_polys,
            modulus=self._N if instance.spec.known_order else None,
            nvars=instance.nvars,
            chal_offset=instance.chal_offset,
        )
        self._recs = self.transcript.records
        self._elem = 0
        if strict_dl:
            from .tracker import PolyList, ZeroSet

            self._plist = PolyList.from_transcript(self.transcript)
            self._dl_span = ZeroSet.for_transcript(self.transcript)

    # -- helpers -----------------------------------------------------------
    def _new(self, value: int | None) -> Wire:
        self._vals.append(value)
        return Wire(len(self._vals) - 1)

    def _val(self, w: Wire) -> int | None:
        try:
            return self._vals[w.id]
        except (IndexError, AttributeError):
            raise ContractViolation(f"unknown wire {w!r}") from None

    def _meter(self):
        if self.max_gates is not None and self._elem >= self.max_gates:
            raise BudgetExhausted
        self._elem += 1

    def _track(self, rec: GateRecord):
        if self._dl_span is not None:
            self._plist.track(rec)

    # -- element gates -----------------------------------------------------
    def label(self, value: int) -> Wire:
        spec = self._inst.spec
        if not spec.known_order and value not in spec.permitted_labels:
            raise ContractViolation("labeling gate disabled in unknown-order sessions")
        self._meter()
        value = int(value)
        v = value if 0 <= value < self._N else None
        w = self._new(v if v is None else v % self._N)
        rec = GateRecord(len(self._recs), LABEL, (value,), None, w.id, None)
        self._recs.append(rec)
        self._track(rec)
        return w

    def op(self, w1: Wire, w2: Wire, sign: int = 0) -> Wire:
        a, b = self._val(w1), self._val(w2)
        self._meter()
        v = None if a is None or b is None else (a - b if sign else a + b) % self._N
        w = self._new(v)
        rec = GateRecord(len(self._recs), GROUP_OP, (w1.id, w2.id), 1 if sign else 0, w.id, None)
        self._recs.append(rec)
        self._track(rec)
        return w

    def eq(self, w1: Wire, w2: Wire) -> int:
        a, b = self._val(w1), self._val(w2)
        key = (w1.id, w2.id) if w1.id <= w2.id else (w2.id, w1.id)
        if key in self._pairs:
            raise ContractViolation(f"equality gate repeated on wires {key}")
        self._pairs.add(key)
        ans = 1 if a is not None and a == b else 0
        self._recs.append(GateRecord(len(self._recs), EQUALITY, key, None, None, ans))
        if ans and self._dl_span is not None:
            rel = self._plist.relation(w1.id, w2.id)
            if rel is not None:
                self._dl_span.classify(rel)
        return ans

    # -- problem oracles ---------------------------------------------------
    def ddh(self, w1: Wire, w2: Wire, w3: Wire) -> int:
        if DDH not in self._inst.oracles:
            raise ContractViolation("DDH oracle not available for this problem")
        a, b, c = self._val(w1), self._val(w2), self._val(w3)
        ans = 1 if None not in (a, b, c) and (a * b - c) % self._N == 0 else 0
        self._recs.append(GateRecord(len(self._recs), DDH, (w1.id, w2.id, w3.id), None, None, ans))
        return ans

    def dl(self, w: Wire) -> int | None:
        if DL not in self._inst.oracles:
            raise ContractViolation("DL oracle not available for this problem")
        v = self._val(w)
        budget = self._inst.dl_budget
        if budget is not None and self._dl_used >= budget:
            self.transcript.invalid = True
            self._recs.append(GateRecord(len(self._recs), DL, (w.id,), None, None, None))
            return None
        if self._dl_span is not None:
            poly = self._plist.poly(w.id)
            if poly is not None and self._dl_span.predicts_dl(poly):
                raise ContractViolation("DL query whose answer is already determined")
        self._dl_used += 1
        rec = GateRecord(len(self._recs), DL, (w.id,), None, None, v)
        self._recs.append(rec)
        if self._dl_span is not None and v is not None:
            self._dl_span.classify(self._plist.dl_relation(w.id, v))
        return v

    def chal(self) -> Wire:
        if CHAL not in self._inst.oracles:
            raise ContractViolation("challenge oracle not available for this problem")
        if self._chal_used >= self._inst.chal_budget:
            raise ContractViolation("challenge budget exhausted")
        v = self._inst.secrets[self._chal_used] % self._N
        self._chal_used += 1
        w = self._new(v)
        rec = GateRecord(len(self._recs), CHAL, (), None, w.id, None)
        self._recs.append(rec)
        self._track(rec)
        self.challenges.append(w)
        self.transcript.chal_wires.append(w.id)
        return w


Algorithm = Callable[[Any, random.Random], Any]


def run_algorithm(alg: Algorithm, instance: Instance, seed: int,
                  max_gates: int | None = None, strict_dl: bool = False):
    """Run ``alg`` on a fresh session; returns ``(output, transcript)``."""
    sess = Session(instance, max_gates=max_gates, strict_dl=strict_dl)
    rng = random.Random(seed)
    try:
        out = alg(sess, rng)
    except BudgetExhausted:
        out = None
        sess.transcript.truncated = True
    sess.transcript.output = out
    return out, sess.transcript


# ---------------------------------------------------------------------------
# instance constructors

def _unit(nvars: int, i: int) -> tuple[int, ...]:
    v = [0] * (nvars + 1)
    v[i] = 1
    return tuple(v)


def dl_instance(p: int, x: int) -> Instance:
    spec = GroupSpec(p)
    return Instance(spec, (_unit(1, 0), _unit(1, 1)), (1, x % p), 1, (x % p,), "dl")


def mdl_instance(p: int, xs) -> Instance:
    m = len(xs)
    spec = GroupSpec(p)
    polys = (_unit(m, 0),) + tuple(_unit(m, i + 1) for i in range(m))
    return Instance(spec, polys, (1,) + tuple(x % p for x in xs), m, tuple(x % p for x in xs), "mdl")


def gap_dl_instance(p: int, x: int) -> Instance:
    inst = dl_instance(p, x)
    inst.problem, inst.oracles = "gap-dl", frozenset({DDH})
    return inst


def gap_cdh_instance(p: int, x: int, y: int) -> Instance:
    inst = mdl_instance(p, (x, y))
    inst.problem, inst.oracles = "gap-cdh", frozenset({DDH})
    return inst


def omdl_instance(p: int, xs, q: int) -> Instance:
    """(n, m)-M-DL instance: t = len(xs) challenges, q DL queries allowed."""
    t = len(xs)
    spec = GroupSpec(p)
    return Instance(spec, (_unit(t, 0),), (1,), t, tuple(x % p for x in xs), "omdl",
                    frozenset({DL, CHAL}), dl_budget=q, chal_budget=t, chal_offset=0)


def order_instance(N: int, n: int | None = None) -> Instance:
    spec = GroupSpec(N, known_order=False, bit_length=n or N.bit_length())
    return Instance(spec, ((1,),), (1,), 0, (N,), "order")


def root_instance(N: int, x: int, n: int | None = None) -> Instance:
    """Unknown-order instance (g, g^x); x is kept as an integer, reduced only inside the oracle."""
    spec = GroupSpec(N, known_order=False, bit_length=n or N.bit_length())
    return Instance(spec, ((1, 0), (0, 1)), (1, x), 1, (N,), "root")
