"""Random-representation groups and their translation to type-safe sessions.

An RR algorithm sees labels (fixed-width bit strings) instead of wires:
``alg(rr, rng)`` where ``rr`` offers ``order``, ``inputs``, ``label(x)`` and
``op(l1, l2, sign)``.  Equality is plain string comparison and costs nothing.

Both the native oracle and the translation draw every label and every
validity/preimage decision from one ``random.Random`` they are handed, in the
same order, so a coupled pair of runs sees identical views unless the
translation runs out of retries.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .algebra import ContractViolation
from .oracle import dl_instance, run_algorithm
from .rng import derive, stream


class UnfaithfulQuery(ContractViolation):
    """A label the algorithm was never given reached the faithful translation."""


class LabelTable:
    """Lazily sampled injection Z_N -> S with |S| = 2^width.

    Labels the algorithm invents are either bound to a fresh exponent or
    recorded as invalid (``None``); once made, neither choice changes.
    """

    def __init__(self, N: int, rng: random.Random, slack_bits: int = 64):
        self.N = N
        self.width = max(1, math.ceil(math.log2(N))) + slack_bits
        self.size = 1 << self.width
        if self.size < N:
            raise ContractViolation("label set smaller than the group")
        self.rng = rng
        self.fwd: dict[int, int] = {}
        self.back: dict[int, int | None] = {}

    def __len__(self):
        return len(self.back)

    @property
    def valid(self) -> int:
        return len(self.fwd)

    def fmt(self, label: int) -> str:
        return format(label, f"0{self.width}b")

    def fresh_label(self) -> int:
        while True:
            lab = self.rng.randrange(self.size)
            if lab not in self.back:
                return lab

    def bind(self, x: int | None, lab: int):
        if lab in self.back:
            raise ContractViolation("label already bound")
        self.back[lab] = x
        if x is not None:
            if x in self.fwd:
                raise ContractViolation("exponent already labelled")
            self.fwd[x] = lab

    def label(self, x: int) -> int:
        x %= self.N
        if x not in self.fwd:
            self.bind(x, self.fresh_label())
        return self.fwd[x]

    def valid_branch(self) -> bool:
        """Exact draw of the event that an unseen label lies in the image of L."""
        free = self.size - len(self.back)
        return self.rng.randrange(free) < self.N - self.valid

    def resolve_unseen(self, lab: int) -> int | None:
        """Native semantics: decide validity, then a uniform unused preimage."""
        if not self.valid_branch():
            self.bind(None, lab)
            return None
        while True:
            x = self.rng.randrange(self.N)
            if x not in self.fwd:
                self.bind(x, lab)
                return x


def _parse(label) -> int:
    return int(label, 2) if isinstance(label, str) else int(label)


class RROracle:
    """Native RR oracle over a lazily sampled table."""

    def __init__(self, N: int, input_exponents, rng: random.Random, slack_bits: int = 64):
        self.table = LabelTable(N, rng, slack_bits)
        self.order = N
        self.queries = 0
        self.inputs = tuple(self.table.fmt(self.table.label(x)) for x in input_exponents)

    def _exp(self, label) -> int | None:
        lab = _parse(label)
        if lab in self.table.back:
            return self.table.back[lab]
        return self.table.resolve_unseen(lab)

    def label(self, x: int) -> str:
        self.queries += 1
        return self.table.fmt(self.table.label(int(x) % self.order))

    def op(self, l1, l2, sign: int = 0) -> str | None:
        self.queries += 1
        a, b = self._exp(l1), self._exp(l2)
        if a is None or b is None:
            return None
        return self.table.fmt(self.table.label(a - b if sign else a + b))


class _Translator:
    """RR interface simulated on a type-safe session (FindLabel / FindElement)."""

    def __init__(self, api, rng: random.Random, retries: int | None, slack_bits: int):
        self.api = api
        self.order = api.order
        self.table = LabelTable(api.order, rng, slack_bits)
        self.retries = retries
        self.wires: dict[int, object] = {}
        self.queries = 0
        self.retry_labels = 0
        self.failures = 0
        self.inputs = tuple(self.table.fmt(self.find_label(w)) for w in api.inputs)

    def find_label(self, w) -> int:
        for lab, h in self.wires.items():
            if h is not None and self.api.eq(h, w):
                return lab
        lab = self.table.fresh_label()
        self._bind(w, lab)
        return lab

    def _bind(self, w, lab: int):
        # the exponent is hidden; the table only records that lab is valid
        self.table.back[lab] = len(self.wires)
        self.table.fwd[len(self.wires)] = lab
        self.wires[lab] = w

    def _bind_bot(self, lab: int):
        self.table.back[lab] = None
        self.wires[lab] = None

    def find_element(self, label):
        lab = _parse(label)
        if lab in self.wires:
            return self.wires[lab]
        if self.retries is None:
            raise UnfaithfulQuery(f"label {label} was never issued; use translate_general")
        if not self.table.valid_branch():
            self._bind_bot(lab)
            return None
        for _ in range(self.retries):
            x = self.table.rng.randrange(self.order)
            self.retry_labels += 1
            w = self.api.label(x)
            if not any(h is not None and self.api.eq(h, w) for h in self.wires.values()):
                self._bind(w, lab)
                return w
        self.failures += 1
        self._bind_bot(lab)
        return None

    def label(self, x: int) -> str:
        self.queries += 1
        return self.table.fmt(self.find_label(self.api.label(int(x) % self.order)))

    def op(self, l1, l2, sign: int = 0) -> str | None:
        self.queries += 1
        h1, h2 = self.find_element(l1), self.find_element(l2)
        if h1 is None or h2 is None:
            return None
        return self.table.fmt(self.find_label(self.api.op(h1, h2, sign)))


@dataclass
class TranslationStats:
    queries: int = 0
    retry_labels: int = 0
    failures: int = 0


def _translate(rr_alg, retries: int | None, label_rng: random.Random, slack_bits: int,
               stats: TranslationStats | None):
    def run(api, rng):
        tr = _Translator(api, label_rng, retries, slack_bits)
        try:
            return rr_alg(tr, rng)
        finally:
            if stats is not None:
                stats.queries, stats.retry_labels, stats.failures = tr.queries, tr.retry_labels, tr.failures
    return run


def translate_faithful(rr_alg, label_rng: random.Random, slack_bits: int = 64,
                       stats: TranslationStats | None = None):
    return _translate(rr_alg, None, label_rng, slack_bits, stats)


def translate_general(rr_alg, retries: int, label_rng: random.Random, slack_bits: int = 64,
                      stats: TranslationStats | None = None):
    if retries < 1:
        raise ContractViolation("need at least one retry")
    return _translate(rr_alg, retries, label_rng, slack_bits, stats)


# ---------------------------------------------------------------------------
# sample RR algorithms

def rr_bsgs(rr, rng, T: int | None = None):
    """Faithful BSGS on labels; finds x when x < s^2."""
    N = rr.order
    s = math.isqrt(N - 1) + 1 if T is None else max(1, T // 2)
    g, h = rr.inputs
    babies = {}
    for j in range(s):
        babies.setdefault(rr.label(j), j)
    if h in babies:
        return babies[h]
    step = rr.label(s)
    y = h
    for k in range(1, s):
        y = rr.op(y, step, 1)
        if y in babies:
            return (k * s + babies[y]) % N
    return None


def rr_probe(rr, rng, labels: int = 6, probes: int = 2):
    """Unfaithful: labels some random exponents, then combines g with invented labels."""
    g = rr.inputs[0]
    seen = set(rr.inputs)
    for _ in range(labels):
        seen.add(rr.label(rng.randrange(rr.order)))
    width = len(g)
    out = []
    for _ in range(probes):
        while True:
            fake = format(rng.randrange(1 << width), f"0{width}b")
            if fake not in seen:
                break
        seen.add(fake)
        res = rr.op(fake, g)
        out.append(res)
        if res is not None:
            seen.add(res)
    return tuple(out)


# ---------------------------------------------------------------------------
# coupled comparison

@dataclass
class CoupledResult:
    native: object
    translated: object
    native_queries: int
    element_gates: int
    retry_labels: int
    failures: int

    @property
    def agree(self) -> bool:
        return self.native == self.translated


def coupled_trial(rr_alg, N: int, x: int, seed: int, trial: int, retries: int | None = None,
                  slack_bits: int = 64) -> CoupledResult:
    """Run ``rr_alg`` natively and through the translation with shared randomness."""
    inst = dl_instance(N, x)
    nat = RROracle(N, inst.input_values, stream(seed, "label-table", trial), slack_bits)
    native = rr_alg(nat, stream(seed, "algorithm", trial))
    stats = TranslationStats()
    lrng = stream(seed, "label-table", trial)
    alg = (translate_faithful(rr_alg, lrng, slack_bits, stats) if retries is None
           else translate_general(rr_alg, retries, lrng, slack_bits, stats))
    out, tr = run_algorithm(alg, inst, derive(seed, "algorithm", trial))
    t = tr.tallies()
    return CoupledResult(native, out, nat.queries, t["labels"] + t["group_ops"],
                         stats.retry_labels, stats.failures)


@dataclass
class EquivalenceReport:
    N: int
    trials: int
    disagreements: int
    retries: int | None
    T: int
    gate_mismatches: int = 0

    @property
    def rate(self) -> float:
        return self.disagreements / self.trials

    @property
    def bound(self) -> float:
        if self.retries is None:
            return 0.0
        return min(1.0, self.retries * (self.T / self.N) ** self.retries)

    @property
    def sigma(self) -> float:
        b = self.bound
        return math.sqrt(b * (1 - b) / self.trials)

    @property
    def degenerate(self) -> bool:
        return self.bound >= 1.0

    @property
    def ok(self) -> bool:
        if self.gate_mismatches:
            return False
        if self.retries is None:
            return self.disagreements == 0
        return self.rate <= self.bound + 3 * self.sigma


def equivalence_experiment(rr_alg, N: int, trials: int, seed: int, retries: int | None = None,
                           slack_bits: int = 64, T: int | None = None) -> EquivalenceReport:
    rep = EquivalenceReport(N, trials, 0, retries, T or 0)
    for i in range(trials):
        x = stream(seed, "instance", i).randrange(N)
        res = coupled_trial(rr_alg, N, x, seed, i, retries, slack_bits)
        rep.disagreements += not res.agree
        # an operation on an invalid label never reaches the session
        if res.element_gates > res.native_queries + res.retry_labels:
            rep.gate_mismatches += 1
        rep.T = max(rep.T, res.native_queries) if T is None else T
    return rep
