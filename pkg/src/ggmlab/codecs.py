"""Encode/decode pairs that turn a successful generic algorithm into a compressor.

An encoder reads a live transcript and names the collisions that pin the
secret; the decoder re-executes the same algorithm with the same seed and no
oracle (``tracker.replay_without_oracle``), then solves for the secret.
Encodings are mixed-radix integers so their length is exact.
"""
from __future__ import annotations

import csv
import io
import math
import random
from dataclasses import dataclass, field
from functools import partial
from typing import Any, Callable, Sequence

from . import algorithms as algs
from .algebra import (
    ContractViolation, SingularSystemError, nbit_prime_divisors, nbit_primes, roots_mod_p,
    solve_square_system_mod,
)
from .oracle import (
    DDH, DL, EQUALITY, dl_instance, gap_cdh_instance, gap_dl_instance, mdl_instance,
    omdl_instance, order_instance, root_instance, run_algorithm,
)
from .rng import derive, stream
from .tracker import (
    CollisionClass, Quad, ReplayError, ZeroSet, analyze, replay_without_oracle, reveal_indices,
)

BOT = None


# ---------------------------------------------------------------------------
# encodings

def rank_subset(items: Sequence[int]) -> int:
    """Combinadic rank of a strictly increasing tuple."""
    return sum(math.comb(c, i + 1) for i, c in enumerate(items))


def unrank_subset(r: int, k: int) -> tuple[int, ...]:
    out = []
    for i in range(k, 0, -1):
        c = i - 1
        while math.comb(c + 1, i) <= r:
            c += 1
        out.append(c)
        r -= math.comb(c, i)
    return tuple(reversed(out))


@dataclass(frozen=True)
class Encoding:
    """A codeword: ``fields`` are (value, radix) pairs; ``None`` fields means the symbol for failure."""

    variant: str
    radices: tuple[int, ...]
    values: tuple[int, ...] | None = None
    payload: Any = None

    def __post_init__(self):
        if self.values is not None:
            if len(self.values) != len(self.radices):
                raise ContractViolation("field count mismatch")
            for v, r in zip(self.values, self.radices):
                if not 0 <= v < r:
                    raise ContractViolation(f"field value {v} outside radix {r}")

    @property
    def is_bot(self) -> bool:
        return self.values is None

    @property
    def space(self) -> int:
        return math.prod(self.radices) + 1

    @property
    def m_bits(self) -> float:
        return math.log2(self.space)

    def length(self) -> int:
        return max(1, (self.space - 1).bit_length())

    def to_int(self) -> int:
        if self.values is None:
            return 0
        r = 0
        for v, rad in zip(self.values, self.radices):
            r = r * rad + v
        return r + 1

    def to_bits(self) -> str:
        return format(self.to_int(), f"0{self.length()}b")

    @classmethod
    def from_int(cls, variant: str, radices: Sequence[int], code: int) -> "Encoding":
        if code == 0:
            return cls(variant, tuple(radices))
        code -= 1
        vals = []
        for rad in reversed(radices):
            vals.append(code % rad)
            code //= rad
        return cls(variant, tuple(radices), tuple(reversed(vals)))


def pairs(rows: int) -> int:
    return math.comb(rows, 2)


# ---------------------------------------------------------------------------
# output checks appended to each algorithm (success implies a collision)

def dl_checked(alg):
    def run(api, rng):
        z = alg(api, rng)
        if z is None:
            return None
        api.eq(api.label(int(z) % api.order), api.inputs[1])
        return z
    return run


def mdl_checked(alg):
    def run(api, rng):
        zs = alg(api, rng)
        if zs is None:
            return None
        for z, h in zip(zs, api.inputs[1:]):
            api.eq(api.label(int(z) % api.order), h)
        return tuple(zs)
    return run


def gap_cdh_checked(alg):
    def run(api, rng):
        w = alg(api, rng)
        if w is None:
            return None
        api.ddh(api.inputs[1], api.inputs[2], w)
        return w
    return run


def omdl_checked(alg):
    def run(api, rng):
        ans = alg(api, rng) or {}
        for i, z in sorted(ans.items()):
            api.eq(api.label(int(z) % api.order), api.challenges[i])
        return ans
    return run


def order_checked(alg, n: int):
    """Compute g^z from g by double-and-add and compare it with g^0."""
    def run(api, rng):
        z = alg(api, rng)
        if not isinstance(z, int) or not 1 <= z < (1 << (n + 1)):
            return z
        g = api.inputs[0]
        api.eq(algs.scalar_mul(api, g, z), api.op(g, g, 1))
        return z
    return run


def order_check_cost(n: int) -> int:
    return 2 * (n + 1) + 1


def root_checked(alg, max_e_bits: int = 8):
    def run(api, rng):
        res = alg(api, rng)
        if res is None:
            return None
        e, y = res
        if not 2 <= e < (1 << max_e_bits):
            return res
        api.eq(algs.scalar_mul(api, y, e), api.inputs[1])
        return res
    return run


def repsq_checked(alg, t: int):
    def run(api, rng):
        w = alg(api, rng)
        if w is None:
            return None
        v = api.inputs[0]
        for _ in range(t):
            v = api.op(v, v)
        api.eq(w, v)
        return w
    return run


# ---------------------------------------------------------------------------
# DL

def encode_dl(transcript, C: int) -> Encoding:
    """First informative equality collision; C counts element gates including the check."""
    rad = (pairs(C + 2),)
    for ev in analyze(transcript).informative((EQUALITY,)):
        return Encoding("dl", rad, (ev.ordinal,), ev.ordinal)
    return Encoding("dl", rad)


def _solve_linear_single(rel, p: int) -> int:
    b, a = rel[0] % p, rel[1] % p
    if a == 0:
        raise ReplayError("collision without the secret variable")
    return (-b * pow(a, -1, p)) % p


def decode_dl(enc: Encoding, alg, seed: int, public, fallback: random.Random):
    p = public.spec.order
    if enc.is_bot:
        return fallback.randrange(p)
    try:
        res = replay_without_oracle(alg, seed, public, [enc.values[0]], by="eq")
        return _solve_linear_single(res.cut_relations[0], p)
    except (ReplayError, ContractViolation):
        return fallback.randrange(p)


# ---------------------------------------------------------------------------
# MDL

def mdl_radix(C: int, m: int) -> int:
    return math.comb(pairs(C + m + 1), m)


def encode_mdl(transcript, m: int, C: int) -> Encoding:
    rad = (mdl_radix(C, m),)
    evs = analyze(transcript).informative((EQUALITY,))[:m]
    if len(evs) < m:
        return Encoding("mdl", rad)
    ords = tuple(e.ordinal for e in evs)
    return Encoding("mdl", rad, (rank_subset(ords),), ords)


def decode_mdl(enc: Encoding, alg, seed: int, public, m: int, fallback: random.Random):
    p = public.spec.order
    if not enc.is_bot:
        try:
            ords = unrank_subset(enc.values[0], m)
            res = replay_without_oracle(alg, seed, public, ords, by="eq")
            return solve_square_system_mod(res.zeroset.collisions, p)
        except (ReplayError, SingularSystemError, ContractViolation):
            pass
    return tuple(fallback.randrange(p) for _ in range(m))


# ---------------------------------------------------------------------------
# gap-DL / gap-CDH

def _as_quad(rel, modulus) -> Quad:
    if isinstance(rel, Quad):
        return rel
    return Quad(tuple(sorted(((0, i), c % modulus) for i, c in enumerate(rel) if c % modulus)), modulus)


def gap_radices(kind: str, C: int, T_ddh: int, p: int) -> tuple[int, ...]:
    if kind == "GapDL":
        return (pairs(C + 2) + T_ddh, 2)
    if kind == "GapCDH":
        return (pairs(C + 3) + T_ddh, 2, p, 2)
    raise ContractViolation(f"unknown gap kind {kind}")


def encode_gap(transcript, kind: str, secrets: Sequence[int], C: int, T_ddh: int) -> Encoding:
    p = transcript.modulus
    rad = gap_radices(kind, C, T_ddh, p)
    evs = analyze(transcript).informative((EQUALITY, DDH))
    if not evs:
        return Encoding(kind, rad)
    ev = evs[0]
    q = _as_quad(ev.relation, p)
    if kind == "GapDL":
        roots = roots_mod_p(q.univariate(1), p)
        if not roots or secrets[0] not in roots:
            return Encoding(kind, rad)
        return Encoding(kind, rad, (ev.cand, roots.index(secrets[0])), ev.cand)
    x, y = secrets
    for which, (var, val, other, target) in enumerate(((1, x, 2, y), (2, y, 1, x))):
        roots = roots_mod_p(q.substitute(var, val).univariate(other), p)
        if roots and target in roots:
            return Encoding(kind, rad, (ev.cand, which, val, roots.index(target)), ev.cand)
    return Encoding(kind, rad)


def decode_gap(enc: Encoding, kind: str, alg, seed: int, public, fallback: random.Random):
    p = public.spec.order
    if not enc.is_bot:
        try:
            res = replay_without_oracle(alg, seed, public, [enc.values[0]], by="cand")
            q = _as_quad(res.cut_relations[0], p)
            if kind == "GapDL":
                roots = roots_mod_p(q.univariate(1), p)
                return roots[min(enc.values[1], len(roots) - 1)]
            which, val, bit = enc.values[1:]
            var, other = (1, 2) if which == 0 else (2, 1)
            roots = roots_mod_p(q.substitute(var, val).univariate(other), p)
            r = roots[min(bit, len(roots) - 1)]
            return (val, r) if which == 0 else (r, val)
        except (ReplayError, ContractViolation, IndexError, TypeError):
            pass
    if kind == "GapDL":
        return fallback.randrange(p)
    return (fallback.randrange(p), fallback.randrange(p))


# ---------------------------------------------------------------------------
# (n, m)-M-DL

def omdl_radices(q: int, n: int, m: int, C: int, p: int) -> tuple[int, ...]:
    t = q + m
    return (math.comb(pairs(1 + t + C), n),) + (p,) * q + (p,) * (m - n)


def encode_omdl(transcript, secrets: Sequence[int], q: int, n: int, m: int, C: int) -> Encoding:
    p = transcript.modulus
    t = q + m
    rad = omdl_radices(q, n, m, C, p)
    evs = analyze(transcript).informative((EQUALITY, DL))[: n + q]
    eqs = [e for e in evs if e.kind == EQUALITY]
    dls = [e for e in evs if e.kind == DL]
    if len(eqs) != n or len(dls) != q:
        return Encoding("omdl", rad)
    zs = ZeroSet(p, t)
    for e in evs:
        zs.classify(e.relation)
    reveal = reveal_indices(zs, t)
    if len(reveal) != m - n:
        return Encoding("omdl", rad)
    ords = tuple(e.ordinal for e in eqs)
    z = tuple(e.answer for e in dls)
    w = tuple(secrets[i - 1] for i in reveal)
    return Encoding("omdl", rad, (rank_subset(ords),) + z + w, (ords, z, w))


def decode_omdl(enc: Encoding, alg, seed: int, public, q: int, n: int, m: int,
                fallback: random.Random):
    p = public.spec.order
    t = q + m
    if not enc.is_bot:
        try:
            ords = unrank_subset(enc.values[0], n)
            z = enc.values[1 : 1 + q]
            w = enc.values[1 + q :]
            res = replay_without_oracle(alg, seed, public, ords, by="eq", dl_answers=z)
            zs = res.zeroset
            if zs.rank != n + q:
                raise ReplayError("rank deficient")
            reveal = reveal_indices(zs, t)
            eqs = list(zs.collisions)
            for i, val in zip(reveal, w):
                row = [0] * (t + 1)
                row[0], row[i] = -val, 1
                eqs.append(tuple(row))
            return solve_square_system_mod(eqs, p)
        except (ReplayError, SingularSystemError, ContractViolation):
            pass
    return tuple(fallback.randrange(p) for _ in range(t))


# ---------------------------------------------------------------------------
# unknown order

def divisor_bound(C: int, n: int) -> int:
    """Max count of n-bit prime divisors of a value of magnitude at most 2^C * 2^n."""
    return max(1, (C + n) // (n - 1)) if n > 1 else C + n


def order_radices(variant: str, C: int, n: int, rows: int, two_collisions: bool = False) -> tuple[int, ...]:
    E, K = pairs(rows), divisor_bound(C, n)
    if variant == "Prime":
        return (E, K)
    if two_collisions:
        return (math.comb(E, 2), K, K)
    return (E, math.comb(K, 2))


def _values(relation, var_values) -> int:
    return relation[0] + sum(a * x for a, x in zip(relation[1:], var_values))


def encode_unknown_order(transcript, variant: str, n: int, secret, var_values: Sequence[int],
                         C: int, rows: int, two_collisions: bool = False, seed: int = 0) -> Encoding:
    """``secret`` is N for Prime and the pair (p, q) for Rsa."""
    rad = order_radices(variant, C, n, rows, two_collisions)
    tag = variant if not two_collisions else variant + "2"
    usable = []
    for ev in analyze(transcript).informative((EQUALITY,)):
        v = _values(ev.relation, var_values)
        if v:
            usable.append((ev, nbit_prime_divisors(v, n, seed)))
    if variant == "Prime":
        for ev, divs in usable:
            if secret in divs:
                return Encoding(tag, rad, (ev.ordinal, divs.index(secret)), ev.ordinal)
        return Encoding(tag, rad)
    p, q = sorted(secret)
    if not two_collisions:
        for ev, divs in usable:
            if p in divs and q in divs:
                pr = (divs.index(p), divs.index(q))
                return Encoding(tag, rad, (ev.ordinal, rank_subset(pr)), (ev.ordinal, pr))
        return Encoding(tag, rad)
    if len(usable) >= 2:
        (e1, d1), (e2, d2) = usable[:2]
        if p in d1 and q in d2:
            ords = (e1.ordinal, e2.ordinal)
            return Encoding(tag, rad, (rank_subset(ords), d1.index(p), d2.index(q)), ords)
    return Encoding(tag, rad)


def _fallback_order(variant: str, n: int, fallback: random.Random):
    ps = nbit_primes(n)
    if variant == "Prime":
        return fallback.choice(ps)
    a, b = fallback.sample(ps, 2)
    return a * b


def decode_unknown_order(enc: Encoding, variant: str, alg, seed: int, public, n: int,
                         var_values: Sequence[int], fallback: random.Random,
                         two_collisions: bool = False, factor_seed: int = 0):
    if not enc.is_bot:
        try:
            if variant == "Prime" or not two_collisions:
                res = replay_without_oracle(alg, seed, public, [enc.values[0]], by="eq")
                divs = nbit_prime_divisors(_values(res.cut_relations[0], var_values), n, factor_seed)
                if variant == "Prime":
                    return divs[enc.values[1]]
                i, j = unrank_subset(enc.values[1], 2)
                return divs[i] * divs[j]
            ords = unrank_subset(enc.values[0], 2)
            res = replay_without_oracle(alg, seed, public, ords, by="eq")
            d1 = nbit_prime_divisors(_values(res.cut_relations[0], var_values), n, factor_seed)
            d2 = nbit_prime_divisors(_values(res.cut_relations[1], var_values), n, factor_seed)
            return d1[enc.values[1]] * d2[enc.values[2]]
        except (ReplayError, ContractViolation, IndexError):
            pass
    return _fallback_order(variant, n, fallback)


# ---------------------------------------------------------------------------
# compression audit

@dataclass
class CodecReport:
    codec: str
    algorithm: str
    N: int
    T: int
    trials: int
    successes: int
    m_bits: float
    logM: float
    wins: int = 0
    roundtrip_on_wins: int = 0
    collisions_on_wins: int = 0
    length_violations: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def eps_hat(self) -> float:
        return self.successes / self.trials if self.trials else 0.0

    @property
    def sigma_bits(self) -> float:
        e = self.eps_hat
        if e <= 0:
            return 0.0
        return math.sqrt(e * (1 - e) / self.trials) / (e * math.log(2))

    @property
    def slack_bits(self) -> float:
        e = self.eps_hat
        if e <= 0:
            return math.inf
        return self.m_bits - (self.logM + math.log2(e))

    @property
    def flagged(self) -> bool:
        return self.successes == 0

    @property
    def bound_ok(self) -> bool:
        return self.flagged or self.slack_bits >= -3 * self.sigma_bits

    @property
    def roundtrip_ok(self) -> bool:
        return self.roundtrip_on_wins == self.wins

    @property
    def ok(self) -> bool:
        return self.bound_ok and self.roundtrip_ok and self.length_violations == 0

    CSV_COLUMNS = ("codec", "algorithm", "N", "T", "trials", "eps_hat", "m_bits", "logM", "slack_bits")

    def row(self) -> dict:
        slack = self.slack_bits
        return {
            "codec": self.codec, "algorithm": self.algorithm, "N": self.N, "T": self.T,
            "trials": self.trials, "eps_hat": f"{self.eps_hat:.6f}", "m_bits": f"{self.m_bits:.6f}",
            "logM": f"{self.logM:.6f}", "slack_bits": "inf" if math.isinf(slack) else f"{slack:.6f}",
        }


def reports_csv(reports: Sequence[CodecReport]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CodecReport.CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in reports:
        w.writerow(r.row())
    return buf.getvalue()


@dataclass
class CodecSetup:
    """Everything an audit needs for one (codec, algorithm, parameters) triple."""

    codec: str
    algorithm: str
    N: int
    T: int
    C: int
    logM: float
    alg: Callable
    sample: Callable[[random.Random], tuple[Any, Any]]
    won: Callable[[Any, Any], bool]
    encode: Callable[[Any, Any, Any], Encoding]
    decode: Callable[[Encoding, int, Any, Any, random.Random], Any]
    radices: tuple[int, ...]
    shared: Callable[[Any], Any] = lambda inst: None


def _dl_alg(algo: str, T: int):
    if algo == "bsgs":
        return algs.bsgs(T)
    if algo == "random-collision":
        return algs.random_collision(T)
    raise ContractViolation(f"unknown DL algorithm {algo}")


def dl_setup(p: int, T: int, algo: str = "bsgs") -> CodecSetup:
    alg = dl_checked(_dl_alg(algo, T))
    C = T + 1

    def sample(rng):
        x = rng.randrange(p)
        return x, dl_instance(p, x)

    return CodecSetup(
        "dl", algo, p, T, C, math.log2(p), alg, sample,
        won=lambda out, msg: out == msg,
        encode=lambda tr, msg, inst: encode_dl(tr, C),
        decode=lambda enc, seed, pub, sh, fb: decode_dl(enc, alg, seed, pub, fb),
        radices=(pairs(C + 2),),
    )


def mdl_setup(p: int, m: int, T: int) -> CodecSetup:
    alg = mdl_checked(algs.mdl_bsgs(T))
    C = T + m

    def sample(rng):
        xs = tuple(rng.randrange(p) for _ in range(m))
        return xs, mdl_instance(p, xs)

    return CodecSetup(
        "mdl", "bsgs", p, T, C, m * math.log2(p), alg, sample,
        won=lambda out, msg: out == msg,
        encode=lambda tr, msg, inst: encode_mdl(tr, m, C),
        decode=lambda enc, seed, pub, sh, fb: decode_mdl(enc, alg, seed, pub, m, fb),
        radices=(mdl_radix(C, m),),
    )


def gap_setup(kind: str, p: int, T: int) -> CodecSetup:
    if kind == "GapDL":
        alg = dl_checked(algs.gap_dl(T))
        C, T_ddh = T + 1, T

        def sample(rng):
            x = rng.randrange(p)
            return x, gap_dl_instance(p, x)

        logM, won = math.log2(p), (lambda out, msg: out == msg)
        secrets = lambda msg: (msg,)
    else:
        alg = gap_cdh_checked(algs.gap_cdh(T))
        C, T_ddh = T, 1

        def sample(rng):
            xy = (rng.randrange(p), rng.randrange(p))
            return xy, gap_cdh_instance(p, *xy)

        logM = 2 * math.log2(p)
        won = lambda out, msg: out is not None
        secrets = lambda msg: msg
    return CodecSetup(
        kind.lower(), "gap-dl" if kind == "GapDL" else "bsgs-pow", p, T, C, logM, alg, sample,
        won=won,
        encode=lambda tr, msg, inst: encode_gap(tr, kind, secrets(msg), C, T_ddh),
        decode=lambda enc, seed, pub, sh, fb: decode_gap(enc, kind, alg, seed, pub, fb),
        radices=gap_radices(kind, C, T_ddh, p),
    )


def omdl_setup(p: int, q: int, n: int, m: int, T: int) -> CodecSetup:
    alg = omdl_checked(algs.omdl(q, n, m, T))
    t = q + m
    C = T + q + n

    def sample(rng):
        xs = tuple(rng.randrange(p) for _ in range(t))
        return xs, omdl_instance(p, xs, q)

    def won(out, msg):
        return len(out) >= q + n and all(msg[i] == z for i, z in out.items())

    return CodecSetup(
        "omdl", "dl-oracle+bsgs", p, T, C, t * math.log2(p), alg, sample,
        won=won,
        encode=lambda tr, msg, inst: encode_omdl(tr, msg, q, n, m, C),
        decode=lambda enc, seed, pub, sh, fb: decode_omdl(enc, alg, seed, pub, q, n, m, fb),
        radices=omdl_radices(q, n, m, C, p),
    )


def order_setup(n: int, variant: str = "Prime", two_collisions: bool = False,
                prime_bits: int | None = None) -> CodecSetup:
    """Order finding over random n-bit primes, or over products of two distinct ``prime_bits``-bit primes."""
    if variant == "Prime":
        ps = nbit_primes(n)
        total_bits = n
        logM = math.log2(len(ps))
    else:
        pb = prime_bits or n
        ps = nbit_primes(pb)
        total_bits = 2 * pb
        logM = math.log2(math.comb(len(ps), 2))
    s = math.isqrt((1 << total_bits) - 1) + 1
    T = 2 * s
    alg = order_checked(algs.order_finder(total_bits), total_bits)
    C = T + order_check_cost(total_bits)
    rows = 1 + C
    div_bits = n if variant == "Prime" else (prime_bits or n)

    def sample(rng):
        if variant == "Prime":
            N = rng.choice(ps)
            return N, order_instance(N, total_bits)
        a, b = sorted(rng.sample(ps, 2))
        return (a, b), order_instance(a * b, total_bits)

    def won(out, msg):
        target = msg if variant == "Prime" else msg[0] * msg[1]
        return out == target

    def decode(enc, seed, pub, sh, fb):
        out = decode_unknown_order(enc, variant, alg, seed, pub, div_bits, (), fb, two_collisions)
        if variant == "Prime":
            return out
        # report the decoded product as the sorted prime pair it factors into
        divs = nbit_prime_divisors(out, div_bits)
        return tuple(divs) if len(divs) == 2 and divs[0] * divs[1] == out else (out, 1)

    radices = order_radices(variant, C, div_bits, rows, two_collisions)
    name = "order" if variant == "Prime" else ("rsa2" if two_collisions else "rsa")
    return CodecSetup(
        name, "bsgs-order", (1 << total_bits), T, C, logM, alg, sample,
        won=won,
        encode=lambda tr, msg, inst: encode_unknown_order(tr, variant, div_bits, msg, (), C, rows,
                                                          two_collisions),
        decode=decode, radices=radices,
    )


def audit_compression(setup: CodecSetup, trials: int, seed: int) -> CodecReport:
    """Round-trip uniform messages through encode/decode and compare with log|M| + log eps."""
    rep = CodecReport(setup.codec, setup.algorithm, setup.N, setup.T, trials, 0,
                      math.log2(math.prod(setup.radices) + 1), setup.logM)
    for i in range(trials):
        msg, inst = setup.sample(stream(seed, "instance", i))
        aseed = derive(seed, "algorithm", i)
        out, tr = run_algorithm(setup.alg, inst, aseed)
        if tr.tallies()["T"] > setup.C:
            rep.length_violations += 1
        win = setup.won(out, msg)
        enc = setup.encode(tr, msg, inst)
        if enc.radices != setup.radices:
            rep.length_violations += 1
        dec = setup.decode(enc, aseed, inst.public(), setup.shared(inst), stream(seed, "codec-fallback", i))
        ok = dec == msg
        rep.successes += ok
        if win:
            rep.wins += 1
            rep.roundtrip_on_wins += ok
            rep.collisions_on_wins += not enc.is_bot
    return rep


# ---------------------------------------------------------------------------
# root extraction and repeated squaring

def audit_root_repeated(kind: str, n: int, trials: int, seed: int, *, prover: str = "honest",
                        e: int = 3, t: int = 6, T: int | None = None) -> CodecReport:
    """Win rate of a root-extraction / repeated-squaring prover and order-codec round trips.

    ``kind`` is "RootExtraction" or "RepeatedSquaring".  Provers:
    RootExtraction: "honest" (find the order, invert e) or "trivial" (claims
    (2, g^x)).  RepeatedSquaring: "honest" (t squarings), "shortcut" (find the
    order, then g^(2^t mod N)) or "short" (only T < t squarings).
    """
    if kind == "RootExtraction" and e < 2:
        raise ContractViolation("root extraction requires e >= 2")
    ps = nbit_primes(n)
    s = math.isqrt((1 << n) - 1) + 1
    if kind == "RootExtraction":
        base = {"honest": partial(algs.root_extractor, e=e),
                "trivial": partial(algs.trivial_root_claim, e=2)}[prover]
        alg = root_checked(base)
        C = 2 * s + 2 * n + 2 * 8
        rows = 2 + C
    elif kind == "RepeatedSquaring":
        T = T if T is not None else t - 1
        base = {"honest": partial(algs.squaring_prover, t=t),
                "shortcut": partial(algs.shortcut_prover, t=t),
                "short": partial(algs.squaring_prover, t=T)}[prover]
        alg = repsq_checked(base, t)
        C = max(t, 2 * s + 2 * n) + t
        rows = 1 + C
    else:
        raise ContractViolation(f"unknown audit kind {kind}")
    rad = order_radices("Prime", C, n, rows)
    rep = CodecReport(kind, prover, 1 << n, C, trials, 0, math.log2(math.prod(rad) + 1),
                      math.log2(len(ps)))
    for i in range(trials):
        rng = stream(seed, "instance", i)
        N = rng.choice(ps)
        x = rng.randrange(1 << n)
        inst = root_instance(N, x, n) if kind == "RootExtraction" else order_instance(N, n)
        var_values = (x,) if kind == "RootExtraction" else ()
        aseed = derive(seed, "algorithm", i)
        out, tr = run_algorithm(alg, inst, aseed)
        eqs = [r for r in tr.records if r.kind == EQUALITY]
        if kind == "RootExtraction":
            win = out is not None and out[0] >= 2 and bool(eqs) and eqs[-1].answer == 1
        else:
            win = out is not None and bool(eqs) and eqs[-1].answer == 1
        enc = encode_unknown_order(tr, "Prime", n, N, var_values, C, rows)
        dec = decode_unknown_order(enc, "Prime", alg, aseed, inst.public(), n, var_values,
                                   stream(seed, "codec-fallback", i))
        ok = dec == N
        rep.successes += ok
        if win:
            rep.wins += 1
            rep.collisions_on_wins += not enc.is_bot
            rep.roundtrip_on_wins += ok or enc.is_bot
    rep.extra["win_rate"] = rep.wins / trials if trials else 0.0
    return rep
