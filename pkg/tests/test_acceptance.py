"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line."""
from __future__ import annotations

import itertools
import json
import math
import random
import time
from pathlib import Path

import numpy as np
import pytest

from _qtools import ALL_GATES, bot_sector_deviation, dims, gate_matrix, random_states, run_batch
from ggmlab import algorithms as algs
from ggmlab.codecs import audit_compression, dl_setup, gap_setup, mdl_setup, omdl_setup, order_setup
from ggmlab.harness import run
from ggmlab.oracle import dl_instance, run_algorithm
from ggmlab.quantum import eq_removal_experiment, shor_dl_qggm, shor_order_qgrm
from ggmlab.rng import derive, stream
from ggmlab.rr import equivalence_experiment, rr_bsgs, rr_probe
from ggmlab.smooth import (
    AffineSpace, concrete_session, index_calculus, random_subspace, smooth_rate_stats,
    subspace_smooth_count,
)
from ggmlab.tracker import CollisionClass, ZeroSet, analyze, solve_mdl, informative_rate_stats

FIXTURES = Path(__file__).parent / "fixtures"
SEED = 20240601

# audits shared between the per-codec criteria and the compression audit
_REPORTS: dict[str, object] = {}


def _audit(key, setup, trials):
    if key not in _REPORTS:
        _REPORTS[key] = audit_compression(setup, trials, SEED)
    return _REPORTS[key]


@pytest.fixture
def verdict(capsys):
    def report(k: int, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\nC{k:<2} {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail
    return report


def _sigma(p, n):
    p = min(max(p, 0.0), 1.0)
    return math.sqrt(p * (1 - p) / n)


def test_c01_dl_round_trip(verdict):
    rep = _audit("dl-bsgs", dl_setup(1009, 64), 2000)
    ok = rep.wins == rep.trials and rep.roundtrip_on_wins == rep.wins and rep.length_violations == 0
    verdict(1, ok, f"DL codec p=1009 BSGS T=64: wins {rep.wins}/{rep.trials}, "
                   f"decoded {rep.roundtrip_on_wins}/{rep.wins}")


def test_c02_dl_bound_envelope(verdict):
    parts, ok = [], True
    for T in (8, 16, 32, 64):
        alg = algs.random_collision(T)
        wins = 0
        for i in range(5000):
            x = stream(SEED, "instance", i).randrange(1009)
            out, _ = run_algorithm(alg, dl_instance(1009, x), derive(SEED, "algorithm", i))
            wins += out == x
        eps, bound = wins / 5000, (T + 3) ** 2 / (2 * 1009)
        good = eps <= bound + 3 * _sigma(bound, 5000)
        ok &= good
        parts.append(f"T={T}: {eps:.4f}<={bound:.4f}")
    verdict(2, ok, "random_collision p=1009, 5000 trials: " + ", ".join(parts))


def test_c03_informative_rate(verdict):
    st = informative_rate_stats(101, 2, trials=527, queries=190, seed=SEED, m=2)
    ok = st.queries >= 10**5 and st.rate_ok and st.tail_ok
    verdict(3, ok, f"p=101, {st.queries} relations: rate {st.rate:.5f} <= {st.rate_bound:.5f}+3sd; "
                   f"Pr[C>=2] {st.tail_rate:.4f} <= {st.tail_bound:.3f}+3sd (E=190)")


def _random_triple(p, m, rng):
    xs = [rng.randrange(p) for _ in range(m)]
    zs = ZeroSet(p, m)
    while zs.rank < m:
        c = [rng.randrange(p) for _ in range(m)]
        rel = (-sum(a * x for a, x in zip(c, xs)) % p, *c)
        zs.classify(rel)
    return xs, zs


def test_c04_mdl(verdict):
    p, m = 31, 3
    rng = random.Random(SEED)
    grid = np.array(list(itertools.product(range(p), repeat=m)))
    agree = 0
    for _ in range(200):
        xs, zs = _random_triple(p, m, rng)
        A = np.array(zs.collisions)
        hits = np.all((A[:, :1].T + grid @ A[:, 1:].T) % p == 0, axis=1)
        brute = [tuple(int(v) for v in r) for r in grid[hits]]
        agree += brute == [solve_mdl(zs, m, p)] == [tuple(xs)]
    rep = _audit("mdl", mdl_setup(p, m, 24), 200)
    ok = agree == 200 and rep.wins > 0 and rep.roundtrip_ok
    verdict(4, ok, f"p=31 m=3: solve_mdl = brute force on {agree}/200 triples; "
                   f"MDL codec decoded {rep.roundtrip_on_wins}/{rep.wins} wins")


def test_c05_omdl_gapdl(verdict):
    om = _audit("omdl", omdl_setup(101, 2, 1, 2, 16), 500)
    gp = _audit("gapdl", gap_setup("GapDL", 101, 20), 500)
    ok = om.wins > 0 and gp.wins > 0 and om.roundtrip_ok and gp.roundtrip_ok
    verdict(5, ok, f"p=101: OM-DL decoded {om.roundtrip_on_wins}/{om.wins}, "
                   f"GapDL decoded {gp.roundtrip_on_wins}/{gp.wins}")


def test_c06_unknown_order(verdict):
    setup = order_setup(8)
    rep = _audit("order", setup, 500)
    worst = -math.inf
    coeff_ok = True
    for i in range(500):
        _, inst = setup.sample(stream(SEED, "instance", i))
        _, tr = run_algorithm(setup.alg, inst, derive(SEED, "algorithm", i))
        T = tr.tallies()["T"]
        pl = analyze(tr).plist
        for wid in pl.rows:
            poly = pl.poly(wid)
            if poly is None:
                continue
            top = max(abs(c) for c in poly)
            coeff_ok &= top <= 2**T
            worst = max(worst, math.log2(top) - T if top else -T)
    rsa = _audit("rsa", order_setup(8, "Rsa", prime_bits=4), 500)
    ok = rep.wins > 0 and rep.roundtrip_ok and coeff_ok and rsa.wins > 0 and rsa.roundtrip_ok
    verdict(6, ok, f"8-bit primes: decoded {rep.roundtrip_on_wins}/{rep.wins}; "
                   f"max log2|coeff|-T = {worst:.1f}; RSA 4-bit decoded {rsa.roundtrip_on_wins}/{rsa.wins}")


def test_c07_compression_audit(verdict):
    _audit("dl-bsgs", dl_setup(1009, 64), 2000)
    for T in (8, 16, 32, 64):
        _audit(f"dl-rc-{T}", dl_setup(1009, T, "random-collision"), 1000)
    _audit("mdl", mdl_setup(31, 3, 24), 200)
    _audit("omdl", omdl_setup(101, 2, 1, 2, 16), 500)
    _audit("gapdl", gap_setup("GapDL", 101, 20), 500)
    _audit("gapcdh", gap_setup("GapCDH", 101, 40), 500)
    _audit("order", order_setup(8), 500)
    _audit("rsa", order_setup(8, "Rsa", prime_bits=4), 500)
    bad = [k for k, r in _REPORTS.items() if not r.bound_ok]
    worst = min((r.slack_bits, k) for k, r in _REPORTS.items() if not r.flagged)
    verdict(7, not bad, f"{len(_REPORTS)} codec audits, violations {bad or 'none'}; "
                        f"tightest slack {worst[0]:.2f} bits ({worst[1]})")


def test_c08_equivalence(verdict):
    faithful = equivalence_experiment(rr_bsgs, 11, 1000, SEED)
    probe = equivalence_experiment(lambda rr, rng: rr_probe(rr, rng), 101, 3000, SEED,
                                   retries=2, slack_bits=0, T=10)
    ok = faithful.disagreements == 0 and faithful.ok and probe.ok
    verdict(8, ok, f"faithful BSGS N=11: {faithful.disagreements}/1000 disagreements; "
                   f"probe N=101 r=2: {probe.rate:.4f} <= {probe.bound:.4f}+3sd")


def test_c09_gate_algebra(verdict):
    rng = np.random.default_rng(SEED)
    dev = inv_dev = deleg = bot = 0.0
    for N in range(2, 8):
        for name, kinds in ALL_GATES.items():
            U = gate_matrix(N, name)
            dev = max(dev, np.abs(U @ U.conj().T - np.eye(len(U))).max())
            bot = max(bot, bot_sector_deviation(U, N, kinds))
            V = random_states(len(U), 100, rng)
            deleg = max(deleg, np.abs(run_batch(N, name, V) - run_batch(N, name, V, True)).max())
        for fwd, back in (("op", "inv"), ("add", "sub")):
            V = random_states(math.prod(dims(N, "bee")), 100, rng)
            inv_dev = max(inv_dev, np.abs(run_batch(N, back, run_batch(N, fwd, V)) - V).max())
    ok = max(dev, inv_dev, deleg, bot) <= 1e-10
    verdict(9, ok, f"N<=7: max |UU*-I| {dev:.1e}, Op/Inv {inv_dev:.1e}, "
                   f"bot sector {bot:.1e}, delegated diff {deleg:.1e}")


def test_c10_shor(verdict):
    fx = json.loads((FIXTURES / "shor.json").read_text())
    t0 = time.perf_counter()
    d = shor_dl_qggm(17, 5)
    t1 = time.perf_counter()
    o = shor_order_qgrm(15, 2, L=fx["shor_order"]["L"])
    t2 = time.perf_counter()
    m = d.extra["machine"]
    dl_ok = (abs(d.success - fx["shor_dl"]["success"]) < 1e-9 and d.success >= 0.40
             and d.Q <= 4 * math.ceil(math.log2(17))
             and m.tally.quantum_eq == m.tally.classical_eq == 0 and d.audit(math.log2(17)))
    or_ok = (abs(o.success - fx["shor_order"]["success"]) < 1e-9 and o.success >= 0.25
             and o.audit(math.log2(15)))
    ok = dl_ok and or_ok and t1 - t0 <= 60 and t2 - t1 <= 60
    verdict(10, ok, f"DL N=17 success {d.success:.4f} Q={d.Q} eq=0 ({t1 - t0:.1f}s); "
                    f"order N=15 success {o.success:.4f} Q={o.Q} ({t2 - t1:.1f}s)")


def test_c11_eq_removal(verdict):
    rep = eq_removal_experiment(algs.random_collision(10), 101 * 103, 10, 5000, SEED)
    verdict(11, rep.ok, f"N=101*103 C=10: agreement {rep.rate:.4f} >= {rep.bound:.4f}-3sd")


def test_c12_index_calculus(verdict):
    q, B = 1019, 30
    g = None
    verified = 0
    for i in range(50):
        x = stream(SEED, "instance", i).randrange(q - 1)
        res = index_calculus(q, B, x, budget=20000, seed=SEED, trial=i)
        sess = concrete_session(q, B, x)
        g = sess.g
        verified += res.x is not None and pow(g, res.x, q) == pow(g, x, q)
    sess = concrete_session(q, B, 123)
    rates = smooth_rate_stats(sess, 5000, stream(SEED, "algorithm", 999))
    coord = subspace_smooth_count(sess, AffineSpace.coordinate(sess.fb.b, [0, 1]))
    rng = stream(SEED, "subspace")
    rand = [subspace_smooth_count(sess, random_subspace(sess.fb.b, 2, sess.order, rng)) for _ in range(20)]
    ok = verified == 50 and rates.fresh_ok and rates.cumulative_ok and coord > max(rand)
    verdict(12, ok, f"q=1019 B=30: {verified}/50 verified; informative rate {rates.fresh_rate:.4f} vs "
                    f"density {rates.density:.4f}; subspace {{2,3}} {coord:.4f} > max random {max(rand):.4f}")


def test_c13_determinism(verdict, tmp_path):
    cmds = [
        ["dl-bound", "--trials", "300", "--prime", "1009", "--ops", "16", "32"],
        ["audit-codec", "--trials", "100", "--codec", "omdl", "--prime", "23", "--ops", "10"],
        ["rr-translate", "--trials", "100", "--order", "101", "--algo", "probe", "--retries", "2",
         "--slack-bits", "0", "--ops", "10"],
        ["smooth-stats", "--samples", "1000", "--B", "7"],
        ["qsim", "--order", "13", "--x", "4"],
    ]
    same = 0
    for k, c in enumerate(cmds):
        a, b = tmp_path / f"{k}a.csv", tmp_path / f"{k}b.csv"
        run([*c, "--seed", "7", "--out", str(a)])
        run([*c, "--seed", "7", "--out", str(b)])
        same += a.read_bytes() == b.read_bytes() and len(a.read_bytes()) > 0
    verdict(13, same == len(cmds), f"{same}/{len(cmds)} experiments byte-identical on rerun")
