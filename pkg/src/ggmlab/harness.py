"""Command-line experiments.  Every subcommand prints (or writes) a CSV with a
header row and exits 1 iff one of its asserted bounds fails."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from functools import partial
from pathlib import Path

from . import algorithms as algs
from . import codecs, quantum, rr, smooth
from .oracle import dl_instance, run_algorithm
from .rng import derive, stream
from .tracker import informative_rate_stats


def _fmt(v):
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return "inf" if math.isinf(v) else f"{v:.6f}"
    return str(v)


def _csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _fmt(v) for k, v in r.items()})
    return buf.getvalue()


def _sigma(p: float, n: int) -> float:
    p = min(max(p, 0.0), 1.0)
    return math.sqrt(p * (1 - p) / n) if n else 0.0


# ---------------------------------------------------------------------------
# experiments: each returns (rows, ok)

def dl_bound(args):
    rows, ok = [], True
    for T in args.ops:
        alg = {"bsgs": algs.bsgs, "random-collision": algs.random_collision}[args.algo](T)
        wins = 0
        for i in range(args.trials):
            x = stream(args.seed, "instance", i).randrange(args.prime)
            out, _ = run_algorithm(alg, dl_instance(args.prime, x), derive(args.seed, "algorithm", i))
            wins += out == x
        eps = wins / args.trials
        bound = (T + 3) ** 2 / (2 * args.prime)
        sig = _sigma(min(bound, 1.0), args.trials)
        passed = eps <= bound + 3 * sig
        ok &= passed
        rows.append({"prime": args.prime, "algo": args.algo, "T": T, "trials": args.trials,
                     "wins": wins, "eps_hat": eps, "bound": bound, "sigma": sig, "pass": passed})
    return rows, ok


def _bound_rows(setups, args):
    rows, ok = [], True
    for st in setups:
        rep = codecs.audit_compression(st, args.trials, args.seed)
        bound = min(1.0, 2 ** (rep.m_bits - rep.logM))
        sig = _sigma(bound, rep.trials)
        win_rate = rep.wins / rep.trials
        passed = win_rate <= bound + 3 * sig and rep.ok
        ok &= passed
        rows.append({"codec": rep.codec, "algorithm": rep.algorithm, "N": rep.N, "T": rep.T,
                     "trials": rep.trials, "win_rate": win_rate, "eps_hat": rep.eps_hat,
                     "bound": bound, "sigma": sig, "roundtrip": rep.roundtrip_on_wins == rep.wins,
                     "pass": passed})
    return rows, ok


def mdl_bound(args):
    return _bound_rows([codecs.mdl_setup(args.prime, args.m, T) for T in args.ops], args)


def omdl_bound(args):
    return _bound_rows([codecs.omdl_setup(args.prime, args.q, args.n, args.m, T) for T in args.ops], args)


def gap_bound(args):
    return _bound_rows([codecs.gap_setup(args.kind, args.prime, T) for T in args.ops], args)


def order_bound(args):
    return _bound_rows([codecs.order_setup(args.bits, args.variant, args.two_collisions)], args)


def _setup_from(args):
    c = args.codec
    if c == "dl":
        return codecs.dl_setup(args.prime, args.ops, args.algo)
    if c == "mdl":
        return codecs.mdl_setup(args.prime, args.m, args.ops)
    if c in ("gapdl", "gapcdh"):
        return codecs.gap_setup("GapDL" if c == "gapdl" else "GapCDH", args.prime, args.ops)
    if c == "omdl":
        return codecs.omdl_setup(args.prime, args.q, args.n, args.m, args.ops)
    if c == "order":
        return codecs.order_setup(args.bits)
    if c in ("rsa", "rsa2"):
        return codecs.order_setup(args.bits, "Rsa", c == "rsa2")
    raise SystemExit(f"unknown codec {c}")


def audit_codec(args):
    rep = codecs.audit_compression(_setup_from(args), args.trials, args.seed)
    row = rep.row()
    row.update({"sigma_bits": rep.sigma_bits, "wins": rep.wins, "roundtrip": rep.roundtrip_on_wins,
                "pass": rep.ok})
    return [row], rep.ok


def audit_root_repeated(args):
    rep = codecs.audit_root_repeated(args.kind, args.bits, args.trials, args.seed, prover=args.prover,
                                     e=args.e, t=args.t)
    ok = rep.roundtrip_on_wins == rep.wins
    row = {"kind": rep.codec, "prover": rep.algorithm, "bits": args.bits, "trials": rep.trials,
           "win_rate": rep.extra["win_rate"], "collision_wins": rep.collisions_on_wins,
           "roundtrip": rep.roundtrip_on_wins, "m_bits": rep.m_bits, "logM": rep.logM, "pass": ok}
    return [row], ok


def rr_translate(args):
    if args.algo == "bsgs":
        alg = rr.rr_bsgs
    else:
        alg = partial(rr.rr_probe, labels=args.labels, probes=args.probes)
    rep = rr.equivalence_experiment(alg, args.order, args.trials, args.seed,
                                    retries=args.retries, slack_bits=args.slack_bits, T=args.ops)
    return [{"N": rep.N, "algo": args.algo, "retries": rep.retries if rep.retries else 0,
             "T": rep.T, "trials": rep.trials, "disagreements": rep.disagreements,
             "rate": rep.rate, "bound": rep.bound, "degenerate": rep.degenerate,
             "pass": rep.ok}], rep.ok


def smooth_stats(args):
    rng = stream(args.seed, "instance")
    if args.mode == "concrete":
        sess = smooth.concrete_session(args.q, args.B, rng.randrange(args.q - 1))
    else:
        sess = smooth.idealized_session(args.order, args.B, args.p_s, rng.randrange(args.order), rng)
    st = smooth.smooth_rate_stats(sess, args.samples, stream(args.seed, "algorithm"))
    ok = st.fresh_ok and st.cumulative_ok
    return [{"mode": sess.mode, "N": sess.order, "B": args.B, "samples": st.samples,
             "density": st.density, "fresh_rate": st.fresh_rate, "cumulative_rate": st.cumulative_rate,
             "sigma": st.sigma, "pass": ok}], ok


def index_calculus(args):
    rows, ok = [], True
    for i in range(args.instances):
        x = stream(args.seed, "instance", i).randrange(args.q - 1)
        res = smooth.index_calculus(args.q, args.B, x, args.budget, args.seed, i)
        good = res.x is None or res.verified
        ok &= good
        rows.append({"trial": i, "x": x, "found": "" if res.x is None else res.x,
                     "relations": res.relations, "attempts": res.attempts, "verified": res.verified,
                     "pass": good})
    return rows, ok


def qsim(args):
    prog = args.program
    if prog == "shor-dl":
        res = quantum.shor_dl_qggm(args.order, args.x, args.seed)
        log_m = math.log2(args.order)
    elif prog == "shor-order":
        res = quantum.shor_order_qgrm(args.order, args.a, seed=args.seed)
        log_m = math.log2(args.order)
    else:
        m, dist = quantum.run_program(Path(prog).read_text())
        rows = [{"outcome": " ".join(map(str, k)), "probability": p} for k, p in sorted(dist.items())]
        return rows or [{"outcome": "", "probability": 1.0}], True
    ok = res.audit(log_m) and res.quantum_eq == 0
    return [{"program": prog, "order": args.order, "answer": res.answer, "success": res.success,
             "Q": res.Q, "C": res.C, "quantum_eq": res.quantum_eq, "audit": res.audit(log_m),
             "pass": ok}], ok


def eq_remove(args):
    alg = algs.random_collision(args.ops)
    rep = quantum.eq_removal_experiment(alg, args.order, args.ops, args.trials, args.seed)
    return [{"N": rep.N, "p": rep.p, "C": rep.C, "trials": rep.trials, "agreement": rep.rate,
             "bound": rep.bound, "sigma": rep.sigma, "pass": rep.ok}], rep.ok


def sz_rate(args):
    st = informative_rate_stats(args.prime, args.vars, args.trials, args.queries, args.seed)
    ok = st.rate_ok and st.tail_ok
    return [{"p": args.prime, "trials": st.tail_trials, "relations": st.queries, "rate": st.rate,
             "bound": st.rate_bound, "tail_rate": st.tail_rate, "tail_bound": st.tail_bound,
             "pass": ok}], ok


# ---------------------------------------------------------------------------
# CLI

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ggmlab", description="Generic-group lower-bound experiments")
    p.add_argument("--config", help="key=value file supplying defaults")
    sub = p.add_subparsers(dest="command", required=True)

    def cmd(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--trials", type=int, default=500)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", help="CSV path (default stdout)")
        sp.add_argument("--config", help="key=value file supplying defaults")
        sp.set_defaults(func=fn)
        return sp

    sp = cmd("dl-bound", dl_bound, "DL success rate against (T+3)^2/(2p)")
    sp.add_argument("--prime", type=int, default=1009)
    sp.add_argument("--algo", choices=["bsgs", "random-collision"], default="random-collision")
    sp.add_argument("--ops", type=int, nargs="+", default=[8, 16, 32, 64])

    sp = cmd("mdl-bound", mdl_bound, "multi-instance DL success against the codec bound")
    sp.add_argument("--prime", type=int, default=31)
    sp.add_argument("--m", type=int, default=3)
    sp.add_argument("--ops", type=int, nargs="+", default=[12])

    sp = cmd("omdl-bound", omdl_bound, "one-more DL success against the codec bound")
    sp.add_argument("--prime", type=int, default=101)
    sp.add_argument("--q", type=int, default=2)
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--m", type=int, default=2)
    sp.add_argument("--ops", type=int, nargs="+", default=[20])

    sp = cmd("gap-bound", gap_bound, "gap-DL / gap-CDH success against the codec bound")
    sp.add_argument("--kind", choices=["GapDL", "GapCDH"], default="GapDL")
    sp.add_argument("--prime", type=int, default=101)
    sp.add_argument("--ops", type=int, nargs="+", default=[20])

    sp = cmd("order-bound", order_bound, "unknown-order success against the codec bound")
    sp.add_argument("--bits", type=int, default=8)
    sp.add_argument("--variant", choices=["Prime", "Rsa"], default="Prime")
    sp.add_argument("--two-collisions", action="store_true")

    sp = cmd("audit-codec", audit_codec, "compression audit of one codec")
    sp.add_argument("--codec", choices=["dl", "mdl", "gapdl", "gapcdh", "omdl", "order", "rsa", "rsa2"],
                    default="dl")
    sp.add_argument("--algo", choices=["bsgs", "random-collision"], default="bsgs")
    sp.add_argument("--prime", type=int, default=101)
    sp.add_argument("--ops", type=int, default=20)
    sp.add_argument("--m", type=int, default=2)
    sp.add_argument("--q", type=int, default=2)
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--bits", type=int, default=8)

    sp = cmd("audit-root-repeated", audit_root_repeated, "root extraction / repeated squaring audit")
    sp.add_argument("--kind", choices=["RootExtraction", "RepeatedSquaring"], default="RootExtraction")
    sp.add_argument("--prover", default="honest")
    sp.add_argument("--bits", type=int, default=8)
    sp.add_argument("--e", type=int, default=3)
    sp.add_argument("--t", type=int, default=6)

    sp = cmd("rr-translate", rr_translate, "random-representation vs type-safe coupled runs")
    sp.add_argument("--order", type=int, default=11)
    sp.add_argument("--algo", choices=["bsgs", "probe"], default="bsgs")
    sp.add_argument("--retries", type=int, default=None)
    sp.add_argument("--slack-bits", type=int, default=64)
    sp.add_argument("--ops", type=int, default=None)
    sp.add_argument("--labels", type=int, default=6)
    sp.add_argument("--probes", type=int, default=2)

    sp = cmd("smooth-stats", smooth_stats, "informative smoothing rate vs smooth density")
    sp.add_argument("--mode", choices=["concrete", "idealized"], default="concrete")
    sp.add_argument("--q", type=int, default=1019)
    sp.add_argument("--order", type=int, default=10007)
    sp.add_argument("--B", type=int, default=30)
    sp.add_argument("--p-s", type=float, default=0.05)
    sp.add_argument("--samples", type=int, default=5000)

    sp = cmd("index-calculus", index_calculus, "basic index calculus with verification")
    sp.add_argument("--q", type=int, default=1019)
    sp.add_argument("--B", type=int, default=30)
    sp.add_argument("--instances", type=int, default=50)
    sp.add_argument("--budget", type=int, default=2000)

    sp = cmd("qsim", qsim, "statevector demos or a JSON program")
    sp.add_argument("--program", default="shor-dl", help="shor-dl, shor-order or a JSON file")
    sp.add_argument("--order", type=int, default=17)
    sp.add_argument("--x", type=int, default=5)
    sp.add_argument("--a", type=int, default=2)

    sp = cmd("eq-remove", eq_remove, "classical equality removal agreement")
    sp.add_argument("--order", type=int, default=101 * 103)
    sp.add_argument("--ops", type=int, default=10)

    sp = cmd("sz-rate", sz_rate, "informative frequency of random equality relations")
    sp.add_argument("--prime", type=int, default=101)
    sp.add_argument("--vars", type=int, default=1)
    sp.add_argument("--queries", type=int, default=190)
    return p


def read_config(path: str) -> dict[str, str]:
    out = {}
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SystemExit(f"bad config line: {line!r}")
        k, v = line.split("=", 1)
        out[k.strip().lstrip("-").replace("-", "_")] = v.strip()
    return out


def parse_args(argv=None) -> argparse.Namespace:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        cfg = read_config(known.config)
        args = parser.parse_args(argv)
        sp = parser._subparsers._group_actions[0].choices[args.command]
        acts = {a.dest: a for a in sp._actions}
        explicit = {a.dest for a in sp._actions for s in a.option_strings if s in argv}
        for k, v in cfg.items():
            if k not in acts:
                parser.error(f"unknown config key {k}")
            if k in explicit:
                continue
            a = acts[k]
            if a.nargs in ("+", "*"):
                val = [a.type(x) if a.type else x for x in v.replace(",", " ").split()]
            elif a.const is True:
                val = v.lower() in ("1", "true", "yes")
            else:
                val = a.type(v) if a.type else v
            setattr(args, k, val)
        return args
    return parser.parse_args(argv)


def run(argv=None) -> tuple[str, bool]:
    args = parse_args(argv)
    rows, ok = args.func(args)
    text = _csv(rows)
    if args.out:
        Path(args.out).write_text(text)
        cfg = {k: v for k, v in vars(args).items() if k not in ("func", "out")}
        Path(args.out + ".config.json").write_text(json.dumps(cfg, sort_keys=True, indent=1) + "\n")
    return text, ok


def main(argv=None) -> int:
    text, ok = run(argv)
    args = parse_args(argv)
    if not args.out:
        sys.stdout.write(text)
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
