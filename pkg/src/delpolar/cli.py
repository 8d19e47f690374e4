"""Experiment driver.

Subcommands:

    construct   Monte-Carlo per-index statistics -> IndexStats CSV +
                CodeConfig JSON (the contract consumed by `run`)
    run         end-to-end frame-error sweep for a CodeConfig
    polarize    entropy-fraction table over a range of depths -> CSV
    rate        information-rate estimate (exact enumeration or MC)
    oracle      self-check of trellis laws / transforms / SC leaves
                against direct enumeration

Every output is deterministic given the flags and seed, except the timing
block inside run reports.  Exit codes: 0 success, 1 runtime failure
(including oracle deviations), 2 invalid configuration or arguments.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import _rng
from .arikan import index_to_branch, transform
from .channels import exact_law, tdc_exact_law, transmit
from .construction import (LANES, CodeConfig, estimate_index_stats,
                           estimate_information_rate, polarization_profile,
                           profile_to_csv, select_information_set,
                           stats_to_csv, wilson_interval)
from .guardband import GuardLayout, insert_guard_bands, segment
from .hmm_input import (exact_probability, markov_process, parse_process_arg,
                        uniform_process)
from .sc_decoder import leaf_posterior, two_stage_decode, two_stage_encode
from .trellis import (build_channel_trellis, build_process_trellis,
                      build_tdc_trellis, minus_transform, path_sum,
                      plus_transform)

_REPORT_SCHEMA = 1
_RUN_CHUNK = 32


def _fail(msg: str, code: int) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return code


# ---------------------------------------------------------------------------
# construct


def cmd_construct(args) -> int:
    try:
        process = parse_process_arg(args.process)
        nu_prime = (args.nu / 2.0 if args.nu_prime is None
                    else args.nu_prime)
        n0 = int(math.floor(args.nu * args.n + 1e-9))
        xi = args.xi
        if xi is None:
            nu_mid = (args.nu + nu_prime) / 2.0
            xi = (1.0 - nu_mid / args.nu) / 4.0
        layout = GuardLayout(n=args.n, n0=n0, xi=xi)
        if args.trials < 1:
            raise ValueError("--trials must be at least 1")
        if (args.rate is None) == (args.epsilon is None):
            raise ValueError("give exactly one of --rate / --epsilon")
        lanes = tuple(args.lanes.split(","))
        unknown = set(lanes) - set(LANES)
        if unknown:
            raise ValueError(f"unknown lanes {sorted(unknown)}")
    except (ValueError, OSError) as exc:
        return _fail(str(exc), 2)

    stats = estimate_index_stats(process, args.n, args.delta, args.trials,
                                 args.seed, layout=layout, lanes=lanes,
                                 workers=args.workers)
    info = select_information_set(
        stats, rate=args.rate, epsilon=args.epsilon)
    try:
        config = CodeConfig(n=args.n, nu=args.nu, nu_prime=nu_prime,
                            xi=xi, delta=args.delta, process=process,
                            info_set=info, seed=args.seed, rate=args.rate)
    except ValueError as exc:
        return _fail(str(exc), 2)

    stats_to_csv(stats, args.out + ".csv")
    config.save(args.out + ".json")
    print(f"wrote {args.out}.csv ({len(stats)} indices) and {args.out}.json "
          f"({len(info)} information indices)")
    return 0


# ---------------------------------------------------------------------------
# run


def _run_chunk(config: CodeConfig, seed: int, lo: int, hi: int):
    layout = config.layout()
    process = config.process
    info = config.info_set
    info_idx = np.asarray(info, dtype=np.int64)
    k = len(info)
    n_total = config.n_total
    phi = layout.phi
    prior = build_process_trellis(process, layout.block_len)
    priors = [prior] * phi
    records = []
    times = {"encode": 0.0, "channel": 0.0, "segment": 0.0, "decode": 0.0}
    for trial in range(lo, hi):
        payload = _rng.stream(seed, "payload", trial).integers(
            0, 2, size=k, dtype=np.uint8)
        common = _rng.uniform_vector(seed, "common", n_total, trial)

        t0 = time.perf_counter()
        enc = two_stage_encode(priors, info, payload, common)
        framed = insert_guard_bands(enc.x, layout)
        t1 = time.perf_counter()
        y, kept = transmit(framed, config.delta,
                           _rng.stream(seed, "channel", trial))
        t2 = time.perf_counter()
        seg = segment(y, layout, origins=np.flatnonzero(kept))
        t3 = time.perf_counter()
        # a mis-split can return a block longer than the model allows; the
        # decoder then has no usable observation for it and falls back to
        # the input prior (the frame is usually lost regardless)
        evidence = [build_tdc_trellis(process, blk, layout.block_len,
                                      config.delta)
                    if blk.size <= layout.block_len else prior
                    for blk in seg.blocks]
        dec = two_stage_decode(evidence, priors, info, common)
        t4 = time.perf_counter()

        bit_errors = int((dec.u[info_idx - 1] != payload).sum()) if k else 0
        records.append({
            "trial": trial,
            "frame_error": bool(bit_errors > 0),
            "segmentation_ok": bool(seg.genie_ok),
            "bit_errors": bit_errors,
        })
        times["encode"] += t1 - t0
        times["channel"] += t2 - t1
        times["segment"] += t3 - t2
        times["decode"] += t4 - t3
    return records, times


def cmd_run(args) -> int:
    try:
        config = CodeConfig.load(args.config)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        return _fail(f"cannot load config {args.config}: {exc}", 2)
    if args.trials < 1:
        return _fail("--trials must be at least 1", 2)
    seed = config.seed if args.seed is None else args.seed

    wall0 = time.perf_counter()
    chunks = [(lo, min(lo + _RUN_CHUNK, args.trials))
              for lo in range(0, args.trials, _RUN_CHUNK)]
    work = [(config, seed, lo, hi) for lo, hi in chunks]
    if args.workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=min(args.workers, 8)) as pool:
            parts = list(pool.map(_run_chunk, *zip(*work)))
    else:
        parts = [_run_chunk(*w) for w in work]
    wall = time.perf_counter() - wall0

    records = [r for recs, _ in parts for r in recs]
    records.sort(key=lambda r: r["trial"])
    times = {ph: sum(t[ph] for _, t in parts)
             for ph in ("encode", "channel", "segment", "decode")}

    k = len(config.info_set)
    lam = config.layout().encoded_length()
    frame_errors = sum(r["frame_error"] for r in records)
    seg_misses = sum(not r["segmentation_ok"] for r in records)
    total_bit_errors = sum(r["bit_errors"] for r in records)
    lo95, hi95 = wilson_interval(frame_errors, args.trials)
    report = {
        "schema_version": _REPORT_SCHEMA,
        "config": config.to_dict(),
        "trials": args.trials,
        "seed": seed,
        "per_trial": records,
        "aggregates": {
            "frame_errors": frame_errors,
            "fer": frame_errors / args.trials,
            "fer_wilson95": [lo95, hi95],
            "ber": (total_bit_errors / (k * args.trials)) if k else 0.0,
            "segmentation_miss_rate": seg_misses / args.trials,
            "info_bits": k,
            "code_rate": k / config.n_total,
            "transmitted_length": lam,
            "rate_per_transmitted_symbol": k / lam,
        },
        "timing": {"wall_seconds": wall, "phase_seconds": times},
    }
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    agg = report["aggregates"]
    print(f"FER {agg['fer']:.4g} (95% [{lo95:.4g}, {hi95:.4g}]), "
          f"BER {agg['ber']:.4g}, seg-miss {agg['segmentation_miss_rate']:.4g}, "
          f"Lambda {lam}, wrote {args.out}")
    return 0


# ---------------------------------------------------------------------------
# polarize / rate


def cmd_polarize(args) -> int:
    try:
        process = parse_process_arg(args.process)
        if args.trials < 1:
            raise ValueError("--trials must be at least 1")
    except (ValueError, OSError) as exc:
        return _fail(str(exc), 2)
    rows = polarization_profile(process, args.n, args.delta, args.trials,
                                args.seed, epsilon=args.epsilon,
                                workers=args.workers)
    profile_to_csv(rows, args.out)
    for r in rows:
        print(f"n={r.n}: low {r.frac_low:.3f}, mid {r.frac_mid:.3f}, "
              f"high {r.frac_high:.3f}")
    print(f"wrote {args.out}")
    return 0


def cmd_rate(args) -> int:
    try:
        process = parse_process_arg(args.process)
        est = estimate_information_rate(
            process, args.delta, args.length, method=args.method,
            channel=args.channel, trials=args.trials, seed=args.seed)
    except (ValueError, OSError) as exc:
        return _fail(str(exc), 2)
    doc = {
        "schema_version": _REPORT_SCHEMA,
        "rate": est.rate,
        "stderr": est.stderr,
        "h_input": est.h_input,
        "h_conditional": est.h_conditional,
        "method": est.method,
        "channel": est.channel,
        "n_total": est.n_total,
        "trials": est.trials,
    }
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    print(text, end="")
    return 0


# ---------------------------------------------------------------------------
# oracle


def _rel_dev(a: float, b: float) -> float:
    return abs(a - b) / max(b, 1e-300)


def _oracle_processes():
    return (("uniform", uniform_process()), ("markov:0.7", markov_process(0.7)))


def _check_laws(n_max: int, perturb: float, tdc: bool) -> float:
    """Trellis path sums against the enumeration law, all x and y."""
    worst = 0.0
    for _, process in _oracle_processes():
        for n in range(1, n_max + 1):
            delta = 0.35
            outputs = _all_outputs(n, tdc)
            for y in outputs:
                if tdc:
                    t = build_tdc_trellis(process, y, n, delta)
                else:
                    t = build_channel_trellis(process, y, n, delta)
                if perturb:
                    t.weight[0] *= 1.0 + perturb
                for bits in itertools.product((0, 1), repeat=n):
                    x = np.array(bits, dtype=np.uint8)
                    if tdc:
                        law = tdc_exact_law(x, y, delta)
                    else:
                        law = exact_law(x, y, delta)
                    want = exact_probability(process, x) * law
                    got = math.exp(path_sum(t, x))
                    worst = max(worst, _rel_dev(got, want))
    return worst


def _all_outputs(n: int, tdc: bool):
    outs = []
    for m in range(n + 1):
        for bits in itertools.product((0, 1), repeat=m):
            y = np.array(bits, dtype=np.uint8)
            if tdc and y.size and (y[0] != 1 or y[-1] != 1):
                continue
            outs.append(y)
    return outs


def _check_transforms(n_max: int) -> float:
    """Minus/plus path sums against direct sums over the raw trellis."""
    worst = 0.0
    delta = 0.3
    for _, process in _oracle_processes():
        for n in (2, 4, 8):
            if n > n_max:
                continue
            half = n // 2
            for y in ([], [1], [0, 1], [1, 1, 0]):
                if len(y) > n:
                    continue
                t = build_channel_trellis(process, np.array(y, np.uint8),
                                          n, delta)
                tm = minus_transform(t)
                for zb in itertools.product((0, 1), repeat=half):
                    z = np.array(zb, dtype=np.uint8)
                    tp = plus_transform(t, z)
                    for wb in itertools.product((0, 1), repeat=half):
                        w = np.array(wb, dtype=np.uint8)
                        x = np.empty(n, dtype=np.uint8)
                        x[0::2] = z ^ w
                        x[1::2] = w
                        want = math.exp(path_sum(t, x))
                        got = math.exp(path_sum(tp, w))
                        worst = max(worst, _rel_dev(got, want))
                    want_m = sum(
                        math.exp(path_sum(t, _mix(z, wb, n)))
                        for wb in itertools.product((0, 1), repeat=half))
                    got_m = math.exp(path_sum(tm, z))
                    worst = max(worst, _rel_dev(got_m, want_m))
    return worst


def _mix(z: np.ndarray, wb, n: int) -> np.ndarray:
    w = np.array(wb, dtype=np.uint8)
    x = np.empty(n, dtype=np.uint8)
    x[0::2] = z ^ w
    x[1::2] = w
    return x


def _check_leaves(n_max: int) -> float:
    """SC leaf posteriors against brute-force joints."""
    worst = 0.0
    delta = 0.3
    n = 1 << (min(n_max, 8).bit_length() - 1)  # largest power of two <= cap
    depth = n.bit_length() - 1
    for _, process in _oracle_processes():
        for y in ([1, 0, 1], [1, 1]):
            if len(y) > n:
                continue
            y = np.array(y, dtype=np.uint8)
            t = build_channel_trellis(process, y, n, delta)
            joint = []
            for bits in itertools.product((0, 1), repeat=n):
                x = np.array(bits, dtype=np.uint8)
                p = exact_probability(process, x) * exact_law(x, y, delta)
                joint.append((tuple(int(v) for v in transform(x)), p))
            for i in sorted({1, max(1, n // 2), n}):
                for past in itertools.product((0, 1), repeat=i - 1):
                    want = [0.0, 0.0]
                    for u, p in joint:
                        if u[:i - 1] == past:
                            want[u[i - 1]] += p
                    post = leaf_posterior(t, index_to_branch(i, depth),
                                          list(past))
                    for v in (0, 1):
                        got = math.exp((post.log_p0, post.log_p1)[v])
                        if want[v] > 0:
                            worst = max(worst, _rel_dev(got, want[v]))
                        else:
                            worst = max(worst, got)
    return worst


def cmd_oracle(args) -> int:
    checks = [
        ("deletion law (raw)",
         lambda: _check_laws(args.n_max, args.perturb, tdc=False)),
        ("deletion law (trimmed)",
         lambda: _check_laws(min(args.n_max, 6), 0.0, tdc=True)),
        ("minus/plus transforms", lambda: _check_transforms(args.n_max)),
        ("SC leaf posteriors", lambda: _check_leaves(args.n_max)),
    ]
    failed = False
    for name, fn in checks:
        t0 = time.perf_counter()
        dev = fn()
        dt = time.perf_counter() - t0
        ok = dev <= 1e-9
        failed |= not ok
        print(f"{'PASS' if ok else 'FAIL'} {name}: max relative deviation "
              f"{dev:.3e} ({dt:.1f}s)")
    return 1 if failed else 0


# ---------------------------------------------------------------------------
# parser


def _add_process_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--process", default="uniform",
                   help="input process: 'uniform', 'markov:p', or a JSON file")
    p.add_argument("--delta", type=float, required=True,
                   help="deletion probability")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="delpolar",
        description="polar codes on the binary deletion channel")
    sub = top.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct",
                       help="estimate per-index statistics and pick a code")
    _add_process_flags(c)
    c.add_argument("--n", type=int, required=True, help="transform depth")
    c.add_argument("--nu", type=float, required=True,
                   help="block-depth fraction; n0 = floor(nu*n)")
    c.add_argument("--nu-prime", type=float, default=None,
                   help="rate-margin exponent (default nu/2)")
    c.add_argument("--xi", type=float, default=None,
                   help="guard-band decay (default (1-nu''/nu)/4)")
    c.add_argument("--rate", type=float, default=None,
                   help="target code rate; picks floor(rate*N) indices")
    c.add_argument("--epsilon", type=float, default=None,
                   help="threshold mode: all indices with Z,K < epsilon")
    c.add_argument("--lanes", default="raw,pinned,tdc,prior",
                   help="comma-separated subset of raw,pinned,tdc,prior; "
                        "skipped lanes appear as nan columns")
    c.add_argument("--out", default="construction",
                   help="output prefix for .csv and .json")
    c.set_defaults(fn=cmd_construct)

    r = sub.add_parser("run", help="end-to-end frame-error experiment")
    r.add_argument("--config", required=True, help="CodeConfig JSON path")
    r.add_argument("--trials", type=int, default=1000)
    r.add_argument("--seed", type=int, default=None,
                   help="run seed (default: the config seed)")
    r.add_argument("--workers", type=int, default=1)
    r.add_argument("--out", default="report.json")
    r.set_defaults(fn=cmd_run)

    p = sub.add_parser("polarize", help="entropy-fraction table over depths")
    _add_process_flags(p)
    p.add_argument("--n", type=int, nargs="+", required=True,
                   help="transform depths to profile")
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--out", default="polarization.csv")
    p.set_defaults(fn=cmd_polarize)

    t = sub.add_parser("rate", help="information-rate estimate")
    _add_process_flags(t)
    t.add_argument("--length", type=int, required=True,
                   help="blocklength N")
    t.add_argument("--method", choices=("auto", "exact", "mc"),
                   default="auto")
    t.add_argument("--channel", choices=("raw", "tdc"), default="raw")
    t.add_argument("--out", default=None)
    t.set_defaults(fn=cmd_rate)

    o = sub.add_parser("oracle",
                       help="equivalence self-checks against enumeration")
    o.add_argument("--n-max", type=int, default=8)
    o.add_argument("--perturb", type=float, default=0.0,
                   help="multiply one trellis weight by (1+eps); the suite "
                        "must then fail (sensitivity hook)")
    o.set_defaults(fn=cmd_oracle)
    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
