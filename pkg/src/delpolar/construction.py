"""Monte-Carlo code construction and information-theoretic diagnostics.

Per-index quality is measured by sampling (x, y) pairs, walking the trellis
lanes with genie decisions (the true transform-domain prefix, not decoder
feedback), and averaging functionals of the resulting conditional
P(U_i = 0 | true past, evidence):

    h      entropy given the raw channel output
    h_hat  entropy given the raw output and the bracketing process states
    h_star entropy given the trimmed output (what the scheme's decoder sees)
    Z      2 sqrt(p0 p1) of the trimmed-output conditional
    K      |p0 - p1| of the no-evidence (process prior) conditional

h_hat <= h <= h_star in expectation: pinning states adds information and
trimming removes it.  Z drives information-set selection for the evidence
side and K for the shaped side; both shrink toward 0 on good indices.

Estimation runs either on one monolithic trellis, or in scheme mode
(a GuardLayout is supplied) on independent per-block trellises combined by
the two-stage pass, which is the regime the guard-banded code operates in.
Trials derive per-trial RNG streams from (seed, "construction", trial), and
sums are accumulated in fixed chunk order, so results are bit-identical for
any worker count.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _rng
from .arikan import transform
from .channels import transmit, trim
from .guardband import GuardLayout
from .hmm_input import (FaimProcess, exact_probability, process_from_dict,
                        process_to_dict, sample, sample_batch)
from .sc_decoder import TrellisLane, conditional_probability, two_stage_pass
from .trellis import (build_channel_trellis, build_process_trellis,
                      build_tdc_trellis, path_sum, total_mass)

__all__ = [
    "IndexStats",
    "CodeConfig",
    "RateEstimate",
    "ProfileRow",
    "estimate_index_stats",
    "select_information_set",
    "estimate_information_rate",
    "polarization_profile",
    "wilson_interval",
    "stats_to_csv",
    "stats_from_csv",
    "profile_to_csv",
]

LANES = ("raw", "pinned", "tdc", "prior")
_CHUNK = 64  # trials per reduction chunk; fixed so worker count never
             # changes floating-point summation order


def _binary_entropy(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


@dataclass(frozen=True)
class IndexStats:
    """Monte-Carlo estimates for one transform-domain index (1-based).

    Estimates are clamped to [0, 1]; the unclamped means are kept in raw.
    Lanes that were not sampled hold nan.
    """

    index: int
    est_entropy: float
    est_entropy_given_states: float
    est_entropy_tdc: float
    est_Z: float
    est_K: float
    se_entropy: float
    se_entropy_given_states: float
    se_entropy_tdc: float
    se_Z: float
    se_K: float
    genie_error_rate: float
    sample_count: int
    raw: dict = field(default_factory=dict, repr=False, compare=False)


def _trial_values(process: FaimProcess, n: int, delta: float,
                  layout: GuardLayout | None, lanes: tuple[str, ...],
                  rng: np.random.Generator,
                  prior_base) -> tuple[np.ndarray, np.ndarray]:
    """One genie-aided trial; returns (values[5, N], tdc_errors[N]).

    Row order: h, h_hat, h_star, Z, K.  Unsampled lanes stay nan.
    """
    n_total = 1 << n
    vals = np.full((5, n_total), np.nan)
    errs = np.zeros(n_total, dtype=np.uint8)

    if layout is None:
        x, s0, s_n = sample(process, n_total, rng)
        u = transform(x)
        y, _ = transmit(x, delta, rng)
        y_star = trim(y)
        walkers = {}
        if "raw" in lanes:
            walkers["raw"] = TrellisLane(
                build_channel_trellis(process, y, n_total, delta))
        if "pinned" in lanes:
            walkers["pinned"] = TrellisLane(
                build_channel_trellis(process, y, n_total, delta,
                                      s0=s0, s_n=s_n))
        if "tdc" in lanes:
            walkers["tdc"] = TrellisLane(
                build_tdc_trellis(process, y_star, n_total, delta))
        if "prior" in lanes:
            walkers["prior"] = TrellisLane(prior_base)
        decisions: list[int] = []
        for i in range(1, n_total + 1):
            for name, lane in walkers.items():
                p0 = conditional_probability(lane.posterior(i, decisions))
                _accumulate(vals, errs, name, i, p0, int(u[i - 1]))
            decisions.append(int(u[i - 1]))
        return vals, errs

    block_len, phi = layout.block_len, layout.phi
    xs, s0s, s_ns = sample_batch(process, block_len, phi, rng)
    u = transform(xs.reshape(-1))

    def genie(i: int, p0_ev, p0_pr) -> int:
        return int(u[i - 1])

    ys = []
    for k in range(phi):
        y, _ = transmit(xs[k], delta, rng)
        ys.append(y)
    priors = [prior_base] * phi
    if "tdc" in lanes or "prior" in lanes:
        ev = [build_tdc_trellis(process, trim(y), block_len, delta)
              for y in ys]
        res = two_stage_pass(ev, priors, genie)
        for i in range(1, n_total + 1):
            if "tdc" in lanes:
                _accumulate(vals, errs, "tdc", i,
                            float(res.p0_evidence[i - 1]), int(u[i - 1]))
            if "prior" in lanes:
                _accumulate(vals, errs, "prior", i,
                            float(res.p0_prior[i - 1]), int(u[i - 1]))
    if "raw" in lanes:
        ev = [build_channel_trellis(process, ys[k], block_len, delta)
              for k in range(phi)]
        res = two_stage_pass(ev, priors, genie)
        for i in range(1, n_total + 1):
            _accumulate(vals, errs, "raw", i,
                        float(res.p0_evidence[i - 1]), int(u[i - 1]))
    if "pinned" in lanes:
        ev = [build_channel_trellis(process, ys[k], block_len, delta,
                                    s0=int(s0s[k]), s_n=int(s_ns[k]))
              for k in range(phi)]
        res = two_stage_pass(ev, priors, genie)
        for i in range(1, n_total + 1):
            _accumulate(vals, errs, "pinned", i,
                        float(res.p0_evidence[i - 1]), int(u[i - 1]))
    return vals, errs


def _accumulate(vals: np.ndarray, errs: np.ndarray, lane: str, i: int,
                p0: float, true_bit: int) -> None:
    if lane == "raw":
        vals[0, i - 1] = _binary_entropy(p0)
    elif lane == "pinned":
        vals[1, i - 1] = _binary_entropy(p0)
    elif lane == "tdc":
        vals[2, i - 1] = _binary_entropy(p0)
        vals[3, i - 1] = 2.0 * math.sqrt(p0 * (1.0 - p0))
        errs[i - 1] = (0 if p0 >= 0.5 else 1) != true_bit
    else:
        vals[4, i - 1] = abs(2.0 * p0 - 1.0)


def _stats_chunk(process: FaimProcess, n: int, delta: float,
                 layout: GuardLayout | None, lanes: tuple[str, ...],
                 seed: int, lo: int, hi: int):
    n_total = 1 << n
    sums = np.zeros((5, n_total))
    sq = np.zeros((5, n_total))
    err = np.zeros(n_total, dtype=np.int64)
    block = n_total if layout is None else layout.block_len
    prior_base = (build_process_trellis(process, block)
                  if ("prior" in lanes or layout is not None) else None)
    for trial in range(lo, hi):
        rng = _rng.stream(seed, "construction", trial)
        vals, errs = _trial_values(process, n, delta, layout, lanes, rng,
                                   prior_base)
        np.nan_to_num(vals, copy=False)
        sums += vals
        sq += vals * vals
        err += errs
    return sums, sq, err


def estimate_index_stats(process: FaimProcess, n: int, delta: float,
                         trials: int, seed: int = 0, *,
                         layout: GuardLayout | None = None,
                         lanes: Sequence[str] = LANES,
                         workers: int = 1) -> list[IndexStats]:
    """Genie-aided per-index estimates over `trials` sampled words.

    n is the transform depth (blocklength N = 2**n).  Monolithic mode
    (layout None) builds full-length trellises; scheme mode
    samples i.i.d. blocks of layout.block_len and runs the two-stage pass
    per evidence lane.  `lanes` selects which conditionals to sample; the
    others come back nan.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    lanes = tuple(lanes)
    unknown = set(lanes) - set(LANES)
    if unknown:
        raise ValueError(f"unknown lanes {sorted(unknown)}")
    if layout is not None and layout.n != n:
        raise ValueError(f"layout depth {layout.n} does not match n={n}")
    n_total = 1 << n
    chunks = [(lo, min(lo + _CHUNK, trials))
              for lo in range(0, trials, _CHUNK)]
    args = [(process, n, delta, layout, lanes, seed, lo, hi)
            for lo, hi in chunks]
    if workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, 8)) as pool:
            parts = list(pool.map(_stats_chunk, *zip(*args)))
    else:
        parts = [_stats_chunk(*a) for a in args]
    sums = np.zeros((5, n_total))
    sq = np.zeros((5, n_total))
    err = np.zeros(n_total, dtype=np.int64)
    for s, q, e in parts:
        sums += s
        sq += q
        err += e

    sampled = np.array([name in lanes for name in
                        ("raw", "pinned", "tdc", "tdc", "prior")])
    mean = sums / trials
    if trials > 1:
        var = np.maximum(sq - trials * mean * mean, 0.0) / (trials - 1)
    else:
        var = np.zeros_like(mean)
    se = np.sqrt(var / trials)
    mean[~sampled, :] = np.nan
    se[~sampled, :] = np.nan

    out = []
    for i in range(1, n_total + 1):
        m = mean[:, i - 1]
        s = se[:, i - 1]
        clamped = np.clip(m, 0.0, 1.0)
        out.append(IndexStats(
            index=i,
            est_entropy=float(clamped[0]),
            est_entropy_given_states=float(clamped[1]),
            est_entropy_tdc=float(clamped[2]),
            est_Z=float(clamped[3]),
            est_K=float(clamped[4]),
            se_entropy=float(s[0]),
            se_entropy_given_states=float(s[1]),
            se_entropy_tdc=float(s[2]),
            se_Z=float(s[3]),
            se_K=float(s[4]),
            genie_error_rate=(float(err[i - 1] / trials)
                              if "tdc" in lanes else float("nan")),
            sample_count=trials,
            raw={"h": float(m[0]), "h_hat": float(m[1]),
                 "h_star": float(m[2]), "Z": float(m[3]), "K": float(m[4])},
        ))
    return out


def select_information_set(stats: Sequence[IndexStats], *,
                           rate: float | None = None,
                           epsilon: float | None = None) -> tuple[int, ...]:
    """Pick information indices by est_Z + est_K, ascending, ties by index.

    Exactly one of rate (top floor(rate*N) indices) and epsilon (every index
    with both est_Z and est_K below epsilon) must be given.
    """
    if (rate is None) == (epsilon is None):
        raise ValueError("give exactly one of rate= or epsilon=")
    n_total = len(stats)
    if sorted(s.index for s in stats) != list(range(1, n_total + 1)):
        raise ValueError("stats must cover indices 1..N exactly once")
    if any(math.isnan(s.est_Z) or math.isnan(s.est_K) for s in stats):
        raise ValueError("selection needs the tdc and prior lanes sampled")
    if rate is not None:
        if not 0.0 <= rate <= 1.0:
            raise ValueError(f"rate must lie in [0,1], got {rate}")
        count = int(math.floor(rate * n_total + 1e-9))
        ranked = sorted(stats, key=lambda s: (s.est_Z + s.est_K, s.index))
        return tuple(sorted(s.index for s in ranked[:count]))
    return tuple(sorted(s.index for s in stats
                        if s.est_Z < epsilon and s.est_K < epsilon))


# ---------------------------------------------------------------------------
# Code configuration


_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class CodeConfig:
    """Everything needed to reproduce one guard-banded code instance.

    n0 is pinned to floor(nu * n); xi defaults to (1 - nu''/nu)/4 with
    nu'' = (nu + nu')/2.  The seed feeds every derived randomness stream
    (payload, channel, shared shaping randomness).
    """

    n: int
    nu: float
    nu_prime: float
    delta: float
    process: FaimProcess
    info_set: tuple[int, ...]
    seed: int
    xi: float | None = None
    rate: float | None = None

    def __post_init__(self):
        if not 0.0 < self.nu_prime < self.nu <= 1.0 / 3.0:
            raise ValueError(
                f"need 0 < nu' < nu <= 1/3, got nu={self.nu}, "
                f"nu'={self.nu_prime}")
        if self.xi is None:
            object.__setattr__(self, "xi", self.default_xi())
        n_total = 1 << self.n
        info = tuple(sorted(int(i) for i in self.info_set))
        if len(set(info)) != len(info):
            raise ValueError("information set has repeated indices")
        if info and not (1 <= info[0] and info[-1] <= n_total):
            raise ValueError(f"information set outside 1..{n_total}")
        object.__setattr__(self, "info_set", info)
        self.layout()  # validates n0 >= 2, xi range, depth ordering

    def default_xi(self) -> float:
        nu_mid = (self.nu + self.nu_prime) / 2.0
        return (1.0 - nu_mid / self.nu) / 4.0

    @property
    def n0(self) -> int:
        # nu is often a rational like 1/3 whose float product sits a few
        # ulps under the intended integer; snap before flooring
        return int(math.floor(self.nu * self.n + 1e-9))

    @property
    def n_total(self) -> int:
        return 1 << self.n

    def layout(self) -> GuardLayout:
        return GuardLayout(n=self.n, n0=self.n0, xi=self.xi)

    def to_dict(self) -> dict:
        return {
            "schema_version": _SCHEMA_VERSION,
            "n": self.n,
            "n0": self.n0,
            "nu": self.nu,
            "nu_prime": self.nu_prime,
            "xi": self.xi,
            "delta": self.delta,
            "seed": self.seed,
            "rate": self.rate,
            "info_set": list(self.info_set),
            "process": process_to_dict(self.process),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "CodeConfig":
        version = doc.get("schema_version")
        if version != _SCHEMA_VERSION:
            raise ValueError(f"unsupported config schema {version!r}")
        cfg = cls(
            n=int(doc["n"]),
            nu=float(doc["nu"]),
            nu_prime=float(doc["nu_prime"]),
            xi=float(doc["xi"]),
            delta=float(doc["delta"]),
            process=process_from_dict(doc["process"]),
            info_set=tuple(int(i) for i in doc["info_set"]),
            seed=int(doc["seed"]),
            rate=None if doc.get("rate") is None else float(doc["rate"]),
        )
        if int(doc["n0"]) != cfg.n0:
            raise ValueError(
                f"config n0={doc['n0']} contradicts floor(nu*n)={cfg.n0}")
        return cfg

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path: str) -> "CodeConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# Information rate


@dataclass(frozen=True)
class RateEstimate:
    """I(X; observation)/N in bits per input symbol."""

    rate: float
    stderr: float | None
    h_input: float        # H(X)/N
    h_conditional: float  # H(X | observation)/N
    method: str
    channel: str
    n_total: int
    trials: int | None = None


def _all_inputs(n_total: int) -> np.ndarray:
    grid = np.indices((2,) * n_total).reshape(n_total, -1).T
    return grid.astype(np.uint8)


def _input_law(process: FaimProcess, xs: np.ndarray) -> np.ndarray:
    """P(x) for every row of xs via a vectorized forward pass."""
    rows = xs.shape[0]
    alpha = np.tile(process.stationary, (rows, 1))
    for j in range(xs.shape[1]):
        k = process.kernel[:, :, 0], process.kernel[:, :, 1]
        step = np.where(xs[:, j, None, None] == 0, k[0], k[1])
        alpha = np.einsum("ra,rab->rb", alpha, step)
    return alpha.sum(axis=1)


def _deletion_law_all_x(xs: np.ndarray, y: np.ndarray,
                        delta: float) -> np.ndarray:
    """W(y | x) for every row of xs (embedding DP vectorized over rows)."""
    rows, n_total = xs.shape
    m = y.size
    if m > n_total:
        return np.zeros(rows)
    dp = np.zeros((rows, m + 1))
    dp[:, 0] = 1.0
    for a in range(n_total):
        match = xs[:, a, None] == y[None, :]
        dp[:, 1:] = dp[:, 1:] + np.where(match, dp[:, :-1], 0.0)
    return dp[:, m] * (1.0 - delta) ** m * delta ** (n_total - m)


def _tdc_law_all_x(xs: np.ndarray, y_star: np.ndarray,
                   delta: float) -> np.ndarray:
    """Trimmed-output law: sum the raw law over zero paddings of y_star."""
    rows, n_total = xs.shape
    out = np.zeros(rows)
    if y_star.size == 0:
        for total in range(n_total + 1):
            out += _deletion_law_all_x(xs, np.zeros(total, dtype=np.uint8),
                                       delta)
        return out
    budget = n_total - y_star.size
    for lead in range(budget + 1):
        for tail in range(budget - lead + 1):
            padded = np.concatenate([np.zeros(lead, dtype=np.uint8), y_star,
                                     np.zeros(tail, dtype=np.uint8)])
            out += _deletion_law_all_x(xs, padded, delta)
    return out


def _all_raw_outputs(n_total: int):
    for m in range(n_total + 1):
        for bits in range(1 << m):
            yield np.array([(bits >> k) & 1 for k in range(m)],
                           dtype=np.uint8)


def _all_trimmed_outputs(n_total: int):
    yield np.zeros(0, dtype=np.uint8)
    for m in range(1, n_total + 1):
        if m == 1:
            yield np.ones(1, dtype=np.uint8)
            continue
        for bits in range(1 << (m - 2)):
            mid = [(bits >> k) & 1 for k in range(m - 2)]
            yield np.array([1, *mid, 1], dtype=np.uint8)


def estimate_information_rate(process: FaimProcess, delta: float,
                              n_total: int, *,
                              method: str = "auto", channel: str = "raw",
                              trials: int = 2000, seed: int = 0,
                              n_boot: int = 200) -> RateEstimate:
    """I(X; Y)/N (channel="raw") or I(X; Y*)/N (channel="tdc").

    n_total is the blocklength N (any positive length, not only powers of
    two).  Exact mode enumerates inputs and outputs (auto for N <= 10,
    refused above N = 12).  Monte-Carlo mode averages
    log2 P(x|y) - log2 P(x) over sampled pairs, with bootstrap error bars,
    computing P(x|y) as a trellis path sum against the total received mass.
    """
    if channel not in ("raw", "tdc"):
        raise ValueError(f"unknown channel {channel!r}")
    if n_total < 1:
        raise ValueError("blocklength must be positive")
    if method == "auto":
        method = "exact" if n_total <= 10 else "mc"
    if method == "exact":
        if n_total > 12:
            raise ValueError(
                f"exact enumeration refused for N={n_total} > 12")
        xs = _all_inputs(n_total)
        px = _input_law(process, xs)
        h_input = float(-(px[px > 0] * np.log2(px[px > 0])).sum())
        outputs = (_all_raw_outputs(n_total) if channel == "raw"
                   else _all_trimmed_outputs(n_total))
        h_cond = 0.0
        for y in outputs:
            law = (_deletion_law_all_x(xs, y, delta) if channel == "raw"
                   else _tdc_law_all_x(xs, y, delta))
            joint = px * law
            py = joint.sum()
            if py <= 0.0:
                continue
            nz = joint > 0
            h_cond -= float((joint[nz] * np.log2(joint[nz] / py)).sum())
        return RateEstimate(rate=(h_input - h_cond) / n_total, stderr=None,
                            h_input=h_input / n_total,
                            h_conditional=h_cond / n_total,
                            method="exact", channel=channel,
                            n_total=n_total)
    if method != "mc":
        raise ValueError(f"unknown method {method!r}")

    log2e = 1.0 / math.log(2.0)
    info_terms = np.empty(trials)
    h_in_terms = np.empty(trials)
    for trial in range(trials):
        rng = _rng.stream(seed, "construction", trial)
        x, _, _ = sample(process, n_total, rng)
        y, _ = transmit(x, delta, rng)
        if channel == "raw":
            t = build_channel_trellis(process, y, n_total, delta)
        else:
            t = build_tdc_trellis(process, trim(y), n_total, delta)
        log_pxy = path_sum(t, x) * log2e
        log_py = total_mass(t) * log2e
        log_px = math.log2(exact_probability(process, x))
        h_in_terms[trial] = -log_px
        info_terms[trial] = (log_pxy - log_py) - log_px
    rate = float(info_terms.mean() / n_total)
    boot_rng = _rng.stream(seed, "construction-bootstrap")
    picks = boot_rng.integers(0, trials, size=(n_boot, trials))
    boots = info_terms[picks].mean(axis=1) / n_total
    return RateEstimate(rate=rate, stderr=float(boots.std(ddof=1)),
                        h_input=float(h_in_terms.mean() / n_total),
                        h_conditional=float(
                            (h_in_terms - info_terms).mean() / n_total),
                        method="mc", channel=channel, n_total=n_total,
                        trials=trials)


# ---------------------------------------------------------------------------
# Polarization profile


@dataclass(frozen=True)
class ProfileRow:
    n: int
    epsilon: float
    frac_low: float
    frac_mid: float
    frac_high: float
    trials: int


def polarization_profile(process: FaimProcess, n_values: Sequence[int],
                         delta: float, trials: int, seed: int = 0, *,
                         epsilon: float = 0.1,
                         workers: int = 1) -> list[ProfileRow]:
    """Fraction of indices with trimmed-output entropy below epsilon,
    inside [epsilon, 1-epsilon], and above 1-epsilon, per n."""
    rows = []
    for n in n_values:
        stats = estimate_index_stats(process, n, delta, trials, seed,
                                     lanes=("tdc",), workers=workers)
        h = np.array([s.est_entropy_tdc for s in stats])
        low = float((h < epsilon).mean())
        high = float((h > 1.0 - epsilon).mean())
        rows.append(ProfileRow(n=n, epsilon=epsilon, frac_low=low,
                               frac_mid=float(1.0 - low - high),
                               frac_high=high, trials=trials))
    return rows


def wilson_interval(successes: int, trials: int,
                    z: float = 1.959963984540054) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion (95% by default)."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    p = successes / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = (z / denom) * math.sqrt(p * (1 - p) / trials
                                   + z * z / (4 * trials * trials))
    return max(0.0, center - half), min(1.0, center + half)


# ---------------------------------------------------------------------------
# CSV artifacts (the construct -> run contract)


_CSV_HEADER = ("index,h,h_hat,h_star,Z,K,"
               "se_h,se_h_hat,se_h_star,se_Z,se_K,count")


def stats_to_csv(stats: Sequence[IndexStats], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_CSV_HEADER + "\n")
        for s in stats:
            fh.write(",".join([
                str(s.index),
                repr(s.est_entropy), repr(s.est_entropy_given_states),
                repr(s.est_entropy_tdc), repr(s.est_Z), repr(s.est_K),
                repr(s.se_entropy), repr(s.se_entropy_given_states),
                repr(s.se_entropy_tdc), repr(s.se_Z), repr(s.se_K),
                str(s.sample_count)]) + "\n")


def stats_from_csv(path: str) -> list[IndexStats]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != _CSV_HEADER:
            raise ValueError(f"unexpected stats header {header!r}")
        for line in fh:
            parts = line.strip().split(",")
            vals = [float(v) for v in parts[1:11]]
            out.append(IndexStats(
                index=int(parts[0]),
                est_entropy=vals[0], est_entropy_given_states=vals[1],
                est_entropy_tdc=vals[2], est_Z=vals[3], est_K=vals[4],
                se_entropy=vals[5], se_entropy_given_states=vals[6],
                se_entropy_tdc=vals[7], se_Z=vals[8], se_K=vals[9],
                genie_error_rate=float("nan"),
                sample_count=int(parts[11])))
    return out


def profile_to_csv(rows: Sequence[ProfileRow], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("n,epsilon,frac_low,frac_mid,frac_high,trials\n")
        for r in rows:
            fh.write(f"{r.n},{r.epsilon!r},{r.frac_low!r},{r.frac_mid!r},"
                     f"{r.frac_high!r},{r.trials}\n")
