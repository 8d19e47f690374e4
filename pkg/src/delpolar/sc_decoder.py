"""Successive-cancellation decoding over deletion-channel trellises.

The decoder walks the binary transform tree in index order.  Descending a
0-branch applies a minus transform; descending a 1-branch applies a plus
transform conditioned on z, the inverse polar transform of the decision
slice u_hat[tau..theta] determined by the branch prefix.  The single-section
trellis at depth n yields the pair

    T(u) = P(U_i = u, U_1^{i-1} = u_hat, evidence),

from which decisions are made.  Consecutive indices share the longest common
branch prefix, so a full pass performs exactly 2N - 2 transforms.

Two decision lanes run in lockstep: an evidence lane (channel trellis) that
drives information-bit decisions, and a prior lane (channel-free process
trellis) that drives the shaped bits, which are regenerated on both sides
from common randomness: u_i = 0 iff r_i < P(U_i = 0 | u_hat) under the input
process.

The two-stage decoder covers the guard-banded scheme, where the input is a
concatenation of i.i.d. blocks.  For each block-level index the per-block
trellis lanes produce conditional probability pairs (stage one), and a
standard probability-domain SC butterfly combines them across blocks for the
remaining levels (stage two); the slice of decisions is then carried back to
the block lanes through the block-transform identity
u-slice = transform(per-block symbols).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import trellis as _tr
from .arikan import branch_to_index, index_to_branch, inverse_transform
from .trellis import Trellis

__all__ = [
    "IndexPosterior",
    "conditional_probability",
    "TrellisLane",
    "leaf_posterior",
    "DecodeResult",
    "sc_pass",
    "sc_decode_single_trellis",
    "sc_encode",
    "two_stage_pass",
    "two_stage_decode",
    "two_stage_encode",
    "shaped_bit",
]

LOG_HALF = float(np.log(0.5))

# decide(i, p0_evidence, p0_prior) -> bit; p0_evidence is None in encode mode.
Decider = Callable[[int, "float | None", float], int]


@dataclass(frozen=True)
class IndexPosterior:
    """Joint path-sum pair for one index, held in log domain.

    log_p0 / log_p1 are log P(U_i = u, U_1^{i-1} = u_hat, evidence) for
    u = 0, 1; -inf marks an exactly-zero joint mass.
    """

    log_p0: float
    log_p1: float

    @property
    def p0(self) -> float:
        return float(np.exp(self.log_p0))

    @property
    def p1(self) -> float:
        return float(np.exp(self.log_p1))

    @property
    def degenerate(self) -> bool:
        """True when the conditioning event itself has probability zero."""
        return self.log_p0 == -np.inf and self.log_p1 == -np.inf


def conditional_probability(post: IndexPosterior) -> float:
    """P(U_i = 0 | past, evidence); defined as 1/2 on a zero-probability
    conditioning event.  Exact log-weight ties return exactly 0.5 so that
    the ties-to-zero decision rule is deterministic."""
    if post.degenerate or post.log_p0 == post.log_p1:
        return 0.5
    return float(np.exp(post.log_p0
                        - np.logaddexp(post.log_p0, post.log_p1)))


class TrellisLane:
    """One trellis walked down the transform tree, sharing branch prefixes.

    The intended access pattern is in index order (i = 1, 2, ..., N with one
    decision appended per step), which touches each internal transform once,
    as an in-order walk shares every common ancestor between siblings.  Other
    orders still give correct answers: each plus level records the decision
    slice it was conditioned on, and alignment discards any level whose slice
    no longer matches the decisions presented.
    """

    def __init__(self, base: Trellis):
        n_sections = base.n_sections
        if n_sections & (n_sections - 1):
            raise ValueError("lane needs a power-of-two section count")
        self.depth = n_sections.bit_length() - 1
        self._stack = [base]
        self._bits: list[int] = []
        self._cond: list[tuple[int, int, tuple[int, ...]] | None] = []

    def posterior(self, i: int, decisions: Sequence[int]) -> IndexPosterior:
        branch = index_to_branch(i, self.depth)
        self._align(branch, decisions)
        pair = _tr.leaf_log_weights(self._stack[-1])
        return IndexPosterior(float(pair[0]), float(pair[1]))

    def _align(self, branch, decisions) -> None:
        keep = 0
        while (keep < len(self._bits) and keep < len(branch)
               and self._bits[keep] == branch[keep]):
            keep += 1
        for lvl in range(keep):
            cond = self._cond[lvl]
            if cond is not None:
                tau, theta, baked = cond
                if (len(decisions) < theta
                        or tuple(int(v) for v in decisions[tau - 1:theta])
                        != baked):
                    keep = lvl
                    break
        del self._stack[keep + 1:]
        del self._bits[keep:]
        del self._cond[keep:]
        for bit in branch[len(self._bits):]:
            cur = self._stack[-1]
            if bit == 0:
                nxt = _tr.minus_transform(cur)
                self._cond.append(None)
            else:
                span = cur.n_sections // 2
                theta = (branch_to_index(tuple(self._bits) + (1,)) - 1) * span
                tau = theta - span + 1
                if len(decisions) < theta:
                    raise ValueError(
                        f"descending needs {theta} decisions, "
                        f"got {len(decisions)}")
                baked = tuple(int(v) for v in decisions[tau - 1:theta])
                z = inverse_transform(np.asarray(baked, dtype=np.uint8))
                nxt = _tr.plus_transform(cur, z)
                self._cond.append((tau, theta, baked))
            self._stack.append(nxt)
            self._bits.append(bit)


def leaf_posterior(base: Trellis, b, u_hat) -> IndexPosterior:
    """Posterior pair for index i(b) given arbitrary past decisions u_hat.

    Unlike TrellisLane this does not assume an in-order walk: the decision
    slice conditioning each plus step is located from the branch prefix
    alone (theta = sum_{j<=lambda} b_j 2^{n-j}), so any (b, u_hat) with
    |u_hat| = i(b) - 1 is valid.
    """
    b = tuple(int(v) for v in b)
    n_sections = base.n_sections
    if len(b) != n_sections.bit_length() - 1 or n_sections & (n_sections - 1):
        raise ValueError("branch depth must match log2 of the section count")
    u_hat = np.asarray(u_hat, dtype=np.uint8)
    if u_hat.size != branch_to_index(b) - 1:
        raise ValueError(
            f"need {branch_to_index(b) - 1} past decisions, got {u_hat.size}")
    cur = base
    for lam in range(1, len(b) + 1):
        if b[lam - 1] == 0:
            cur = _tr.minus_transform(cur)
        else:
            span = cur.n_sections // 2
            theta = (branch_to_index(b[:lam]) - 1) * span
            z = inverse_transform(u_hat[theta - span:theta])
            cur = _tr.plus_transform(cur, z)
    pair = _tr.leaf_log_weights(cur)
    return IndexPosterior(float(pair[0]), float(pair[1]))


def shaped_bit(r: float, p0_prior: float) -> int:
    """Shared shaping rule: 0 iff the common-randomness draw falls below the
    prior conditional P(U_i = 0 | past)."""
    return 0 if r < p0_prior else 1


@dataclass
class DecodeResult:
    u: np.ndarray                      # decided transform-domain bits
    x: np.ndarray                      # inverse transform of u
    p0_evidence: np.ndarray | None     # per-index conditional from evidence
    p0_prior: np.ndarray               # per-index conditional from the prior
    degenerate_count: int              # zero-mass conditioning events seen


def sc_pass(evidence: Trellis | None, prior: Trellis,
            decide: Decider) -> DecodeResult:
    """One full monolithic SC pass; decisions delegated to decide()."""
    n_total = prior.n_sections
    if evidence is not None and evidence.n_sections != n_total:
        raise ValueError("evidence and prior lengths differ")
    ev_lane = TrellisLane(evidence) if evidence is not None else None
    pr_lane = TrellisLane(prior)
    decisions: list[int] = []
    p0_ev = np.empty(n_total) if evidence is not None else None
    p0_pr = np.empty(n_total)
    degenerate = 0
    for i in range(1, n_total + 1):
        post_pr = pr_lane.posterior(i, decisions)
        p0_pr[i - 1] = conditional_probability(post_pr)
        degenerate += post_pr.degenerate
        ev_val = None
        if ev_lane is not None:
            post_ev = ev_lane.posterior(i, decisions)
            ev_val = conditional_probability(post_ev)
            p0_ev[i - 1] = ev_val
            degenerate += post_ev.degenerate
        decisions.append(decide(i, ev_val, float(p0_pr[i - 1])))
    u = np.array(decisions, dtype=np.uint8)
    return DecodeResult(u=u, x=inverse_transform(u), p0_evidence=p0_ev,
                        p0_prior=p0_pr, degenerate_count=degenerate)


def _payload_decider(info_set: frozenset, payload: np.ndarray,
                     common: np.ndarray) -> Decider:
    taken = iter(payload)

    def decide(i: int, p0_ev: float | None, p0_pr: float) -> int:
        if i in info_set:
            return int(next(taken))
        return shaped_bit(float(common[i - 1]), p0_pr)

    return decide


def _argmax_decider(info_set: frozenset, common: np.ndarray) -> Decider:
    def decide(i: int, p0_ev: float | None, p0_pr: float) -> int:
        if i in info_set:
            return 0 if p0_ev >= 0.5 else 1
        return shaped_bit(float(common[i - 1]), p0_pr)

    return decide


def sc_encode(prior: Trellis, info_set, payload, common) -> DecodeResult:
    """Fill u: payload bits on information indices (1-based), shaped bits
    elsewhere via the common-randomness threshold rule; x = A^-1(u)."""
    info = frozenset(int(i) for i in info_set)
    payload = np.asarray(payload, dtype=np.uint8)
    if payload.size != len(info):
        raise ValueError("payload length must equal the information-set size")
    return sc_pass(None, prior, _payload_decider(info, payload, common))


def sc_decode_single_trellis(evidence: Trellis, prior: Trellis, info_set,
                             common) -> DecodeResult:
    """Monolithic SC decode: argmax on information indices (ties to 0),
    common-randomness regeneration on the rest."""
    info = frozenset(int(i) for i in info_set)
    return sc_pass(evidence, prior, _argmax_decider(info, common))


def _normalized_pair(post: IndexPosterior) -> tuple[np.ndarray, bool]:
    if post.degenerate:
        return np.array([LOG_HALF, LOG_HALF]), True
    lse = np.logaddexp(post.log_p0, post.log_p1)
    return np.array([post.log_p0 - lse, post.log_p1 - lse]), False


def _minus_pairs(pairs: np.ndarray) -> tuple[np.ndarray, int]:
    """Combine adjacent conditional pairs under XOR of their symbols."""
    l1, l2 = pairs[0::2], pairs[1::2]
    out = np.empty((len(l1), 2))
    out[:, 0] = np.logaddexp(l1[:, 0] + l2[:, 0], l1[:, 1] + l2[:, 1])
    out[:, 1] = np.logaddexp(l1[:, 1] + l2[:, 0], l1[:, 0] + l2[:, 1])
    return _renormalize(out)


def _plus_pairs(pairs: np.ndarray, z: np.ndarray) -> tuple[np.ndarray, int]:
    """Condition adjacent pairs on their decoded XOR z; symbol = second of
    the pair."""
    l1, l2 = pairs[0::2], pairs[1::2]
    rows = np.arange(len(l1))
    out = np.empty((len(l1), 2))
    out[:, 0] = l1[rows, z] + l2[:, 0]
    out[:, 1] = l1[rows, 1 - z] + l2[:, 1]
    return _renormalize(out)


def _renormalize(pairs: np.ndarray) -> tuple[np.ndarray, int]:
    lse = np.logaddexp(pairs[:, 0], pairs[:, 1])
    dead = np.isneginf(lse)
    degenerate = int(dead.sum())
    if degenerate:
        pairs[dead] = LOG_HALF
        lse = np.where(dead, 0.0, lse)
    return pairs - lse[:, None], degenerate


def _pair_p0(pair: np.ndarray) -> float:
    """Linear-domain P(0) of a normalized log pair; exact ties stay 0.5."""
    if pair[0] == pair[1]:
        return 0.5
    return float(np.exp(pair[0]))


class _OuterSC:
    """Stage-two butterfly: standard SC over per-block probability pairs."""

    def __init__(self, decide: Decider, base_index: int):
        self.decide = decide
        self.next_index = base_index + 1
        self.u_bits: list[int] = []
        self.degenerate = 0

    def run(self, ev: np.ndarray | None, pr: np.ndarray) -> np.ndarray:
        if len(pr) == 1:
            p0_ev = _pair_p0(ev[0]) if ev is not None else None
            bit = self.decide(self.next_index, p0_ev, _pair_p0(pr[0]))
            self.next_index += 1
            self.u_bits.append(bit)
            return np.array([bit], dtype=np.uint8)
        ev_m = None
        if ev is not None:
            ev_m, d = _minus_pairs(ev)
            self.degenerate += d
        pr_m, d = _minus_pairs(pr)
        self.degenerate += d
        z = self.run(ev_m, pr_m)
        ev_p = None
        if ev is not None:
            ev_p, d = _plus_pairs(ev, z)
            self.degenerate += d
        pr_p, d = _plus_pairs(pr, z)
        self.degenerate += d
        zp = self.run(ev_p, pr_p)
        x = np.empty(len(pr), dtype=np.uint8)
        x[0::2] = z ^ zp
        x[1::2] = zp
        return x


def two_stage_pass(block_evidence: Sequence[Trellis] | None,
                   block_priors: Sequence[Trellis],
                   decide: Decider) -> DecodeResult:
    """Decode/encode the concatenated-blocks code of length N0 * Phi.

    Stage one queries each block's trellis lanes for the conditional pair of
    the current block-level index; stage two runs the probability-pair SC
    butterfly across blocks, handing each leaf to decide().  The decoded
    slice is mapped back to per-block symbols and appended to every block
    lane's decision history.
    """
    phi = len(block_priors)
    if phi == 0 or phi & (phi - 1):
        raise ValueError("block count must be a positive power of two")
    n0_len = block_priors[0].n_sections
    if any(t.n_sections != n0_len for t in block_priors):
        raise ValueError("all block priors must have equal length")
    if block_evidence is not None:
        if len(block_evidence) != phi:
            raise ValueError("evidence block count mismatch")
        if any(t.n_sections != n0_len for t in block_evidence):
            raise ValueError("all evidence blocks must have equal length")

    ev_lanes = ([TrellisLane(t) for t in block_evidence]
                if block_evidence is not None else None)
    pr_lanes = [TrellisLane(t) for t in block_priors]
    vhat: list[list[int]] = [[] for _ in range(phi)]
    n_total = n0_len * phi
    u = np.empty(n_total, dtype=np.uint8)
    p0_ev = np.empty(n_total) if block_evidence is not None else None
    p0_pr = np.empty(n_total)
    degenerate = 0

    def recording_decide(i: int, pev: float | None, ppr: float) -> int:
        p0_pr[i - 1] = ppr
        if p0_ev is not None and pev is not None:
            p0_ev[i - 1] = pev
        return decide(i, pev, ppr)

    for i0 in range(1, n0_len + 1):
        pr_pairs = np.empty((phi, 2))
        ev_pairs = np.empty((phi, 2)) if ev_lanes is not None else None
        for ph in range(phi):
            pair, dead = _normalized_pair(
                pr_lanes[ph].posterior(i0, vhat[ph]))
            pr_pairs[ph] = pair
            degenerate += dead
            if ev_lanes is not None:
                pair, dead = _normalized_pair(
                    ev_lanes[ph].posterior(i0, vhat[ph]))
                ev_pairs[ph] = pair
                degenerate += dead
        base = (i0 - 1) * phi
        outer = _OuterSC(recording_decide, base)
        v_bits = outer.run(ev_pairs, pr_pairs)
        degenerate += outer.degenerate
        u[base:base + phi] = outer.u_bits
        for ph in range(phi):
            vhat[ph].append(int(v_bits[ph]))
    x = inverse_transform(u)
    return DecodeResult(u=u, x=x, p0_evidence=p0_ev, p0_prior=p0_pr,
                        degenerate_count=degenerate)


def two_stage_decode(block_evidence: Sequence[Trellis],
                     block_priors: Sequence[Trellis], info_set,
                     common) -> DecodeResult:
    info = frozenset(int(i) for i in info_set)
    return two_stage_pass(block_evidence, block_priors,
                          _argmax_decider(info, common))


def two_stage_encode(block_priors: Sequence[Trellis], info_set, payload,
                     common) -> DecodeResult:
    info = frozenset(int(i) for i in info_set)
    payload = np.asarray(payload, dtype=np.uint8)
    if payload.size != len(info):
        raise ValueError("payload length must equal the information-set size")
    return two_stage_pass(None, block_priors,
                          _payload_decider(info, payload, common))
