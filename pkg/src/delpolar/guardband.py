"""Guard-band framing and midpoint segmentation of deletion-channel output.

A word of 2^n symbols is framed as 2^(n-n0) independent blocks separated by
runs of '0' symbols.  The runs are inserted recursively: a vector of length
2^t splits into halves with ell_t = floor(2^((1-xi)(t-1))) zeros in between,
until the halves reach the block length 2^n0.  The middle run is the longest,
so after deletions the receiver can trim the output and split it at its
middle index, recursing on the two halves, and with high probability every
split lands inside the corresponding run of zeros.  Each recovered piece is
then exactly the trimmed output of one block's deletion channel, which is
what the per-block trellis decoder consumes.

Segmentation never signals failure on its own; a wrong split simply produces
garbage blocks and surfaces as a decoding error.  For analysis, segment()
optionally takes the simulator's ground-truth origin of every received
symbol and reports whether each split's middle index really fell inside the
guard band it was assumed to come from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import transmit, trim
from .hmm_input import FaimProcess, sample_batch

__all__ = [
    "GuardLayout",
    "SplitCheck",
    "SegmentationResult",
    "SegmentationStats",
    "insert_guard_bands",
    "remove_guard_bands",
    "block_offsets",
    "segment",
    "segmentation_failure_rate",
]


def _guard_len(t: int, xi: float) -> int:
    """ell_t = floor(2^((1-xi)(t-1))), snapping near-integer exponents.

    Exponents within 1e-9 of an integer are treated as exact so that decimal
    xi values (0.3, 0.7 * 10 = 7, ...) do not under-floor across platforms;
    a true non-integer exponent can never produce an integer power of two.
    """
    a = (1.0 - xi) * (t - 1)
    near = round(a)
    if abs(a - near) < 1e-9:
        return 1 << int(near)
    return int(math.floor(2.0 ** a))


@dataclass(frozen=True)
class GuardLayout:
    """Guard-band geometry: total depth n, block depth n0, exponent xi.

    xi controls how fast guard runs grow relative to the halves they
    separate; it must stay below 1/2 for the middle run to dominate the
    deletion noise, and n0 must be at least 2 so every run has length > 1.
    """

    n: int
    n0: int
    xi: float

    def __post_init__(self):
        if self.n0 < 2:
            raise ValueError(f"block depth n0 must be at least 2, got {self.n0}")
        if self.n < self.n0:
            raise ValueError(f"total depth {self.n} below block depth {self.n0}")
        if not 0.0 < self.xi < 0.5:
            raise ValueError(f"guard exponent must lie in (0, 1/2), got {self.xi}")
        for t in range(self.n0 + 1, self.n + 1):
            if not self.guard_length(t) > 2.0 ** ((1.0 - self.xi) * (t - 1) - 1.0):
                raise ValueError(f"guard length at depth {t} lost more than "
                                 "half its target; layout is degenerate")

    @property
    def phi(self) -> int:
        """Number of blocks."""
        return 1 << (self.n - self.n0)

    @property
    def block_len(self) -> int:
        return 1 << self.n0

    def guard_length(self, t: int) -> int:
        """Zeros inserted when a depth-t vector is halved (n0 < t <= n)."""
        if not self.n0 < t <= self.n:
            raise ValueError(f"depth {t} outside ({self.n0}, {self.n}]")
        return _guard_len(t, self.xi)

    def encoded_length(self, t: int | None = None) -> int:
        """Framed length of a depth-t subvector: 2^t + sum 2^(t-s) ell_s."""
        if t is None:
            t = self.n
        if not self.n0 <= t <= self.n:
            raise ValueError(f"depth {t} outside [{self.n0}, {self.n}]")
        total = 1 << t
        for s in range(self.n0 + 1, t + 1):
            total += (1 << (t - s)) * self.guard_length(s)
        return total


def insert_guard_bands(x, layout: GuardLayout) -> np.ndarray:
    """Frame x (length 2^layout.n) with recursive guard runs."""
    x = np.asarray(x, dtype=np.uint8)
    if x.size != 1 << layout.n:
        raise ValueError(
            f"input length {x.size} is not 2^{layout.n}; the framed word "
            "covers exactly one depth-n vector")
    return _frame(x, layout.n, layout)


def _frame(x: np.ndarray, t: int, layout: GuardLayout) -> np.ndarray:
    if t <= layout.n0:
        return x
    half = x.size // 2
    gap = np.zeros(layout.guard_length(t), dtype=np.uint8)
    return np.concatenate([_frame(x[:half], t - 1, layout), gap,
                           _frame(x[half:], t - 1, layout)])


def remove_guard_bands(framed, layout: GuardLayout) -> np.ndarray:
    """Exact inverse of insert_guard_bands on an unperturbed word."""
    framed = np.asarray(framed, dtype=np.uint8)
    if framed.size != layout.encoded_length():
        raise ValueError(f"framed length {framed.size} does not match the "
                         f"layout's {layout.encoded_length()}")
    out = np.empty(1 << layout.n, dtype=np.uint8)
    _unframe(framed, layout.n, layout, out)
    return out


def _unframe(v: np.ndarray, t: int, layout: GuardLayout,
             out: np.ndarray) -> None:
    if t <= layout.n0:
        out[:] = v
        return
    left = layout.encoded_length(t - 1)
    ell = layout.guard_length(t)
    if v[left:left + ell].any():
        raise ValueError("nonzero symbol inside a guard band")
    half = out.size // 2
    _unframe(v[:left], t - 1, layout, out[:half])
    _unframe(v[left + ell:], t - 1, layout, out[half:])


def block_offsets(layout: GuardLayout) -> np.ndarray:
    """Start position of each block inside the framed word, left to right."""
    offsets = np.empty(layout.phi, dtype=np.int64)
    pos = 0

    def walk(t: int, base: int) -> int:
        nonlocal pos
        if t == layout.n0:
            offsets[pos] = base
            pos += 1
            return base
        left = layout.encoded_length(t - 1)
        walk(t - 1, base)
        walk(t - 1, base + left + layout.guard_length(t))
        return base

    walk(layout.n, 0)
    return offsets


@dataclass(frozen=True)
class SplitCheck:
    """Ground-truth account of one recursive split (genie mode only).

    z_left/z_guard/z_right count the segment's symbols by the transmitted
    region they originate from; mid_in_guard records whether the middle
    index (rounding down) fell inside this node's guard band.  An empty
    segment cannot be missplit and counts as correct.
    """

    depth: int
    zeta: int
    z_left: int
    z_guard: int
    z_right: int
    mid_in_guard: bool


@dataclass
class SegmentationResult:
    blocks: list[np.ndarray]
    checks: list[SplitCheck] | None = None

    @property
    def genie_ok(self) -> bool | None:
        """True when every split's midpoint assumption held; None without
        ground truth."""
        if self.checks is None:
            return None
        return all(c.mid_in_guard for c in self.checks)


def _trim_pair(z: np.ndarray, zo: np.ndarray | None):
    nz = np.flatnonzero(z)
    if nz.size == 0:
        empty = z[:0]
        return empty, (zo[:0] if zo is not None else None)
    lo, hi = nz[0], nz[-1] + 1
    return z[lo:hi], (zo[lo:hi] if zo is not None else None)


def segment(y, layout: GuardLayout, *,
            origins=None) -> SegmentationResult:
    """Recover the per-block trimmed outputs from raw channel output y.

    Trims y, then recursively splits each trimmed segment at its midpoint
    (floor(zeta/2) symbols to the left), re-trimming both halves, for
    n - n0 levels.  With origins (transmitted position of each received
    symbol, simulator ground truth), every split is also checked against
    the guard band it was assumed to hit.
    """
    y = np.asarray(y, dtype=np.uint8)
    if origins is not None:
        origins = np.asarray(origins, dtype=np.int64)
        if origins.shape != y.shape:
            raise ValueError("origins must tag every received symbol")
    blocks: list[np.ndarray] = []
    checks: list[SplitCheck] | None = [] if origins is not None else None
    z, zo = _trim_pair(y, origins)
    _split(z, zo, layout.n, 0, layout, blocks, checks)
    return SegmentationResult(blocks=blocks, checks=checks)


def _split(z: np.ndarray, zo: np.ndarray | None, t: int, tx_lo: int,
           layout: GuardLayout, blocks: list, checks) -> None:
    if t == layout.n0:
        blocks.append(z)
        return
    zeta = z.size
    if checks is not None:
        guard_lo = tx_lo + layout.encoded_length(t - 1)
        guard_hi = guard_lo + layout.guard_length(t)
        if zeta == 0:
            checks.append(SplitCheck(t, 0, 0, 0, 0, True))
        else:
            mid_origin = int(zo[(zeta + 1) // 2 - 1])
            z_left = int((zo < guard_lo).sum())
            z_guard = int(((zo >= guard_lo) & (zo < guard_hi)).sum())
            checks.append(SplitCheck(
                t, zeta, z_left, z_guard, zeta - z_left - z_guard,
                guard_lo <= mid_origin < guard_hi))
    half = zeta // 2
    zl, zlo = _trim_pair(z[:half], zo[:half] if zo is not None else None)
    zr, zro = _trim_pair(z[half:], zo[half:] if zo is not None else None)
    _split(zl, zlo, t - 1, tx_lo, layout, blocks, checks)
    right_lo = tx_lo + layout.encoded_length(t - 1) + layout.guard_length(t)
    _split(zr, zro, t - 1, right_lo, layout, blocks, checks)


@dataclass
class SegmentationStats:
    """Monte-Carlo tally of midpoint-assumption failures."""

    trials: int
    failures: int                 # frames with at least one bad split
    node_misses: dict[int, int]   # depth -> bad-split count over all trials
    mismatched_frames: int        # recovered blocks differ from ground truth

    @property
    def failure_rate(self) -> float:
        return self.failures / self.trials

    @property
    def total_node_misses(self) -> int:
        return sum(self.node_misses.values())


def segmentation_failure_rate(process: FaimProcess, layout: GuardLayout,
                              delta: float, trials: int,
                              rng: np.random.Generator) -> SegmentationStats:
    """Estimate the probability that any recursive split misses its guard
    band, for i.i.d. process blocks framed by layout and sent at rate delta.

    Also cross-checks the recovered blocks against the per-block trimmed
    ground truth; a frame with all splits correct always matches, so
    mismatched_frames <= failures.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    n0_len = layout.block_len
    phi = layout.phi
    offsets = block_offsets(layout)
    xs, _, _ = sample_batch(process, n0_len, phi * trials, rng)
    xs = xs.reshape(trials, phi, n0_len)
    failures = 0
    mismatched = 0
    node_misses: dict[int, int] = {t: 0 for t in range(layout.n0 + 1,
                                                       layout.n + 1)}
    for trial in range(trials):
        framed = insert_guard_bands(xs[trial].reshape(-1), layout)
        y, kept = transmit(framed, delta, rng)
        res = segment(y, layout, origins=np.flatnonzero(kept))
        for c in res.checks:
            if not c.mid_in_guard:
                node_misses[c.depth] += 1
        if not res.genie_ok:
            failures += 1
        for k in range(phi):
            sl = slice(offsets[k], offsets[k] + n0_len)
            truth = trim(framed[sl][kept[sl]])
            if (res.blocks[k].size != truth.size
                    or not np.array_equal(res.blocks[k], truth)):
                mismatched += 1
                break
    return SegmentationStats(trials=trials, failures=failures,
                             node_misses=node_misses,
                             mismatched_frames=mismatched)
