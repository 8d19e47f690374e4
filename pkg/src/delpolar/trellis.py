"""Deletion-channel trellises and the minus/plus section-pair transforms.

A trellis over N sections represents a nonnegative weight function T(x) on
x in {0,1}^N as a sum over label-matched paths: boundary 0 carries source
weights q, boundary N carries sink weights r, and T(x) is the sum over all
paths whose section-t edge has label x[t] of q(start) * prod(edge weights)
* r(end).  For a joint input/output law the vertices are (deletions-seen,
process-state) pairs and T(x) = P(X = x, Y = y) for the received y baked
into the trellis; dropping the channel part gives a plain process trellis
with T(x) = P(X = x).

Weights are kept in a block-scaled linear form: each section stores linear
mantissas in (0, 1] plus one shared log offset, so products of mantissas
stay in range while the true magnitude lives in the per-section scale.
Public results (path sums, totals, leaf values) are reported in log domain
with -inf standing for an exactly-zero mass.

The minus transform halves the section count by composing consecutive
section pairs under XOR of their labels; the plus transform does the same
conditioned on a known XOR vector z, keeping the second label.  Iterating
them in bit order realizes successive-cancellation decoding, and the
number of two-step paths the transforms touch is the complexity measure
tracked by ``work_counter``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .hmm_input import FaimProcess

__all__ = [
    "Trellis",
    "build_channel_trellis",
    "build_uniform_trellis",
    "build_tdc_trellis",
    "build_process_trellis",
    "minus_transform",
    "plus_transform",
    "prune",
    "path_sum",
    "total_mass",
    "leaf_log_weights",
    "two_step_path_count",
    "vertex_count",
    "edge_count",
    "dump_trellis",
    "work_counter",
    "reset_work_counter",
]

_WORK = 0


def work_counter() -> int:
    """Total two-step paths touched by transforms since the last reset."""
    return _WORK


def reset_work_counter() -> None:
    global _WORK
    _WORK = 0


@dataclass
class Trellis:
    """Flat edge-list trellis, sections grouped and CSR-indexed by source.

    widths[j] is the vertex count of boundary j; rows[j] / states[j] give
    each vertex's deletion row and process-state index (labels for dumps and
    genie bookkeeping only).  Edges of section t occupy
    src[sec_ptr[t]:sec_ptr[t+1]] etc., sorted by (src, dst, label); the
    per-source runs of section t are out_ptr[out_start[t] + v] ..
    out_ptr[out_start[t] + v + 1] (absolute edge indices).  weight holds the
    linear mantissas, scale[t] the section's log offset.  q and r are plain
    linear source/sink weights.
    """

    widths: np.ndarray
    rows: list
    states: list
    state_names: tuple
    src: np.ndarray
    dst: np.ndarray
    label: np.ndarray
    weight: np.ndarray
    sec_ptr: np.ndarray
    out_ptr: np.ndarray
    out_start: np.ndarray
    scale: np.ndarray
    q: np.ndarray
    r: np.ndarray

    @property
    def n_sections(self) -> int:
        return len(self.widths) - 1

    @property
    def n_edges(self) -> int:
        return int(self.sec_ptr[-1])


# Scratch buffers reused across transform calls within one process.
_POOL: dict = {}


def _scratch(name: str, size: int, dtype) -> np.ndarray:
    buf = _POOL.get(name)
    if buf is None or buf.size < size:
        buf = np.empty(int(size * 1.5) + 16, dtype=dtype)
        _POOL[name] = buf
    return buf


def _csr_from_sorted(src: np.ndarray, sec_ptr: np.ndarray,
                     widths: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Rebuild (out_ptr, out_start) from src arrays already sorted per section."""
    n = len(sec_ptr) - 1
    out_start = np.zeros(n, dtype=np.int64)
    if n > 1:
        out_start[1:] = np.cumsum(widths[:n - 1] + 1)
    pieces = []
    for t in range(n):
        s = src[sec_ptr[t]:sec_ptr[t + 1]]
        ptr = np.searchsorted(s, np.arange(widths[t] + 1)) + sec_ptr[t]
        pieces.append(ptr)
    out_ptr = np.concatenate(pieces) if pieces else np.zeros(0, dtype=np.int64)
    return out_ptr.astype(np.int64), out_start


def _boundary_ranges(m: int, n: int, full_range: bool) -> tuple[np.ndarray, np.ndarray]:
    j = np.arange(n + 1, dtype=np.int64)
    if full_range:
        lo = np.zeros(n + 1, dtype=np.int64)
        hi = np.full(n + 1, m, dtype=np.int64)
    else:
        lo = np.maximum(0, m - n + j)
        hi = np.minimum(j, m)
    return lo, hi


def build_channel_trellis(process: FaimProcess, y, n: int, delta: float, *,
                          tdc: bool = False, full_range: bool = False,
                          s0: int | None = None, s_n: int | None = None) -> Trellis:
    """Joint trellis with T(x) = P(X = x, Y = y) for the given received y.

    full_range keeps every deletion row 0..len(y) at every boundary instead
    of only the reachable band.  s0 / s_n pin the initial / final process
    state (masses outside the pin are dropped, so T becomes the joint law
    with the pinned state event included).  With tdc=True the trellis prices
    y as the trimmed output: label-0 horizontal edges in the first and last
    deletion rows carry no delta factor.
    """
    if not 0.0 <= delta <= 1.0:
        raise ValueError("delta must be in [0, 1]")
    y = np.asarray(y, dtype=np.int8)
    if y.ndim != 1:
        raise ValueError("y must be one-dimensional")
    if y.size and not np.isin(y, (0, 1)).all():
        raise ValueError("y must be binary")
    m = y.size
    if m > n:
        raise ValueError(f"received word longer ({m}) than block ({n})")
    n_states = process.n_states
    lo, hi = _boundary_ranges(m, n, full_range)
    widths = (hi - lo + 1) * n_states

    rows = [np.repeat(np.arange(lo[j], hi[j] + 1, dtype=np.int32), n_states)
            for j in range(n + 1)]
    states = [np.tile(np.arange(n_states, dtype=np.int32), hi[j] - lo[j] + 1)
              for j in range(n + 1)]

    # Capacity: every (row kept) pair has 2 * S^2 candidates, every (row + 1)
    # pair S^2; the kernel skips zero weights so this is an upper bound.
    n_h = np.maximum(0, np.minimum(hi[:-1], hi[1:]) - np.maximum(lo[:-1], lo[1:]) + 1)
    n_d = np.maximum(0, np.minimum(hi[:-1], hi[1:] - 1) - np.maximum(lo[:-1], lo[1:] - 1) + 1)
    cap = int((2 * n_h + n_d).sum()) * n_states * n_states

    src = np.empty(cap, dtype=np.int32)
    dst = np.empty(cap, dtype=np.int32)
    lab = np.empty(cap, dtype=np.int8)
    wgt = np.empty(cap, dtype=np.float64)
    sec_ptr = np.zeros(n + 1, dtype=np.int64)
    out_start = np.zeros(n, dtype=np.int64)
    if n > 1:
        out_start[1:] = np.cumsum(widths[:-1] + 1)[:-1]
    out_ptr = np.zeros(int((widths[:-1] + 1).sum()), dtype=np.int64)
    sec_max = np.zeros(n, dtype=np.float64)

    count = _kernels.build_channel_edges(
        y, n, process.kernel, float(delta), tdc, lo, hi,
        src, dst, lab, wgt, sec_ptr, out_ptr, out_start, sec_max)

    src = src[:count].copy()
    dst = dst[:count].copy()
    lab = lab[:count].copy()
    wgt = wgt[:count].copy()
    edge_counts = np.diff(sec_ptr)
    norm = np.repeat(np.where(sec_max > 0, sec_max, 1.0), edge_counts)
    wgt /= norm
    scale = np.where(sec_max > 0, np.log(np.where(sec_max > 0, sec_max, 1.0)), 0.0)

    q = np.zeros(widths[0], dtype=np.float64)
    start_rows = rows[0] == 0
    if s0 is None:
        q[start_rows] = process.stationary[states[0][start_rows]]
    else:
        pick = start_rows & (states[0] == s0)
        q[pick] = process.stationary[s0]
    r = np.zeros(widths[n], dtype=np.float64)
    end_rows = rows[n] == m
    if s_n is None:
        r[end_rows] = 1.0
    else:
        r[end_rows & (states[n] == s_n)] = 1.0

    return Trellis(widths=widths, rows=rows, states=states,
                   state_names=process.states,
                   src=src, dst=dst, label=lab, weight=wgt,
                   sec_ptr=sec_ptr, out_ptr=out_ptr, out_start=out_start,
                   scale=scale, q=q, r=r)


def build_uniform_trellis(y, n: int, delta: float, *,
                          full_range: bool = False) -> Trellis:
    """Channel trellis for i.i.d. uniform inputs (edge weights delta/2 and
    (1-delta)/2)."""
    from .hmm_input import uniform_process
    return build_channel_trellis(uniform_process(), y, n, delta,
                                 full_range=full_range)


def build_tdc_trellis(process: FaimProcess, y_star, n: int, delta: float, *,
                      full_range: bool = False,
                      s0: int | None = None, s_n: int | None = None) -> Trellis:
    """Trellis pricing the trimmed deletion channel output y*.

    y* must be empty or start and end with 1 (trimming is idempotent on it).
    """
    y_star = np.asarray(y_star, dtype=np.int8)
    if y_star.size and (y_star[0] != 1 or y_star[-1] != 1):
        raise ValueError("trimmed output must start and end with 1")
    return build_channel_trellis(process, y_star, n, delta, tdc=True,
                                 full_range=full_range, s0=s0, s_n=s_n)


def build_process_trellis(process: FaimProcess, n: int) -> Trellis:
    """Channel-free trellis with T(x) = P(X = x) under the input process."""
    n_states = process.n_states
    widths = np.full(n + 1, n_states, dtype=np.int64)
    rows = [np.zeros(n_states, dtype=np.int32) for _ in range(n + 1)]
    states = [np.arange(n_states, dtype=np.int32) for _ in range(n + 1)]

    a, b, x = np.meshgrid(np.arange(n_states), np.arange(n_states),
                          np.arange(2), indexing="ij")
    a, b, x = a.ravel(), b.ravel(), x.ravel()
    w1 = process.kernel[a, b, x]
    keep = w1 > 0
    a, b, x, w1 = a[keep], b[keep], x[keep], w1[keep]
    order = np.lexsort((x, b, a))
    a, b, x, w1 = a[order], b[order], x[order], w1[order]
    e1 = a.size
    mx = w1.max() if e1 else 1.0

    src = np.tile(a, n).astype(np.int32)
    dst = np.tile(b, n).astype(np.int32)
    lab = np.tile(x, n).astype(np.int8)
    wgt = np.tile(w1 / mx, n)
    sec_ptr = np.arange(n + 1, dtype=np.int64) * e1
    ptr1 = np.searchsorted(a, np.arange(n_states + 1))
    out_ptr = (np.tile(ptr1, n)
               + np.repeat(np.arange(n, dtype=np.int64) * e1, n_states + 1))
    out_start = np.arange(n, dtype=np.int64) * (n_states + 1)
    scale = np.full(n, np.log(mx) if e1 else 0.0)

    return Trellis(widths=widths, rows=rows, states=states,
                   state_names=process.states,
                   src=src, dst=dst, label=lab, weight=wgt,
                   sec_ptr=sec_ptr, out_ptr=out_ptr, out_start=out_start,
                   scale=scale, q=process.stationary.astype(np.float64),
                   r=np.ones(n_states))


def path_sum(t: Trellis, x) -> float:
    """log T(x): the label-matched path sum for one symbol vector."""
    x = np.asarray(x, dtype=np.int8)
    if x.size != t.n_sections:
        raise ValueError("x length must match section count")
    return float(_kernels.path_sum_pass(t.src, t.dst, t.label, t.weight,
                                        t.sec_ptr, t.widths, t.scale,
                                        t.q, t.r, x))


def total_mass(t: Trellis) -> float:
    """log of sum_x T(x) (for a joint trellis this is log P(Y = y))."""
    return float(_kernels.total_mass_pass(t.src, t.dst, t.weight, t.sec_ptr,
                                          t.widths, t.scale, t.q, t.r))


def leaf_log_weights(t: Trellis) -> np.ndarray:
    """[log T(0), log T(1)] for a single-section trellis."""
    if t.n_sections != 1:
        raise ValueError("leaf values need a single-section trellis")
    contrib = t.q[t.src] * t.weight * t.r[t.dst]
    out = np.empty(2)
    for z in (0, 1):
        v = contrib[t.label == z].sum()
        out[z] = np.log(v) + t.scale[0] if v > 0 else -np.inf
    return out


def _merge(t: Trellis, mode: int, zbits: np.ndarray) -> Trellis:
    global _WORK
    n = t.n_sections
    if n % 2 != 0 or n == 0:
        raise ValueError("transform needs an even, positive section count")
    n2 = n // 2
    widths2 = t.widths[0::2].copy()
    w_src = t.widths[0:n:2]
    w_dst = t.widths[2::2]
    cap = int(2 * (w_src * w_dst).sum())

    osrc = _scratch("src", cap, np.int32)
    odst = _scratch("dst", cap, np.int32)
    olab = _scratch("lab", cap, np.int8)
    ow = _scratch("wgt", cap, np.float64)
    osec_ptr = np.zeros(n2 + 1, dtype=np.int64)
    oout_start = np.zeros(n2, dtype=np.int64)
    if n2 > 1:
        oout_start[1:] = np.cumsum(w_src[:-1] + 1)
    oout_ptr = np.zeros(int((w_src + 1).sum()), dtype=np.int64)
    sec_max = np.zeros(n2)
    acc = _scratch("acc", int(2 * (w_src * w_dst).max()), np.float64)

    count, visits = _kernels.merge_pairs(
        t.src, t.dst, t.label, t.weight, t.sec_ptr, t.out_ptr, t.out_start,
        t.widths, mode, zbits,
        osrc, odst, olab, ow, osec_ptr, oout_ptr, oout_start, sec_max, acc)
    _WORK += int(visits)

    wgt = ow[:count].copy()
    edge_counts = np.diff(osec_ptr)
    wgt /= np.repeat(np.where(sec_max > 0, sec_max, 1.0), edge_counts)
    scale = (t.scale[0::2] + t.scale[1::2]
             + np.where(sec_max > 0, np.log(np.where(sec_max > 0, sec_max, 1.0)), 0.0))

    return Trellis(widths=widths2,
                   rows=t.rows[0::2], states=t.states[0::2],
                   state_names=t.state_names,
                   src=osrc[:count].copy(), dst=odst[:count].copy(),
                   label=olab[:count].copy(), weight=wgt,
                   sec_ptr=osec_ptr, out_ptr=oout_ptr, out_start=oout_start,
                   scale=scale, q=t.q.copy(), r=t.r.copy())


def minus_transform(t: Trellis) -> Trellis:
    """Halve the trellis: new section t represents old labels l1 XOR l2.

    Realizes T'(z) = sum over x with odd/even XOR pattern z of T(x): the
    weight function of the first polar sub-symbol.
    """
    return _merge(t, 0, np.zeros(t.n_sections // 2, dtype=np.int8))


def plus_transform(t: Trellis, z) -> Trellis:
    """Halve the trellis given the XOR vector z; new labels are the second
    of each pair, so T'(z') picks out x with XOR pattern z and second-symbol
    pattern z'."""
    z = np.asarray(z, dtype=np.int8)
    if z.size != t.n_sections // 2:
        raise ValueError("z length must be half the section count")
    return _merge(t, 1, z)


def prune(t: Trellis) -> Trellis:
    """Drop vertices unreachable from positive q or positive r (and their
    edges).  Path sums are unchanged."""
    n = t.n_sections
    alive_f = [np.zeros(w, dtype=bool) for w in t.widths]
    alive_f[0] = t.q > 0
    for tt in range(n):
        sl = slice(t.sec_ptr[tt], t.sec_ptr[tt + 1])
        sel = alive_f[tt][t.src[sl]]
        alive_f[tt + 1] = np.bincount(
            t.dst[sl][sel], minlength=t.widths[tt + 1]).astype(bool)
    alive_b = [np.zeros(w, dtype=bool) for w in t.widths]
    alive_b[n] = t.r > 0
    for tt in range(n - 1, -1, -1):
        sl = slice(t.sec_ptr[tt], t.sec_ptr[tt + 1])
        sel = alive_b[tt + 1][t.dst[sl]]
        alive_b[tt] = np.bincount(
            t.src[sl][sel], minlength=t.widths[tt]).astype(bool)
    alive = [f & b for f, b in zip(alive_f, alive_b)]

    remap = [np.cumsum(a) - 1 for a in alive]
    widths = np.array([int(a.sum()) for a in alive], dtype=np.int64)
    keep_chunks = []
    sec_ptr = np.zeros(n + 1, dtype=np.int64)
    for tt in range(n):
        sl = slice(t.sec_ptr[tt], t.sec_ptr[tt + 1])
        keep = alive[tt][t.src[sl]] & alive[tt + 1][t.dst[sl]]
        keep_chunks.append(keep)
        sec_ptr[tt + 1] = sec_ptr[tt] + int(keep.sum())
    keep_all = (np.concatenate(keep_chunks) if keep_chunks
                else np.zeros(0, dtype=bool))

    src = np.empty(sec_ptr[-1], dtype=np.int32)
    dst = np.empty(sec_ptr[-1], dtype=np.int32)
    for tt in range(n):
        sl = slice(t.sec_ptr[tt], t.sec_ptr[tt + 1])
        keep = keep_chunks[tt]
        osl = slice(sec_ptr[tt], sec_ptr[tt + 1])
        src[osl] = remap[tt][t.src[sl][keep]]
        dst[osl] = remap[tt + 1][t.dst[sl][keep]]
    label = t.label[keep_all]
    weight = t.weight[keep_all]
    out_ptr, out_start = _csr_from_sorted(src, sec_ptr, widths)

    return Trellis(widths=widths,
                   rows=[r[a] for r, a in zip(t.rows, alive)],
                   states=[s[a] for s, a in zip(t.states, alive)],
                   state_names=t.state_names,
                   src=src, dst=dst, label=label, weight=weight,
                   sec_ptr=sec_ptr, out_ptr=out_ptr, out_start=out_start,
                   scale=t.scale.copy(), q=t.q[alive[0]], r=t.r[alive[n]])


def two_step_path_count(t: Trellis) -> int:
    """Number of length-2 paths across consecutive section pairs: the exact
    pair-visit count of a minus transform on this trellis."""
    total = 0
    for t2 in range(t.n_sections // 2):
        ta, tb = 2 * t2, 2 * t2 + 1
        indeg = np.bincount(t.dst[t.sec_ptr[ta]:t.sec_ptr[ta + 1]],
                            minlength=t.widths[tb])
        base = t.out_start[tb]
        ptr = t.out_ptr[base:base + t.widths[tb] + 1]
        outdeg = np.diff(ptr)
        total += int(indeg @ outdeg)
    return total


def vertex_count(t: Trellis) -> int:
    return int(t.widths.sum())


def edge_count(t: Trellis) -> int:
    return t.n_edges


def dump_trellis(t: Trellis) -> str:
    """Stable text form: one header line, then one line per edge in storage
    order with true (unscaled) weights."""
    lines = [f"sections={t.n_sections} "
             f"vertices={vertex_count(t)} edges={t.n_edges}"]
    for tt in range(t.n_sections):
        for e in range(t.sec_ptr[tt], t.sec_ptr[tt + 1]):
            a, g = t.src[e], t.dst[e]
            name_a = f"({t.rows[tt][a]},{t.state_names[t.states[tt][a]]})"
            name_g = f"({t.rows[tt + 1][g]},{t.state_names[t.states[tt + 1][g]]})"
            w = t.weight[e] * np.exp(t.scale[tt])
            lines.append(f"sec={tt} {name_a}->{name_g} "
                         f"label={t.label[e]} w={w:.12g}")
    return "\n".join(lines) + "\n"
