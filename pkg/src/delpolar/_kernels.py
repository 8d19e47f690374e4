"""Compiled inner loops for trellis work.

Everything here operates on the flat edge arrays owned by trellis.Trellis:
edges are grouped by section, and inside a section grouped by source vertex
with targets ascending (label breaks ties), so the per-source runs form a CSR
structure.  The merge kernel is the two-step-path sweep shared by the minus
and plus transforms; its op count is exactly the number of two-step paths it
touches, which is what the complexity accounting in the decoder reports.
"""

from __future__ import annotations

import numpy as np
from numba import njit

__all__ = ["merge_pairs", "path_sum_pass", "total_mass_pass", "build_channel_edges"]


@njit(cache=True)
def merge_pairs(src, dst, lab, w, sec_ptr, out_ptr, out_start, widths,
                mode, zbits,
                osrc, odst, olab, ow, osec_ptr, oout_ptr, oout_start,
                sec_max, acc):
    """Merge consecutive section pairs into one section each.

    mode 0 (minus): output label = lab(e1) XOR lab(e2), all pairs kept.
    mode 1 (plus):  pair (e1, e2) kept iff lab(e1) XOR lab(e2) == zbits[t];
                    output label = lab(e2).

    Outputs are written grouped by (section, source, target, label); raw
    accumulated weights land in ow with the per-section maximum in sec_max
    (normalization happens outside).  Returns (edge_count, pair_visits).
    """
    n_out = zbits.shape[0]
    cursor = 0
    visits = 0
    osec_ptr[0] = 0
    for t2 in range(n_out):
        ta = 2 * t2
        tb = ta + 1
        w_src = widths[ta]
        w_dst = widths[tb + 1]
        span = w_src * 2 * w_dst
        for k in range(span):
            acc[k] = 0.0
        zt = zbits[t2]
        ob = out_start[tb]
        for e1 in range(sec_ptr[ta], sec_ptr[ta + 1]):
            a = src[e1]
            b = dst[e1]
            l1 = lab[e1]
            w1 = w[e1]
            lo = out_ptr[ob + b]
            hi = out_ptr[ob + b + 1]
            if mode == 0:
                for e2 in range(lo, hi):
                    zout = l1 ^ lab[e2]
                    acc[(a * 2 + zout) * w_dst + dst[e2]] += w1 * w[e2]
                visits += hi - lo
            else:
                want = l1 ^ zt
                for e2 in range(lo, hi):
                    if lab[e2] == want:
                        acc[(a * 2 + want) * w_dst + dst[e2]] += w1 * w[e2]
                        visits += 1
        obase = oout_start[t2]
        mx = 0.0
        for a in range(w_src):
            oout_ptr[obase + a] = cursor
            for g in range(w_dst):
                for z in range(2):
                    v = acc[(a * 2 + z) * w_dst + g]
                    if v != 0.0:
                        osrc[cursor] = a
                        odst[cursor] = g
                        olab[cursor] = z
                        ow[cursor] = v
                        if v > mx:
                            mx = v
                        cursor += 1
        oout_ptr[obase + w_src] = cursor
        osec_ptr[t2 + 1] = cursor
        sec_max[t2] = mx
    return cursor, visits


@njit(cache=True)
def path_sum_pass(src, dst, lab, w, sec_ptr, widths, scale, q, r, x):
    """log of the label-matched path sum for symbol vector x (-inf if zero)."""
    n = sec_ptr.shape[0] - 1
    cur = q.astype(np.float64).copy()
    logscale = 0.0
    for t in range(n):
        nxt = np.zeros(widths[t + 1])
        xt = x[t]
        for e in range(sec_ptr[t], sec_ptr[t + 1]):
            if lab[e] == xt:
                nxt[dst[e]] += cur[src[e]] * w[e]
        m = 0.0
        for k in range(widths[t + 1]):
            if nxt[k] > m:
                m = nxt[k]
        if m == 0.0:
            return -np.inf
        for k in range(widths[t + 1]):
            nxt[k] /= m
        logscale += scale[t] + np.log(m)
        cur = nxt
    tot = 0.0
    for k in range(widths[n]):
        tot += cur[k] * r[k]
    if tot == 0.0:
        return -np.inf
    return np.log(tot) + logscale


@njit(cache=True)
def total_mass_pass(src, dst, w, sec_ptr, widths, scale, q, r):
    """log of the path sum over *all* label sequences (-inf if zero)."""
    n = sec_ptr.shape[0] - 1
    cur = q.astype(np.float64).copy()
    logscale = 0.0
    for t in range(n):
        nxt = np.zeros(widths[t + 1])
        for e in range(sec_ptr[t], sec_ptr[t + 1]):
            nxt[dst[e]] += cur[src[e]] * w[e]
        m = 0.0
        for k in range(widths[t + 1]):
            if nxt[k] > m:
                m = nxt[k]
        if m == 0.0:
            return -np.inf
        for k in range(widths[t + 1]):
            nxt[k] /= m
        logscale += scale[t] + np.log(m)
        cur = nxt
    tot = 0.0
    for k in range(widths[n]):
        tot += cur[k] * r[k]
    if tot == 0.0:
        return -np.inf
    return np.log(tot) + logscale


@njit(cache=True)
def build_channel_edges(y, n_sections, kernel, delta, tdc, lo, hi,
                        osrc, odst, olab, ow, osec_ptr, oout_ptr, oout_start,
                        sec_max):
    """Emit the base channel-trellis edges, already sorted.

    Vertices of boundary j are (row i, state s) pairs with lo[j] <= i <= hi[j],
    states fastest-varying.  Section j has horizontal edges (row kept, one per
    source state/target state/symbol, weight delta * kernel[a, b, x]) and
    diagonal edges (row +1, label y[i], weight (1-delta) * kernel[a, b, y[i]]).
    Under tdc, label-0 horizontal edges in rows 0 and len(y) lose their delta
    factor.  Zero-weight edges are not emitted.  Returns the edge count.
    """
    n_states = kernel.shape[0]
    m = y.shape[0]
    cursor = 0
    osec_ptr[0] = 0
    for t in range(n_sections):
        j0 = t
        j1 = t + 1
        w_src = (hi[j0] - lo[j0] + 1) * n_states
        mx = 0.0
        obase = oout_start[t]
        for i in range(lo[j0], hi[j0] + 1):
            horiz = lo[j1] <= i <= hi[j1]
            diag = i < m and lo[j1] <= i + 1 <= hi[j1]
            for a in range(n_states):
                oout_ptr[obase + (i - lo[j0]) * n_states + a] = cursor
                if horiz:
                    dbase = (i - lo[j1]) * n_states
                    for b in range(n_states):
                        for x in range(2):
                            wt = delta * kernel[a, b, x]
                            if tdc and x == 0 and (i == 0 or i == m):
                                wt = kernel[a, b, 0]
                            if wt > 0.0:
                                osrc[cursor] = (i - lo[j0]) * n_states + a
                                odst[cursor] = dbase + b
                                olab[cursor] = x
                                ow[cursor] = wt
                                if wt > mx:
                                    mx = wt
                                cursor += 1
                if diag:
                    dbase = (i + 1 - lo[j1]) * n_states
                    yl = y[i]
                    for b in range(n_states):
                        wt = (1.0 - delta) * kernel[a, b, yl]
                        if wt > 0.0:
                            osrc[cursor] = (i - lo[j0]) * n_states + a
                            odst[cursor] = dbase + b
                            olab[cursor] = yl
                            ow[cursor] = wt
                            if wt > mx:
                                mx = wt
                            cursor += 1
        oout_ptr[obase + w_src] = cursor
        osec_ptr[t + 1] = cursor
        sec_max[t] = mx
    return cursor
