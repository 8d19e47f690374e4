"""The binary deletion channel and its trimmed variants.

Each input bit is deleted independently with probability delta; survivors
keep their order.  For input x of length N and output y of length M,

    W(y | x) = (number of distinct embeddings of y into x) * (1-delta)^M * delta^(N-M)

where an embedding is an index set realizing y as a subsequence of x.

The trimmed deletion channel (TDC) additionally strips leading and trailing
zeros from y, so its outputs are either empty or start and end with 1.  The
block variant applies an independent TDC to each fixed-length block of the
input, keeping block boundaries intact; it is the idealized channel the code
constructor trains against (the real receiver must recover the boundaries
itself, see the guard-band module).
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

__all__ = [
    "transmit",
    "exact_law",
    "embedding_count",
    "trim",
    "transmit_block_tdc",
    "tdc_exact_law",
]


def transmit(x: Sequence[int], delta: float, rng: np.random.Generator
             ) -> tuple[np.ndarray, np.ndarray]:
    """Send x through the deletion channel.

    Returns (y, kept) where kept is the boolean survival mask.  The mask is
    simulator-side ground truth (genie checks, origin tracking); decoders
    never see it.
    """
    x = np.asarray(x, dtype=np.uint8)
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta must be in [0,1], got {delta}")
    kept = rng.random(x.size) >= delta
    return x[kept], kept


def embedding_count(x: Sequence[int], y: Sequence[int]) -> int:
    """Number of distinct ways y embeds into x as a subsequence (exact int)."""
    x = np.asarray(x, dtype=np.uint8)
    y = np.asarray(y, dtype=np.uint8)
    m = y.size
    if m > x.size:
        return 0
    # counts[j] = embeddings of y[:j] into the scanned prefix of x
    counts = [1] + [0] * m
    for xi in x:
        for j in range(m, 0, -1):
            if y[j - 1] == xi:
                counts[j] += counts[j - 1]
    return counts[m]


def exact_law(x: Sequence[int], y: Sequence[int], delta: float) -> float:
    """W(y|x) for the plain deletion channel."""
    x = np.asarray(x, dtype=np.uint8)
    y = np.asarray(y, dtype=np.uint8)
    n, m = x.size, y.size
    if m > n:
        return 0.0
    count = embedding_count(x, y)
    if count == 0:
        return 0.0
    if delta == 0.0:
        return 1.0 if m == n else 0.0  # count==1 when y == x
    if delta == 1.0:
        return 1.0 if m == 0 else 0.0
    # exact big-int count; log keeps this finite for any N
    return math.exp(
        math.log(count) + m * math.log1p(-delta) + (n - m) * math.log(delta)
    )


def trim(y: Sequence[int]) -> np.ndarray:
    """Strip leading and trailing zeros; result is empty or 1-bounded."""
    y = np.asarray(y, dtype=np.uint8)
    nz = np.flatnonzero(y)
    if nz.size == 0:
        return y[:0]
    return y[nz[0] : nz[-1] + 1]


def transmit_block_tdc(x: Sequence[int], block_len: int, delta: float,
                       rng: np.random.Generator
                       ) -> tuple[list[np.ndarray], np.ndarray]:
    """Per-block deletion + trim with block boundaries preserved.

    x is split into consecutive blocks of block_len; each goes through an
    independent deletion channel and is trimmed.  Returns (blocks, kept)
    where blocks[k] is the k-th trimmed output and kept is the full-length
    survival mask (ground truth only).
    """
    x = np.asarray(x, dtype=np.uint8)
    if block_len <= 0 or x.size % block_len:
        raise ValueError(f"input length {x.size} is not a multiple of {block_len}")
    y, kept = transmit(x, delta, rng)
    blocks = []
    for start in range(0, x.size, block_len):
        mask = kept[start : start + block_len]
        blocks.append(trim(x[start : start + block_len][mask]))
    return blocks, kept


def tdc_exact_law(x: Sequence[int], y_star: Sequence[int], delta: float,
                  method: str = "auto") -> float:
    """W*(y*|x) for the trimmed deletion channel.

    method 'enum' sums the deletion law over all 2^N survival patterns whose
    trimmed output equals y*; it is the oracle route and is limited to
    len(x) <= 12.  method 'trellis' evaluates the same quantity through the
    TDC trellis built for uniform input (path sum times 2^N).  'auto' picks
    'enum' when it is feasible.
    """
    x = np.asarray(x, dtype=np.uint8)
    y_star = np.asarray(y_star, dtype=np.uint8)
    n = x.size
    if y_star.size and (y_star[0] != 1 or y_star[-1] != 1):
        raise ValueError("y_star must be trimmed (empty or 1-bounded)")
    if method == "auto":
        method = "enum" if n <= 12 else "trellis"
    if method == "enum":
        if n > 12:
            raise ValueError("enumeration oracle is limited to len(x) <= 12")
        if delta == 0.0:
            return 1.0 if np.array_equal(trim(x), y_star) else 0.0
        if delta == 1.0:
            return 1.0 if y_star.size == 0 else 0.0
        total = 0.0
        target = y_star.tolist()
        for pattern in range(1 << n):
            kept = [(pattern >> k) & 1 for k in range(n)]
            sub = [int(b) for b, keep in zip(x, kept) if keep]
            if trim(np.asarray(sub, dtype=np.uint8)).tolist() == target:
                k = sum(kept)
                total += (1.0 - delta) ** k * delta ** (n - k)
        return total
    if method == "trellis":
        from . import trellis as _trellis  # deferred: trellis builds on this module
        from .hmm_input import uniform_process

        t = _trellis.build_tdc_trellis(uniform_process(), y_star, n, delta)
        log_t = _trellis.path_sum(t, x)
        return 0.0 if log_t == -np.inf else math.exp(log_t + n * math.log(2.0))
    raise ValueError(f"unknown method {method!r}")
