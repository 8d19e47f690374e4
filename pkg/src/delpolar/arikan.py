"""Polar transform over GF(2) and the index bookkeeping for successive cancellation.

The transform acts on binary vectors of length N = 2^n.  One level maps
x to (x_1 + x_2, x_3 + x_4, ..., x_{N-1} + x_N | x_2, x_4, ..., x_N) (sums
mod 2), and the full transform applies this recursively to both halves.  The
resulting map is an involution: applying it twice returns the input.

Indexing follows the branch-path convention used throughout the package.  A
branch path b = (b_1, ..., b_lambda) selects a subtree of the transform
recursion (0 = the XOR half, taken first; 1 = the pass-through half).  A
full-depth path addresses the single transformed symbol u_{i(b)} with

    i(b) = 1 + sum_j b_j 2^(n - j)        (1-based)

so u_1 is the all-XOR bit and u_N is the untouched last input bit.  Public
index contracts in this module are 1-based to match that convention.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

BitString = Sequence[int] | np.ndarray
BranchPath = tuple[int, ...]


def _as_bits(x: BitString) -> np.ndarray:
    out = np.asarray(x, dtype=np.uint8)
    if out.ndim != 1:
        raise ValueError(f"expected a 1-d bit vector, got shape {out.shape}")
    if out.size and out.max() > 1:
        raise ValueError("bit vectors may only contain 0 and 1")
    return out


def transform(x: BitString) -> np.ndarray:
    """Apply the length-2^n polar transform, returning u with u[i(b)-1] = x^[b].

    Iterative butterfly: at each level every contiguous block of length m is
    replaced by (pairwise XORs | odd-position symbols), then the level
    recurses into both halves.  O(N log N).
    """
    u = _as_bits(x).copy()
    n_total = u.size
    if n_total == 0 or n_total & (n_total - 1):
        raise ValueError(f"length must be a power of two, got {n_total}")
    m = n_total
    while m > 1:
        blocks = u.reshape(-1, m)
        odd = blocks[:, 1::2].copy()
        blocks[:, : m // 2] = blocks[:, 0::2] ^ odd
        blocks[:, m // 2 :] = odd
        m //= 2
    return u


def inverse_transform(u: BitString) -> np.ndarray:
    """Invert the transform.  The butterfly is self-inverse, so this is transform()."""
    return transform(u)


def branch_to_index(b: BranchPath) -> int:
    """1-based rank of branch path b among all paths of its depth.

    For a full-depth path this is the index i(b) of the transformed symbol
    u_{i(b)}; e.g. b=(1,0,1) at n=3 addresses u_6.
    """
    i = 1
    for bit in b:
        if bit not in (0, 1):
            raise ValueError(f"branch path bits must be 0/1, got {b!r}")
        i = 2 * i - 1 + bit
    return i


def index_to_branch(i: int, n: int) -> BranchPath:
    """Inverse of branch_to_index for depth-n paths (i is 1-based)."""
    if not 1 <= i <= 1 << n:
        raise ValueError(f"index {i} out of range for n={n}")
    return tuple((i - 1) >> (n - 1 - j) & 1 for j in range(n))


def prefix_decisions_slice(b: BranchPath, u_hat: BitString) -> tuple[int, int]:
    """Locate the decided-symbol slice that conditions a plus transform.

    When successive cancellation descends along b = (b_1, ..., b_lambda) with
    b_lambda = 1, the transform of the newly entered subtree is conditioned on
    the decisions u_hat[tau..theta] (1-based, inclusive) where

        theta = sum_{j<=lambda} b_j 2^(n-j),      tau = theta - 2^(n-lambda) + 1.

    At that point exactly theta decisions exist, so theta = len(u_hat); the
    depth lambda is recovered from the path.  Returns (tau, theta).
    """
    if not b:
        raise ValueError("branch path must be non-empty")
    if b[-1] != 1:
        raise ValueError("slice is only defined when the last branch bit is 1")
    theta = len(u_hat)
    m = branch_to_index(b) - 1  # sum b_j 2^(lambda-j); odd because b ends in 1
    if theta <= 0 or theta % m:
        raise ValueError(
            f"decision count {theta} inconsistent with branch path {b!r}"
        )
    span = theta // m  # 2^(n-lambda)
    if span & (span - 1):
        raise ValueError(
            f"decision count {theta} inconsistent with branch path {b!r}"
        )
    return theta - span + 1, theta
