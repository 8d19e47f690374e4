"""Deterministic RNG stream derivation.

Every stochastic component draws from a stream derived from (root seed,
stream name, optional counter).  Derivation goes through SeedSequence with
the name hashed by sha256, so streams are independent of each other, stable
across platforms/runs, and independent of the order in which they are
created -- Monte-Carlo trial k uses stream(seed, name, k) no matter which
worker claims it.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["stream", "uniform_vector"]


def _name_key(name: str) -> list[int]:
    digest = hashlib.sha256(name.encode("utf-8")).digest()
    return [int.from_bytes(digest[k : k + 4], "little") for k in range(0, 16, 4)]


def stream(seed: int, name: str, *counters: int) -> np.random.Generator:
    """A Generator for the (seed, name, *counters) stream, Philox-backed."""
    ss = np.random.SeedSequence([int(seed), *_name_key(name), *map(int, counters)])
    return np.random.Generator(np.random.Philox(ss))


def uniform_vector(seed: int, name: str, count: int, *counters: int) -> np.ndarray:
    """`count` uniforms on [0,1) from the named stream.

    Used for the shared shaping randomness: encoder and decoder both call
    this with identical arguments and therefore see identical r_i without
    any state crossing between them.
    """
    return stream(seed, name, *counters).random(count)
