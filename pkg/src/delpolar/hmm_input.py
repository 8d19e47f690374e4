"""Hidden-Markov (finite-state) input processes.

A process is a joint Markov chain on (state, symbol): the kernel entry
kernel[a, b, x] is P(S_j = b, X_j = x | S_{j-1} = a).  The chain must be
irreducible and aperiodic on its state marginal and is always started from
its stationary distribution, so the emitted symbol process is stationary.
The symbol marginal is the (generally hidden-Markov) input process fed to
the channel.

Besides the generic container this module provides the two stock inputs used
everywhere (uniform i.i.d. and the two-state symmetric Markov source), a
construction that packages an arbitrary i.i.d. block distribution with a
random dither bit as one stationary finite-state process, and a JSON
file format for external process definitions.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

__all__ = [
    "FaimProcess",
    "ProcessDiagnostics",
    "uniform_process",
    "markov_process",
    "build_dithered_block_process",
    "validate",
    "sample",
    "sample_batch",
    "exact_probability",
    "load_process",
    "dump_process",
    "process_from_dict",
    "process_to_dict",
    "parse_process_arg",
]

_ROW_SUM_TOL = 1e-12
_STATIONARY_TOL = 1e-10


@dataclass(frozen=True)
class FaimProcess:
    """Finite-state joint Markov source of (state, symbol) pairs.

    kernel: (S, S, 2) array, kernel[a, b, x] = P(S_j=b, X_j=x | S_{j-1}=a).
    stationary: (S,) stationary distribution of the state marginal.
    """

    states: tuple[str, ...]
    kernel: np.ndarray
    stationary: np.ndarray

    @property
    def n_states(self) -> int:
        return len(self.states)

    def state_matrix(self) -> np.ndarray:
        """State transition matrix T[a, b] = P(S_j=b | S_{j-1}=a)."""
        return self.kernel.sum(axis=2)


@dataclass
class ProcessDiagnostics:
    ok: bool
    row_sum_error: float
    stationary_residual: float
    irreducible: bool
    aperiodic: bool
    problems: list[str] = field(default_factory=list)


def _stationary_of(transition: np.ndarray) -> np.ndarray:
    """Stationary row vector of a stochastic matrix.

    Power iteration to 1e-12; falls back to the eigenvector of eigenvalue 1
    if the iteration stalls (e.g. slowly mixing chains).
    """
    n = transition.shape[0]
    pi = np.full(n, 1.0 / n)
    for _ in range(10_000):
        nxt = pi @ transition
        nxt /= nxt.sum()
        if np.abs(nxt - pi).max() < 1e-12:
            return nxt
        pi = nxt
    vals, vecs = np.linalg.eig(transition.T)
    k = int(np.argmin(np.abs(vals - 1.0)))
    pi = np.real(vecs[:, k])
    pi = np.abs(pi)
    return pi / pi.sum()


def _make_process(states: Sequence[str], kernel: np.ndarray,
                  stationary: np.ndarray | None = None) -> FaimProcess:
    kernel = np.asarray(kernel, dtype=np.float64)
    if kernel.ndim != 3 or kernel.shape[2] != 2 or kernel.shape[0] != kernel.shape[1]:
        raise ValueError(f"kernel must have shape (S, S, 2), got {kernel.shape}")
    if kernel.shape[0] != len(states):
        raise ValueError("state name count does not match kernel size")
    if stationary is None:
        stationary = _stationary_of(kernel.sum(axis=2))
    proc = FaimProcess(tuple(states), kernel, np.asarray(stationary, dtype=np.float64))
    diag = validate(proc)
    if not diag.ok:
        raise ValueError("invalid process: " + "; ".join(diag.problems))
    return proc


def uniform_process() -> FaimProcess:
    """Memoryless uniform bits: one state, each symbol with probability 1/2."""
    kernel = np.full((1, 1, 2), 0.5)
    return _make_process(("o",), kernel, np.array([1.0]))


def markov_process(p_same: float) -> FaimProcess:
    """Two-state symmetric Markov bits: repeat last symbol w.p. p_same.

    State is the previous symbol; emitting x moves to state x.
    """
    if not 0.0 < p_same < 1.0:
        raise ValueError(f"p_same must be in (0,1), got {p_same}")
    kernel = np.zeros((2, 2, 2))
    for prev in (0, 1):
        for x in (0, 1):
            kernel[prev, x, x] = p_same if x == prev else 1.0 - p_same
    return _make_process(("0", "1"), kernel, np.array([0.5, 0.5]))


def validate(process: FaimProcess) -> ProcessDiagnostics:
    """Check stochasticity, stationarity, irreducibility and aperiodicity.

    Irreducibility + aperiodicity together are equivalent to some power of
    the transition matrix being strictly positive; the Wielandt bound
    (S-1)^2 + 1 caps the power that needs checking.
    """
    problems: list[str] = []
    kernel = process.kernel
    if np.any(kernel < 0):
        problems.append("kernel has negative entries")
    row_err = float(np.abs(kernel.sum(axis=(1, 2)) - 1.0).max())
    if row_err > _ROW_SUM_TOL:
        problems.append(f"kernel rows sum to 1 only within {row_err:.3e}")

    transition = process.state_matrix()
    pi = process.stationary
    res = float(np.abs(pi @ transition - pi).max()) if pi.size else math.inf
    if abs(pi.sum() - 1.0) > _STATIONARY_TOL or np.any(pi < -_STATIONARY_TOL):
        problems.append("stationary vector is not a distribution")
    if res > _STATIONARY_TOL:
        problems.append(f"stationary fixed-point residual {res:.3e}")

    def compose(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        # boolean matrix product (OR of ANDs)
        return (a[:, :, None] & b[None, :, :]).any(axis=1)

    reach = transition > 0
    n = reach.shape[0]
    power = reach.copy()
    closure = reach | np.eye(n, dtype=bool)
    for _ in range(max(1, int(math.ceil(math.log2(n))) if n > 1 else 1)):
        closure = compose(closure, closure)
    irreducible = bool(closure.all())
    if not irreducible:
        problems.append("state graph is not strongly connected")

    # strictly positive power within the Wielandt bound <=> primitive
    limit = (n - 1) * (n - 1) + 1
    steps = 1
    while steps < limit:
        power = compose(power, power)
        steps *= 2
    aperiodic = bool(power.all()) and irreducible
    if irreducible and not aperiodic:
        problems.append("chain is periodic")

    return ProcessDiagnostics(
        ok=not problems,
        row_sum_error=row_err,
        stationary_residual=res,
        irreducible=irreducible,
        aperiodic=aperiodic,
        problems=problems,
    )


def sample(process: FaimProcess, n: int, rng: np.random.Generator
           ) -> tuple[np.ndarray, int, int]:
    """Draw (x, s0, sN): n symbols plus the bracketing states."""
    x, s0, sn = sample_batch(process, n, 1, rng)
    return x[0], int(s0[0]), int(sn[0])


def sample_batch(process: FaimProcess, n: int, count: int,
                 rng: np.random.Generator
                 ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized sampling of `count` independent length-n realizations."""
    flat = process.kernel.reshape(process.n_states, -1)  # (S, 2S): b*2+x major
    cum = np.cumsum(flat, axis=1)
    cum[:, -1] = 1.0
    s0 = rng.choice(process.n_states, size=count, p=process.stationary)
    state = s0.copy()
    xs = np.empty((count, n), dtype=np.uint8)
    for j in range(n):
        u = rng.random(count)
        pick = (u[:, None] >= cum[state]).sum(axis=1)
        state = pick >> 1
        xs[:, j] = pick & 1
    return xs, s0, state


def exact_probability(process: FaimProcess, x: Sequence[int]) -> float:
    """P(X_1^n = x) under the stationary process (forward algorithm)."""
    v = process.stationary.copy()
    for bit in np.asarray(x, dtype=np.int64):
        v = v @ process.kernel[:, :, bit]
    return float(v.sum())


def build_dithered_block_process(block_dist: np.ndarray | Sequence[float],
                                 n: int) -> FaimProcess:
    """Package an i.i.d. block distribution as one stationary process.

    block_dist[k] is the probability of the length-n block whose bits are the
    binary digits of k (MSB first).  States are the positive-probability
    proper prefixes of blocks ("eps" = empty, then the bit strings
    themselves) plus "tau".  After each completed block a fair coin decides
    whether the next block starts immediately (back to eps) or is delayed by
    one dither step; tau emits a 0 and returns to eps.  The eps->...->eps
    loops have lengths n and n+1, so the chain is aperiodic, and it is
    started from its stationary distribution.
    """
    dist = np.asarray(block_dist, dtype=np.float64)
    if dist.shape != (1 << n,):
        raise ValueError(f"block_dist must have 2^{n} entries, got {dist.shape}")
    if np.any(dist < 0) or abs(dist.sum() - 1.0) > 1e-12:
        raise ValueError("block_dist must be a probability distribution")

    # prefix probabilities: pref[j] maps a length-j prefix (as an int) to P(prefix)
    pref: list[dict[int, float]] = [dict() for _ in range(n + 1)]
    for k, p in enumerate(dist):
        if p == 0.0:
            continue
        for j in range(n + 1):
            key = k >> (n - j)
            pref[j][key] = pref[j].get(key, 0.0) + p

    def prefix_name(j: int, key: int) -> str:
        return "eps" if j == 0 else format(key, f"0{j}b")

    names: list[str] = []
    index: dict[tuple[int, int], int] = {}
    for j in range(n):  # proper prefixes only
        for key in sorted(pref[j]):
            index[(j, key)] = len(names)
            names.append(prefix_name(j, key))
    tau = len(names)
    names.append("tau")

    size = len(names)
    kernel = np.zeros((size, size, 2))
    for j in range(n):
        for key, p_here in pref[j].items():
            a = index[(j, key)]
            for x in (0, 1):
                p_next = pref[j + 1].get(key << 1 | x, 0.0)
                if p_next == 0.0:
                    continue
                cond = p_next / p_here
                if j + 1 < n:
                    kernel[a, index[(j + 1, key << 1 | x)], x] = cond
                else:  # block complete: coin flip between eps and tau
                    kernel[a, index[(0, 0)], x] = cond / 2.0
                    kernel[a, tau, x] = cond / 2.0
    kernel[tau, index[(0, 0)], 0] = 1.0
    return _make_process(names, kernel)


# --- JSON process files ----------------------------------------------------
#
# {
#   "states": ["a", "b"],
#   "kernel": {"a": [["a", 0, 0.45], ["b", 1, 0.55]], "b": [...]},
#   "stationary": [0.5, 0.5]        # optional; recomputed when absent
# }


def load_process(path: str) -> FaimProcess:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    return process_from_dict(doc)


def process_from_dict(doc: Mapping) -> FaimProcess:
    states = [str(s) for s in doc["states"]]
    lookup = {s: k for k, s in enumerate(states)}
    if len(lookup) != len(states):
        raise ValueError("duplicate state names")
    kernel = np.zeros((len(states), len(states), 2))
    for src, entries in doc["kernel"].items():
        a = lookup[str(src)]
        for dst, sym, prob in entries:
            kernel[a, lookup[str(dst)], int(sym)] += float(prob)
    stationary = doc.get("stationary")
    if stationary is not None:
        stationary = np.asarray(stationary, dtype=np.float64)
    return _make_process(states, kernel, stationary)


def process_to_dict(process: FaimProcess) -> dict:
    entries: dict[str, list] = {}
    for a, name in enumerate(process.states):
        rows = []
        for b in range(process.n_states):
            for x in (0, 1):
                w = process.kernel[a, b, x]
                if w > 0.0:
                    rows.append([process.states[b], x, float(w)])
        entries[name] = rows
    return {
        "states": list(process.states),
        "kernel": entries,
        "stationary": [float(v) for v in process.stationary],
    }


def dump_process(process: FaimProcess, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(process_to_dict(process), fh, indent=2, sort_keys=True)
        fh.write("\n")


def parse_process_arg(spec: str) -> FaimProcess:
    """CLI process argument: 'uniform', 'markov:p', or a JSON file path."""
    if spec == "uniform":
        return uniform_process()
    if spec.startswith("markov:"):
        return markov_process(float(spec.split(":", 1)[1]))
    return load_process(spec)
