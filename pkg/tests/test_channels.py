"""Deletion channel, trimmed deletion channel, and their exact laws."""

import itertools

import numpy as np
import pytest
import scipy.stats

import oracles
from delpolar import (embedding_count, exact_law, tdc_exact_law, transmit,
                      transmit_block_tdc, trim)


def test_transmit_delta_zero_is_identity():
    rng = np.random.default_rng(0)
    x = rng.integers(0, 2, size=64, dtype=np.uint8)
    y, kept = transmit(x, 0.0, rng)
    assert y.tolist() == x.tolist()
    assert kept.all()


def test_transmit_output_is_kept_subsequence():
    rng = np.random.default_rng(1)
    for _ in range(200):
        x = rng.integers(0, 2, size=30, dtype=np.uint8)
        y, kept = transmit(x, 0.4, rng)
        assert y.tolist() == x[kept].tolist()


def test_transmit_survivor_count_mean():
    rng = np.random.default_rng(2)
    x = np.ones(10_000, dtype=np.uint8)
    y, _ = transmit(x, 0.5, rng)
    # binomial(10^4, 1/2): mean 5000, sigma 50
    assert abs(y.size - 5000) < 3 * 50


def test_transmit_empirical_law_matches_exact_law():
    """Chi-square goodness of fit of 10^6 simulated outputs against the
    enumerated deletion law, N=4."""
    rng = np.random.default_rng(3)
    x = np.array([1, 0, 1, 1], dtype=np.uint8)
    delta = 0.3
    outputs = [tuple(v) for m in range(5)
               for v in itertools.product((0, 1), repeat=m)]
    counts = {y: 0 for y in outputs}
    trials = 1_000_000
    for _ in range(trials):
        y, _ = transmit(x, delta, rng)
        counts[tuple(int(b) for b in y)] += 1
    expected, observed = [], []
    for y in outputs:
        p = exact_law(x, list(y), delta)
        if p > 0.0:
            expected.append(p * trials)
            observed.append(counts[y])
        else:
            assert counts[y] == 0
    stat, pvalue = scipy.stats.chisquare(observed, expected)
    assert pvalue > 1e-3


def test_exact_law_embedding_examples():
    # of the four single-deletion patterns of (0,1,1,0), exactly one gives
    # (0,1,1) and exactly two give (0,1,0)
    assert embedding_count([0, 1, 1, 0], [0, 1, 1]) == 1
    assert embedding_count([0, 1, 1, 0], [0, 1, 0]) == 2
    d = 0.2
    assert exact_law([0, 1, 1, 0], [0, 1, 1], d) == pytest.approx(1 * 0.8 ** 3 * d)
    assert exact_law([0, 1, 1, 0], [0, 1, 0], d) == pytest.approx(2 * 0.8 ** 3 * d)


def test_exact_law_boundary_cases():
    x = [1, 0, 0, 1, 1]
    assert exact_law(x, x, 0.25) == pytest.approx(0.75 ** 5)
    assert exact_law(x, [], 0.25) == pytest.approx(0.25 ** 5)
    assert exact_law([1, 0], [1, 0, 1], 0.3) == 0.0


def test_exact_law_matches_pattern_enumeration():
    rng = np.random.default_rng(4)
    for _ in range(150):
        n = int(rng.integers(1, 9))
        x = rng.integers(0, 2, size=n, dtype=np.uint8)
        m = int(rng.integers(0, n + 1))
        y = rng.integers(0, 2, size=m, dtype=np.uint8)
        want = oracles.deletion_law(x.tolist(), y.tolist(), 0.35)
        assert exact_law(x, y, 0.35) == pytest.approx(want, rel=1e-12, abs=1e-300)


def test_exact_law_normalization():
    delta = 0.3
    for n in range(1, 9):
        for xb in itertools.product((0, 1), repeat=n):
            total = sum(exact_law(xb, yb, delta)
                        for m in range(n + 1)
                        for yb in itertools.product((0, 1), repeat=m))
            assert total == pytest.approx(1.0, abs=1e-10)
    # spot-check longer inputs on random x
    rng = np.random.default_rng(5)
    for _ in range(25):
        x = rng.integers(0, 2, size=10, dtype=np.uint8)
        total = sum(exact_law(x, yb, delta)
                    for m in range(11)
                    for yb in itertools.product((0, 1), repeat=m))
        assert total == pytest.approx(1.0, abs=1e-10)


def test_exact_law_reversal_symmetry():
    rng = np.random.default_rng(6)
    for _ in range(100):
        x = rng.integers(0, 2, size=8, dtype=np.uint8)
        y = rng.integers(0, 2, size=int(rng.integers(0, 9)), dtype=np.uint8)
        assert exact_law(x, y, 0.4) == pytest.approx(
            exact_law(x[::-1], y[::-1], 0.4), rel=1e-12, abs=1e-300)


def test_trim():
    assert trim([0, 0, 1, 0, 1, 0]).tolist() == [1, 0, 1]
    assert trim([0, 0, 0]).tolist() == []
    assert trim([]).tolist() == []
    assert trim([1, 1]).tolist() == [1, 1]
    rng = np.random.default_rng(7)
    for _ in range(100):
        y = rng.integers(0, 2, size=12, dtype=np.uint8)
        once = trim(y)
        assert trim(once).tolist() == once.tolist()
        if once.size:
            assert once[0] == 1 and once[-1] == 1


def test_block_tdc_single_block_couples_to_transmit():
    # identical generator state => identical deletion draws
    x = np.array([0, 1, 1, 0, 1, 0, 0, 1], dtype=np.uint8)
    for seed in range(20):
        blocks, _ = transmit_block_tdc(x, 8, 0.35, np.random.default_rng(seed))
        y, _ = transmit(x, 0.35, np.random.default_rng(seed))
        assert len(blocks) == 1
        assert blocks[0].tolist() == trim(y).tolist()


def test_block_tdc_delta_zero_trims_each_block():
    rng = np.random.default_rng(8)
    x = rng.integers(0, 2, size=16, dtype=np.uint8)
    blocks, kept = transmit_block_tdc(x, 4, 0.0, rng)
    assert len(blocks) == 4
    for p, blk in enumerate(blocks):
        assert blk.tolist() == trim(x[4 * p:4 * p + 4]).tolist()
    assert kept.all()


def test_block_tdc_joint_law_is_product_of_tdc_laws():
    """Empirical joint block-output frequencies for Phi=2, N0=2 match the
    product of single-block TDC laws."""
    rng = np.random.default_rng(9)
    x = np.array([1, 0, 0, 1], dtype=np.uint8)
    delta = 0.4
    trials = 200_000
    counts = {}
    for _ in range(trials):
        blocks, _ = transmit_block_tdc(x, 2, delta, rng)
        key = tuple(tuple(int(b) for b in blk) for blk in blocks)
        counts[key] = counts.get(key, 0) + 1
    trimmed = [(), (1,), (1, 1)]
    observed, expected = [], []
    for b1 in trimmed:
        for b2 in trimmed:
            p = (tdc_exact_law(x[:2], list(b1), delta)
                 * tdc_exact_law(x[2:], list(b2), delta))
            if p > 0.0:
                expected.append(p * trials)
                observed.append(counts.get((b1, b2), 0))
    assert sum(observed) == trials
    stat, pvalue = scipy.stats.chisquare(observed, expected)
    assert pvalue > 1e-3


def test_tdc_law_lone_zero_always_vanishes():
    assert tdc_exact_law([0], [], 0.3) == pytest.approx(1.0)
    assert tdc_exact_law([0], [1], 0.3) == 0.0


def test_tdc_law_example_and_oracle_agreement():
    # frozen from the pattern-enumeration oracle
    assert tdc_exact_law([1, 0, 1], [1], 0.3) == pytest.approx(0.41999999999999993)
    rng = np.random.default_rng(10)
    for _ in range(60):
        n = int(rng.integers(1, 8))
        x = rng.integers(0, 2, size=n, dtype=np.uint8)
        m = int(rng.integers(0, n + 1))
        ys = [1] + rng.integers(0, 2, size=max(m - 2, 0), dtype=np.uint8).tolist() + [1]
        ys = ys[:m] if m >= 2 else ([1] if m == 1 else [])
        want = oracles.tdc_law(x.tolist(), list(ys), 0.25)
        assert tdc_exact_law(x, ys, 0.25) == pytest.approx(want, rel=1e-12, abs=1e-300)


def _all_trimmed(n):
    out = [[], [1]]
    for m in range(2, n + 1):
        out.extend([1] + list(mid) + [1]
                   for mid in itertools.product((0, 1), repeat=m - 2))
    return out


def test_tdc_law_normalization():
    delta = 0.3
    for n in range(1, 7):
        trimmed = _all_trimmed(n)
        for xb in itertools.product((0, 1), repeat=n):
            total = sum(tdc_exact_law(xb, ys, delta) for ys in trimmed)
            assert total == pytest.approx(1.0, abs=1e-10)
    # the pattern enumeration gets expensive past n=6; keep n=8 sampled,
    # through the faster trellis route
    rng = np.random.default_rng(12)
    trimmed = _all_trimmed(8)
    for _ in range(12):
        x = rng.integers(0, 2, size=8, dtype=np.uint8)
        total = sum(tdc_exact_law(x, ys, delta, method="trellis")
                    for ys in trimmed)
        assert total == pytest.approx(1.0, abs=1e-10)


def test_tdc_law_rejects_untrimmed_output():
    with pytest.raises(ValueError):
        tdc_exact_law([1, 0, 1], [0, 1], 0.3)
    with pytest.raises(ValueError):
        tdc_exact_law([1, 0, 1], [1, 0], 0.3)


def test_tdc_law_trellis_route_matches_enumeration():
    rng = np.random.default_rng(11)
    for _ in range(40):
        x = rng.integers(0, 2, size=7, dtype=np.uint8)
        y = [1, int(rng.integers(0, 2)), 1]
        a = tdc_exact_law(x, y, 0.2, method="enum")
        b = tdc_exact_law(x, y, 0.2, method="trellis")
        assert b == pytest.approx(a, rel=1e-10, abs=1e-300)
