"""Guard-band framing, midpoint segmentation, and failure statistics."""

import numpy as np
import pytest

import oracles
from delpolar import (FaimProcess, GuardLayout, block_offsets,
                      insert_guard_bands, remove_guard_bands, segment,
                      segmentation_failure_rate, trim, uniform_process)


def all_ones_process():
    kernel = np.zeros((1, 1, 2))
    kernel[0, 0, 1] = 1.0
    return FaimProcess(states=("s",), kernel=kernel, stationary=np.array([1.0]))


# ---------------------------------------------------------------------------
# Layout geometry


def test_layout_validation():
    GuardLayout(n=5, n0=3, xi=0.25)
    with pytest.raises(ValueError):
        GuardLayout(n=5, n0=1, xi=0.25)
    with pytest.raises(ValueError):
        GuardLayout(n=2, n0=3, xi=0.25)
    with pytest.raises(ValueError):
        GuardLayout(n=5, n0=3, xi=0.0)
    with pytest.raises(ValueError):
        GuardLayout(n=5, n0=3, xi=0.5)


def test_single_block_layout_has_no_guards():
    lay = GuardLayout(n=3, n0=3, xi=0.25)
    assert lay.phi == 1
    assert lay.encoded_length() == 8
    x = np.array([1, 0, 1, 1, 0, 0, 1, 0], dtype=np.uint8)
    framed = insert_guard_bands(x, lay)
    assert framed.tolist() == x.tolist()
    assert remove_guard_bands(framed, lay).tolist() == x.tolist()
    assert block_offsets(lay).tolist() == [0]


def test_hand_worked_two_block_frame():
    # ell_3 = floor(2^(0.75 * 2)) = 2, so 8 symbols frame into 10.
    lay = GuardLayout(n=3, n0=2, xi=0.25)
    assert lay.guard_length(3) == 2
    assert lay.encoded_length() == 10
    framed = insert_guard_bands(np.ones(8, dtype=np.uint8), lay)
    assert framed.tolist() == [1, 1, 1, 1, 0, 0, 1, 1, 1, 1]
    assert block_offsets(lay).tolist() == [0, 6]


@pytest.mark.parametrize("xi", [0.1, 0.2, 0.25, 0.3, 0.4])
@pytest.mark.parametrize("n0", [2, 4])
def test_guard_lengths_match_exact_rational(n0, xi):
    want = oracles.guard_lengths(n0, 14, xi)
    lay = GuardLayout(n=14, n0=n0, xi=xi)
    for t in range(n0 + 1, 15):
        assert lay.guard_length(t) == want[t], f"t={t}"


def test_encoded_length_closed_form_and_overhead_bound():
    for n0 in range(2, 7):
        for xi in (0.1, 0.25, 0.4):
            for n in range(n0, 13):
                lay = GuardLayout(n=n, n0=n0, xi=xi)
                ell = oracles.guard_lengths(n0, n, xi)
                want = (1 << n) + sum((1 << (n - t)) * ell[t]
                                      for t in range(n0 + 1, n + 1))
                assert lay.encoded_length() == want
                bound = 1.0 + 2.0 ** (-xi * n0 - 1) / (1.0 - 2.0 ** (-xi))
                assert lay.encoded_length() / (1 << n) <= bound + 1e-12


def test_insert_matches_recursive_reference():
    rng = np.random.default_rng(0)
    lay = GuardLayout(n=5, n0=2, xi=0.25)
    x = rng.integers(0, 2, size=32, dtype=np.uint8)
    assert (insert_guard_bands(x, lay).tolist()
            == oracles.insert_guards_recursive(x.tolist(), 2, 0.25))


def test_remove_inverts_insert():
    rng = np.random.default_rng(1)
    for n0, n, xi in [(2, 4, 0.25), (3, 6, 0.1), (4, 7, 0.4), (2, 8, 0.3)]:
        lay = GuardLayout(n=n, n0=n0, xi=xi)
        x = rng.integers(0, 2, size=1 << n, dtype=np.uint8)
        assert remove_guard_bands(insert_guard_bands(x, lay), lay).tolist() \
            == x.tolist()


def test_frame_length_errors():
    lay = GuardLayout(n=4, n0=2, xi=0.25)
    with pytest.raises(ValueError):
        insert_guard_bands(np.zeros(15, dtype=np.uint8), lay)
    with pytest.raises(ValueError):
        remove_guard_bands(np.zeros(7, dtype=np.uint8), lay)
    bad = insert_guard_bands(np.ones(16, dtype=np.uint8), lay)
    bad[4 + 1] = 1  # first guard position (ell_3 = 2 after a 4-block)
    with pytest.raises(ValueError):
        remove_guard_bands(bad, lay)


def test_block_offsets_point_at_blocks():
    lay = GuardLayout(n=5, n0=2, xi=0.25)
    x = np.arange(32, dtype=np.uint8) % 2
    x[:4] = [1, 0, 1, 1]
    framed = insert_guard_bands(x, lay)
    offs = block_offsets(lay)
    assert offs.size == lay.phi == 8
    for k, off in enumerate(offs):
        assert framed[off:off + 4].tolist() == x[4 * k:4 * k + 4].tolist()


# ---------------------------------------------------------------------------
# Segmentation


def test_segment_single_block_is_trim():
    lay = GuardLayout(n=2, n0=2, xi=0.25)
    for y in ([0, 1, 1, 0], [0, 0, 0], [], [1]):
        res = segment(np.array(y, dtype=np.uint8), lay)
        assert len(res.blocks) == 1
        assert res.blocks[0].tolist() == trim(np.array(y, dtype=np.uint8)).tolist()
        assert res.genie_ok is None


def test_segment_empty_output_yields_empty_blocks():
    lay = GuardLayout(n=4, n0=2, xi=0.25)
    res = segment(np.array([], dtype=np.uint8), lay,
                  origins=np.array([], dtype=np.int64))
    assert len(res.blocks) == lay.phi == 4
    assert all(b.size == 0 for b in res.blocks)
    assert res.genie_ok is True  # empty segments cannot be missplit


def test_segment_noiseless_recovers_one_bounded_blocks():
    # Exact noiseless recovery is guaranteed when every block starts and
    # ends with a 1, so no guard run merges with block-edge zeros.
    rng = np.random.default_rng(7)
    lay = GuardLayout(n=6, n0=2, xi=0.25)
    x = rng.integers(0, 2, size=64, dtype=np.uint8)
    x[0::4] = 1
    x[3::4] = 1
    framed = insert_guard_bands(x, lay)
    res = segment(framed, lay, origins=np.arange(framed.size))
    assert res.genie_ok is True
    assert len(res.blocks) == 16
    for k in range(16):
        assert res.blocks[k].tolist() == x[4 * k:4 * k + 4].tolist()


def test_segment_noiseless_zero_edges_can_missplit():
    # Without the 1-bounded condition even delta=0 can shift the trimmed
    # midpoint off the guard: the all-zero second block below is absorbed
    # into the trailing trim and the word splits inside the first block.
    lay = GuardLayout(n=3, n0=2, xi=0.25)
    x = np.array([1, 1, 1, 1, 0, 0, 0, 0], dtype=np.uint8)
    framed = insert_guard_bands(x, lay)
    res = segment(framed, lay, origins=np.arange(framed.size))
    assert res.genie_ok is False
    assert res.blocks[0].tolist() == [1, 1]
    assert res.blocks[1].tolist() == [1, 1]


def test_genie_midpoint_flag_is_consistent_with_counts():
    """mid_in_guard must equal 'the middle received symbol originated from
    this node's guard run', which the left/guard counts determine exactly."""
    rng = np.random.default_rng(12)
    proc = uniform_process()
    lay = GuardLayout(n=7, n0=3, xi=0.25)
    from delpolar import sample_batch, transmit
    xs, _, _ = sample_batch(proc, 8, lay.phi, rng)
    framed = insert_guard_bands(xs.reshape(-1), lay)
    seen = 0
    for _ in range(40):
        y, kept = transmit(framed, 0.15, rng)
        res = segment(y, lay, origins=np.flatnonzero(kept))
        for c in res.checks:
            assert c.z_left + c.z_guard + c.z_right == c.zeta
            if c.zeta == 0:
                assert c.mid_in_guard
                continue
            mid = (c.zeta + 1) // 2
            assert c.mid_in_guard == (c.z_left < mid <= c.z_left + c.z_guard)
            seen += 1
    assert seen > 100


def test_segmentation_never_fails_without_deletions():
    stats = segmentation_failure_rate(
        all_ones_process(), GuardLayout(n=7, n0=4, xi=0.25), 0.0, 60,
        np.random.default_rng(3))
    assert stats.failures == 0
    assert stats.mismatched_frames == 0
    assert stats.total_node_misses == 0
    assert stats.failure_rate == 0.0


def test_failure_rate_drops_with_block_depth():
    rng = np.random.default_rng(42)
    proc = uniform_process()
    small = segmentation_failure_rate(proc, GuardLayout(n=6, n0=4, xi=0.25),
                                      0.1, 1500, rng)
    large = segmentation_failure_rate(proc, GuardLayout(n=8, n0=6, xi=0.25),
                                      0.1, 1500, rng)
    assert small.failures >= 15          # ~2.6% observed rate
    assert large.failures <= small.failures // 2


def test_failure_statistics_are_coupled():
    stats = segmentation_failure_rate(
        uniform_process(), GuardLayout(n=6, n0=3, xi=0.25), 0.15, 400,
        np.random.default_rng(9))
    assert stats.trials == 400
    assert stats.mismatched_frames <= stats.failures
    assert stats.failures <= stats.total_node_misses
    assert set(stats.node_misses) == {4, 5, 6}
    with pytest.raises(ValueError):
        segmentation_failure_rate(uniform_process(),
                                  GuardLayout(n=6, n0=3, xi=0.25), 0.1, 0,
                                  np.random.default_rng(0))
