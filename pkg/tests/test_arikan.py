"""Polar transform, its inverse, and branch-path index bookkeeping."""

import itertools

import numpy as np
import pytest

from delpolar import (branch_to_index, index_to_branch, inverse_transform,
                      prefix_decisions_slice, transform)
from oracles import matrix_transform, recursive_transform


def test_transform_fixed_points():
    assert transform([0, 0, 0, 0]).tolist() == [0, 0, 0, 0]
    assert transform([1]).tolist() == [1]
    assert transform([0]).tolist() == [0]


def test_transform_length_two():
    # one level is (x1 ^ x2, x2)
    for x1, x2 in itertools.product((0, 1), repeat=2):
        assert transform([x1, x2]).tolist() == [x1 ^ x2, x2]


def test_transform_length_eight_matches_matrix_oracle():
    x = [1, 0, 1, 1, 0, 0, 1, 0]
    # frozen from oracles.matrix_transform (bit-reversal times Kronecker power)
    assert transform(x).tolist() == [0, 1, 1, 1, 1, 0, 1, 0]
    assert matrix_transform(x) == [0, 1, 1, 1, 1, 0, 1, 0]


@pytest.mark.parametrize("n", [1, 2, 4, 8, 16])
def test_involution_exhaustive(n):
    for bits in itertools.product((0, 1), repeat=n):
        x = np.array(bits, dtype=np.uint8)
        assert transform(transform(x)).tolist() == list(bits)


def test_matches_recursive_definition_up_to_16():
    for n in (1, 2, 4, 8, 16):
        for bits in itertools.product((0, 1), repeat=n):
            assert transform(list(bits)).tolist() == recursive_transform(bits)


def test_linearity_over_gf2():
    rng = np.random.default_rng(5)
    for _ in range(200):
        n = 2 ** rng.integers(0, 6)
        a = rng.integers(0, 2, size=n, dtype=np.uint8)
        b = rng.integers(0, 2, size=n, dtype=np.uint8)
        lhs = transform(a ^ b)
        rhs = transform(a) ^ transform(b)
        assert lhs.tolist() == rhs.tolist()


def test_inverse_is_transform_itself():
    assert inverse_transform([0, 1]).tolist() == [1, 1]
    rng = np.random.default_rng(6)
    for _ in range(50):
        x = rng.integers(0, 2, size=32, dtype=np.uint8)
        assert inverse_transform(transform(x)).tolist() == x.tolist()
        assert inverse_transform(x).tolist() == transform(x).tolist()


def test_non_power_of_two_rejected():
    for bad in ([0, 1, 1], [0] * 5, [1] * 12):
        with pytest.raises(ValueError):
            transform(bad)
        with pytest.raises(ValueError):
            inverse_transform(bad)


def test_branch_to_index_examples():
    assert branch_to_index((0, 0, 0)) == 1
    assert branch_to_index((1, 1, 1)) == 8
    assert branch_to_index((0, 1, 1)) == 4


def test_branch_index_bijection_and_order():
    for n in (1, 2, 3, 4):
        seen = [branch_to_index(b)
                for b in itertools.product((0, 1), repeat=n)]
        # lexicographic branch order is exactly increasing index order
        assert seen == list(range(1, 2 ** n + 1))
        for i in range(1, 2 ** n + 1):
            b = index_to_branch(i, n)
            assert branch_to_index(b) == i


def test_index_to_branch_range_check():
    with pytest.raises(ValueError):
        index_to_branch(0, 3)
    with pytest.raises(ValueError):
        index_to_branch(9, 3)


def test_prefix_decisions_slice_examples():
    # theta = sum b_j 2^(n-j), tau = theta - 2^(n-lambda) + 1; the decision
    # count itself fixes n - lambda, so u_hat is passed as a length proxy.
    tau, theta = prefix_decisions_slice((0, 0, 1), [0])
    assert (tau, theta) == (1, 1)
    tau, theta = prefix_decisions_slice((1,), [0, 0, 0, 0])
    assert (tau, theta) == (1, 4)
    tau, theta = prefix_decisions_slice((1, 1), [0, 0, 0])
    assert (tau, theta) == (3, 3)


def test_prefix_decisions_slice_rejects_minus_step():
    with pytest.raises(ValueError):
        prefix_decisions_slice((1, 0), [0, 0])
    with pytest.raises(ValueError):
        prefix_decisions_slice((), [])


def test_block_transform_identity_exhaustive():
    """Transforming 4 blocks of 4 then the per-index 4-vectors equals the
    flat length-16 transform, for every input."""
    phi, n0 = 4, 4
    for val in range(1 << 16):
        x = np.array([(val >> k) & 1 for k in range(16)], dtype=np.uint8)
        u = transform(x)
        v = np.stack([transform(x[p * n0:(p + 1) * n0]) for p in range(phi)])
        for i0 in range(n0):
            outer = transform(v[:, i0])
            assert u[i0 * phi:(i0 + 1) * phi].tolist() == outer.tolist()
