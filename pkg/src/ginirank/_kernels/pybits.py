"""Pure-numpy word-level bitset kernels.

Fallback backend used when the compiled extension is unavailable (or when
GINIRANK_BACKEND=python forces it). Bitsets are rows of uint64 words, bit j of
word w representing entity id w*64 + j. All functions match the compiled
backend in ginirank._kernels.cybits exactly.
"""

import numpy as np

NAME = "python"


def popcount_rows(bits):
    """Number of set bits in each row of a (n, words) uint64 matrix."""
    return np.bitwise_count(bits).sum(axis=1, dtype=np.int64)


def popcount_vec(vec):
    """Number of set bits in a single uint64 word vector."""
    return int(np.bitwise_count(vec).sum(dtype=np.int64))


def marginal_gain(row, covered):
    """Bits set in row but not in covered."""
    return int(np.bitwise_count(row & ~covered).sum(dtype=np.int64))


def marginal_gains(bits, covered, idx):
    """marginal_gain for the rows listed in idx, as an int64 array."""
    return np.bitwise_count(bits[idx] & ~covered).sum(axis=1, dtype=np.int64)


def or_into(covered, row):
    """covered |= row, in place."""
    np.bitwise_or(covered, row, out=covered)
