"""Compiled word-level bitset kernels.

Same contract as ginirank._kernels.pybits; see that module for the bit layout.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

NAME = "cython"

cdef extern from *:
    """
    #if defined(__GNUC__) || defined(__clang__)
    #define GR_POPCOUNT64(x) __builtin_popcountll(x)
    #else
    static inline int GR_POPCOUNT64(unsigned long long x) {
        x = x - ((x >> 1) & 0x5555555555555555ULL);
        x = (x & 0x3333333333333333ULL) + ((x >> 2) & 0x3333333333333333ULL);
        x = (x + (x >> 4)) & 0x0f0f0f0f0f0f0f0fULL;
        return (int)((x * 0x0101010101010101ULL) >> 56);
    }
    #endif
    """
    int GR_POPCOUNT64(unsigned long long x) nogil


def popcount_rows(cnp.uint64_t[:, ::1] bits):
    """Number of set bits in each row of a (n, words) uint64 matrix."""
    cdef Py_ssize_t n = bits.shape[0]
    cdef Py_ssize_t w = bits.shape[1]
    cdef Py_ssize_t i, j
    cdef long long acc
    out = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] ov = out
    with nogil:
        for i in range(n):
            acc = 0
            for j in range(w):
                acc += GR_POPCOUNT64(bits[i, j])
            ov[i] = acc
    return out


def popcount_vec(cnp.uint64_t[::1] vec):
    """Number of set bits in a single uint64 word vector."""
    cdef Py_ssize_t j
    cdef long long acc = 0
    with nogil:
        for j in range(vec.shape[0]):
            acc += GR_POPCOUNT64(vec[j])
    return acc


def marginal_gain(cnp.uint64_t[::1] row, cnp.uint64_t[::1] covered):
    """Bits set in row but not in covered."""
    cdef Py_ssize_t j
    cdef long long acc = 0
    with nogil:
        for j in range(row.shape[0]):
            acc += GR_POPCOUNT64(row[j] & ~covered[j])
    return acc


def marginal_gains(cnp.uint64_t[:, ::1] bits, cnp.uint64_t[::1] covered,
                   cnp.int64_t[::1] idx):
    """marginal_gain for the rows listed in idx, as an int64 array."""
    cdef Py_ssize_t n = idx.shape[0]
    cdef Py_ssize_t w = bits.shape[1]
    cdef Py_ssize_t i, j, r
    cdef long long acc
    out = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] ov = out
    with nogil:
        for i in range(n):
            r = idx[i]
            acc = 0
            for j in range(w):
                acc += GR_POPCOUNT64(bits[r, j] & ~covered[j])
            ov[i] = acc
    return out


def or_into(cnp.uint64_t[::1] covered, cnp.uint64_t[::1] row):
    """covered |= row, in place."""
    cdef Py_ssize_t j
    with nogil:
        for j in range(covered.shape[0]):
            covered[j] |= row[j]
