"""Coverage-based prioritization: total-coverage and additional-coverage orders.

ctm sorts tests by signature size, largest first. cam greedily picks the test
with the largest marginal gain over the union of what is already covered;
once every remaining test's gain is zero (the suite's maximum coverage is
reached) the remainder is appended in ctm order and saturation_index records
how many greedy picks happened. Both break ties toward the lower test index,
so results are deterministic.

cam runs on word-packed uint64 bitsets with a stale-gain max-heap: an entry's
cached gain is only trusted when it was computed against the current covered
set (selection stamp), otherwise it is recomputed and pushed back. Cached
gains never understate the true gain, so a fresh pop with gain zero proves
every remaining gain is zero.
"""

import heapq
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .model import Permutation


@dataclass(frozen=True, eq=False)
class PrioritizationOutcome:
    """An execution order plus where (if ever) coverage growth stopped."""

    order: Permutation
    saturation_index: int
    method: str


def _check_suite(sigs):
    if not sigs:
        raise ValueError("need at least one signature")
    universe = sigs[0].universe_size
    if any(s.universe_size != universe for s in sigs):
        raise ValueError("signatures come from different universes")
    return universe


def pack_signatures(sigs):
    """Pack signatures into a (n_tests, words) uint64 bit matrix."""
    universe = _check_suite(sigs)
    n = len(sigs)
    words = (universe + 63) // 64
    bits = np.zeros((n, words), dtype=np.uint64)
    counts = np.array([s.ids.size for s in sigs], dtype=np.int64)
    if counts.sum() > 0:
        all_ids = np.concatenate([s.ids for s in sigs]).astype(np.int64)
        rows = np.repeat(np.arange(n, dtype=np.int64), counts)
        flat = rows * words + (all_ids >> 6)
        vals = np.left_shift(np.uint64(1), (all_ids & 63).astype(np.uint64))
        np.bitwise_or.at(bits.reshape(-1), flat, vals)
    return bits


def _ctm_order(counts, tie_seed=None):
    n = counts.size
    if tie_seed is None:
        tiekey = np.arange(n)
    else:
        tiekey = np.random.default_rng(tie_seed).permutation(n)
    return np.lexsort((tiekey, -counts))


def ctm(sigs, tie_seed=None):
    """Sort by total covered entities, descending; ties by index, or shuffled
    reproducibly when tie_seed is given."""
    _check_suite(sigs)
    counts = np.array([s.ids.size for s in sigs], dtype=np.int64)
    order = _ctm_order(counts, tie_seed)
    return PrioritizationOutcome(Permutation.from_order(order), len(sigs), "ctm")


def cam(sigs, backend=None):
    """Greedy maximal-marginal-gain order (lazy evaluation, exact result)."""
    _check_suite(sigs)
    kern = _kernels.get_backend(backend)
    bits = pack_signatures(sigs)
    n = bits.shape[0]
    counts = kern.popcount_rows(bits)
    covered = np.zeros(bits.shape[1], dtype=np.uint64)
    heap = [(-int(g), i) for i, g in enumerate(counts)]
    heapq.heapify(heap)
    stamp = np.zeros(n, dtype=np.int64)
    order = np.empty(n, dtype=np.int64)
    n_sel = 0
    saturated = False
    while heap:
        negg, i = heapq.heappop(heap)
        if stamp[i] == n_sel:
            if negg == 0:
                heapq.heappush(heap, (negg, i))
                saturated = True
                break
            order[n_sel] = i
            kern.or_into(covered, bits[i])
            n_sel += 1
        else:
            stamp[i] = n_sel
            heapq.heappush(heap, (-kern.marginal_gain(bits[i], covered), i))
    if saturated:
        rem = np.sort(np.array([i for _, i in heap], dtype=np.int64))
        order[n_sel:] = rem[_ctm_order(counts[rem])]
    return PrioritizationOutcome(Permutation.from_order(order), n_sel, "cam")


def random_permutation(n, seed):
    """Uniform random order from a seeded generator (PCG64)."""
    if n < 1:
        raise ValueError("need at least one test")
    order = np.random.default_rng(seed).permutation(n)
    return PrioritizationOutcome(Permutation.from_order(order), n, "random")
