"""Prioritization quality: APFD, detection curves, coverage saturation depth.

APFD (average percentage of faults detected) for an order over n tests with
k > 0 misclassified ones at 1-based ranks o_1..o_k is

    APFD = 1 - (o_1 + ... + o_k) / (k * n) + 1 / (2 * n)

computed here with exact integer rank sums before the float division.
"""

import json
from dataclasses import dataclass

import numpy as np

from .model import FormatError
from .prioritize import pack_signatures
from . import _kernels


class EvaluationError(RuntimeError):
    """Evaluation is undefined for this input (e.g. nothing is misclassified)."""


@dataclass(frozen=True, eq=False)
class EvalReport:
    """One prioritization method's outcome on one suite."""

    method: str
    apfd: float
    saturation_index: int
    wall_time_s: float
    curve: np.ndarray


def _ranks(perm, mask):
    if perm.n_tests != mask.n_tests:
        raise FormatError(
            f"permutation covers {perm.n_tests} tests, mask has {mask.n_tests}"
        )
    pos = np.empty(perm.n_tests, dtype=np.int64)
    pos[perm.order] = np.arange(1, perm.n_tests + 1)
    return pos[mask.flags]


def apfd(perm, mask):
    """APFD of an execution order; raises EvaluationError when no test misclassifies."""
    k = mask.k
    if k == 0:
        raise EvaluationError("no misclassified tests: APFD is undefined")
    n = perm.n_tests
    rank_sum = int(_ranks(perm, mask).sum())
    return 1.0 - rank_sum / (k * n) + 1.0 / (2 * n)


def detection_curve(perm, mask):
    """Points (tests run, faults found): shape (n+1, 2) int64, from (0,0) to (n,k)."""
    found = np.cumsum(mask.flags[perm.order], dtype=np.int64)
    n = perm.n_tests
    curve = np.empty((n + 1, 2), dtype=np.int64)
    curve[:, 0] = np.arange(n + 1)
    curve[0, 1] = 0
    curve[1:, 1] = found
    return curve


def tests_to_max_coverage(sigs, perm):
    """Minimal prefix of the order that reaches the whole suite's coverage."""
    if perm.n_tests != len(sigs):
        raise FormatError(f"permutation covers {perm.n_tests} tests, suite has {len(sigs)}")
    bits = pack_signatures(sigs)
    target = _kernels.popcount_vec(np.bitwise_or.reduce(bits, axis=0))
    if target == 0:
        return 0
    covered = np.zeros(bits.shape[1], dtype=np.uint64)
    have = 0
    for r, i in enumerate(perm.order):
        gain = _kernels.marginal_gain(bits[i], covered)
        if gain:
            _kernels.or_into(covered, bits[i])
            have += gain
            if have == target:
                return r + 1
    raise AssertionError("unreachable: union not reached after full walk")


def write_report(out_dir, reports, n_tests, n_faults):
    """Write report.json plus one curve_<method>.csv per method into out_dir."""
    import os

    os.makedirs(out_dir, exist_ok=True)
    entries = []
    for rep in reports:
        curve_name = f"curve_{rep.method}.csv"
        with open(os.path.join(out_dir, curve_name), "w") as fh:
            fh.write("tests_run,faults_found\n")
            for x, y in rep.curve:
                fh.write(f"{x},{y}\n")
        entries.append(
            {
                "method": rep.method,
                "apfd": rep.apfd,
                "saturation_index": rep.saturation_index,
                "wall_time_s": rep.wall_time_s,
                "curve_csv": curve_name,
            }
        )
    doc = {"n_tests": n_tests, "n_faults": n_faults, "methods": entries}
    path = os.path.join(out_dir, "report.json")
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    return path
