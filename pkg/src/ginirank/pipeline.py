"""End-to-end comparison of prioritization methods on one suite.

Runs the impurity ranking, CTM and CAM under each requested coverage
criterion, and a seeded random baseline, then scores every order with APFD.
Per-method wall time covers prioritization only; building signatures and
loading data is shared setup and excluded.
"""

import time

from .coverage import CriterionConfig, signatures
from .evaluate import EvalReport, apfd, detection_curve
from .gini import prioritize_by_gini
from .model import compute_misclassification_mask
from .prioritize import cam, ctm, random_permutation

DEFAULT_CRITERIA = tuple(
    CriterionConfig.parse(s)
    for s in (
        "NAC:0", "NAC:0.75",
        "KMNC:1000", "KMNC:10000",
        "NBC:0", "NBC:0.5", "NBC:1",
        "SNAC:0", "SNAC:0.5", "SNAC:1",
        "TKNC:1", "TKNC:2", "TKNC:3",
    )
)


def _report(method, perm, saturation_index, mask, dt):
    return EvalReport(method, apfd(perm, mask), saturation_index, dt,
                      detection_curve(perm, mask))


def compare_methods(probs, labels, trace=None, profile=None, layer_map=None,
                    criteria=DEFAULT_CRITERIA, random_seed=0):
    """EvalReports for gini, per-criterion CTM/CAM, and a random baseline.

    Coverage methods need trace/profile/layer_map; pass criteria=() to skip
    them (then only gini and random run).
    """
    mask = compute_misclassification_mask(probs, labels)
    n = probs.n_tests
    reports = []

    t0 = time.perf_counter()
    perm = prioritize_by_gini(probs)
    reports.append(_report("gini", perm, n, mask, time.perf_counter() - t0))

    for cfg in criteria:
        sigs = signatures(cfg, trace, profile, layer_map)
        t0 = time.perf_counter()
        out = ctm(sigs)
        dt = time.perf_counter() - t0
        reports.append(_report(f"{cfg.tag}-CTM", out.order, out.saturation_index, mask, dt))
        t0 = time.perf_counter()
        out = cam(sigs)
        dt = time.perf_counter() - t0
        reports.append(_report(f"{cfg.tag}-CAM", out.order, out.saturation_index, mask, dt))

    t0 = time.perf_counter()
    out = random_permutation(n, random_seed)
    reports.append(_report("random", out.order, out.saturation_index, mask,
                           time.perf_counter() - t0))
    return reports
