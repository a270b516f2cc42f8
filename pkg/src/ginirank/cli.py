"""Command line interface.

Subcommands: score, coverage, prioritize, evaluate, synth, compare.

Exit codes: 0 success, 1 invalid configuration (bad flags, bad criterion
strings), 2 unreadable or malformed files, 3 evaluation errors (e.g. nothing
is misclassified so APFD is undefined).

Outputs are deterministic for identical inputs, with one documented
exception: the wall_time_s fields in compare's report.json measure the
machine, not the data.
"""

import argparse
import json
import os
import sys

from . import _kernels
from .coverage import CriterionConfig, signatures, suite_coverage_rate
from .coverage import load_signatures, save_signatures
from .evaluate import EvaluationError, apfd, detection_curve, tests_to_max_coverage, write_report
from .gini import gini_score, prioritize_by_gini, save_scores_csv
from .mlp import forward, save_model, synth_experiment
from .model import (
    ActivationTrace,
    FormatError,
    ProbabilityMatrix,
    compute_misclassification_mask,
    load_labels,
    load_matrix,
    load_network_meta,
    load_permutation,
    profile_neurons,
    save_labels,
    save_matrix,
    save_network_meta,
    save_permutation,
)
from .pipeline import DEFAULT_CRITERIA, compare_methods
from .prioritize import cam, ctm, random_permutation


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; here 2 means file/format, so
    # remap configuration problems to exit code 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(1)


def _load_probs(path):
    return ProbabilityMatrix.from_values(load_matrix(path))


def _load_trace(path):
    return ActivationTrace.from_values(load_matrix(path))


def _sidecar_path(csv_path):
    stem, ext = os.path.splitext(csv_path)
    return (stem if ext == ".csv" else csv_path) + ".json"


def _write_outcome(out_path, perm, method, saturation_index):
    save_permutation(out_path, perm)
    with open(_sidecar_path(out_path), "w") as fh:
        json.dump({"method": method, "saturation_index": saturation_index}, fh, indent=2)
        fh.write("\n")


def _cmd_score(args):
    probs = _load_probs(args.probs)
    scores = gini_score(probs)
    if args.out:
        save_scores_csv(args.out, scores)
    else:
        sys.stdout.write("test_index,score\n")
        for i, s in enumerate(scores.scores):
            sys.stdout.write(f"{i},{s:.17g}\n")
    return 0


def _cmd_coverage(args):
    trace = _load_trace(args.trace)
    config = CriterionConfig.parse(args.criterion)
    layer_map = profile = None
    if args.profile:
        layer_map, profile = load_network_meta(args.profile)
    sigs = signatures(config, trace, profile, layer_map)
    save_signatures(args.out, sigs)
    rate = suite_coverage_rate(sigs)
    print(f"{config.tag}: {len(sigs)} tests, universe {sigs[0].universe_size}, "
          f"suite coverage {rate:.6f}")
    return 0


def _cmd_prioritize(args):
    method = args.method
    if method == "gini":
        if not args.probs:
            raise ValueError("--method gini needs --probs")
        probs = _load_probs(args.probs)
        perm = prioritize_by_gini(probs)
        _write_outcome(args.out, perm, "gini", probs.n_tests)
        return 0
    if method in ("ctm", "cam"):
        if not args.signatures:
            raise ValueError(f"--method {method} needs --signatures")
        sigs = load_signatures(args.signatures)
        out = ctm(sigs, args.tie_seed) if method == "ctm" else cam(sigs)
        _write_outcome(args.out, out.order, method, out.saturation_index)
        return 0
    # random
    if args.n_tests:
        n = args.n_tests
    elif args.signatures:
        n = len(load_signatures(args.signatures))
    elif args.probs:
        n = _load_probs(args.probs).n_tests
    else:
        raise ValueError("--method random needs --n-tests, --signatures, or --probs")
    out = random_permutation(n, args.seed)
    _write_outcome(args.out, out.order, "random", out.saturation_index)
    return 0


def _cmd_evaluate(args):
    perm = load_permutation(args.perm)
    probs = _load_probs(args.probs)
    labels = load_labels(args.labels)
    mask = compute_misclassification_mask(probs, labels)
    value = apfd(perm, mask)
    print(f"apfd {value:.12g}")
    print(f"misclassified {mask.k} of {mask.n_tests}")
    if args.curve:
        curve = detection_curve(perm, mask)
        with open(args.curve, "w") as fh:
            fh.write("tests_run,faults_found\n")
            for x, y in curve:
                fh.write(f"{x},{y}\n")
    if args.signatures:
        sigs = load_signatures(args.signatures)
        print(f"tests_to_max_coverage {tests_to_max_coverage(sigs, perm)}")
    return 0


def _cmd_synth(args):
    dims = tuple(int(d) for d in args.dims.split(","))
    exp = synth_experiment(args.seed, args.n_tests, dims, args.noise_scale, args.n_train)
    probs, trace, layer_map = forward(exp.subject, exp.inputs)
    _, train_trace, _ = forward(exp.subject, exp.train_inputs)
    profile = profile_neurons(train_trace)
    os.makedirs(args.out, exist_ok=True)
    save_matrix(os.path.join(args.out, "probabilities.dgm1"), probs)
    save_matrix(os.path.join(args.out, "trace.dgm1"), trace)
    save_network_meta(os.path.join(args.out, "meta.json"), layer_map, profile)
    save_labels(os.path.join(args.out, "labels.txt"), exp.labels)
    save_model(os.path.join(args.out, "teacher.json"), exp.teacher)
    save_model(os.path.join(args.out, "subject.json"), exp.subject)
    mask = compute_misclassification_mask(probs, exp.labels)
    print(f"wrote {args.out}: {probs.n_tests} tests, {probs.n_classes} classes, "
          f"{mask.k} misclassified ({100.0 * mask.k / mask.n_tests:.2f}%)")
    return 0


def _cmd_compare(args):
    if args.criteria:
        criteria = tuple(CriterionConfig.parse(s) for s in args.criteria.split(","))
    else:
        criteria = DEFAULT_CRITERIA
    if args.synth:
        exp = synth_experiment(seed=args.synth_seed)
        probs, trace, layer_map = forward(exp.subject, exp.inputs)
        _, train_trace, _ = forward(exp.subject, exp.train_inputs)
        profile = profile_neurons(train_trace)
        labels = exp.labels
    else:
        for name in ("probs", "labels", "trace", "profile"):
            if not getattr(args, name):
                raise ValueError(f"compare needs --{name} (or --synth)")
        probs = _load_probs(args.probs)
        labels = load_labels(args.labels)
        trace = _load_trace(args.trace)
        layer_map, profile = load_network_meta(args.profile)
    reports = compare_methods(probs, labels, trace, profile, layer_map,
                              criteria, args.seed)
    mask = compute_misclassification_mask(probs, labels)
    path = write_report(args.out, reports, probs.n_tests, mask.k)
    width = max(len(r.method) for r in reports)
    for r in reports:
        print(f"{r.method:<{width}}  apfd {r.apfd:.6f}  saturation {r.saturation_index}")
    print(f"report: {path}")
    return 0


def build_parser():
    parser = _Parser(prog="ginirank",
                     description="Prioritize DNN test suites and evaluate the orders.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s 0.1.0 (kernels: {_kernels.BACKEND})")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("score", help="impurity score per test from a probability matrix")
    p.add_argument("--probs", required=True, help="probability matrix (.dgm1 or .csv)")
    p.add_argument("-o", "--out", help="scores CSV (default: stdout)")
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("coverage", help="build per-test coverage signatures")
    p.add_argument("--trace", required=True, help="activation trace (.dgm1 or .csv)")
    p.add_argument("--criterion", required=True,
                   help="KIND:param, e.g. NAC:0.75 KMNC:1000 NBC:0.5 SNAC:1 TKNC:2")
    p.add_argument("--profile",
                   help="network metadata JSON (neuron profile for KMNC/NBC/SNAC, "
                        "layer map for TKNC)")
    p.add_argument("-o", "--out", required=True, help="signature file (.dgs1)")
    p.set_defaults(func=_cmd_coverage)

    p = sub.add_parser("prioritize", help="produce an execution order")
    p.add_argument("--method", required=True, choices=("gini", "ctm", "cam", "random"))
    p.add_argument("--probs", help="probability matrix (gini, or random for its size)")
    p.add_argument("--signatures", help="signature file (ctm/cam, or random for its size)")
    p.add_argument("--n-tests", type=int, help="suite size (random)")
    p.add_argument("--seed", type=int, default=0, help="random method seed (default 0)")
    p.add_argument("--tie-seed", type=int, default=None,
                   help="ctm only: shuffle equal-coverage tests reproducibly")
    p.add_argument("-o", "--out", required=True,
                   help="permutation CSV; a .json sidecar records method and saturation")
    p.set_defaults(func=_cmd_prioritize)

    p = sub.add_parser("evaluate", help="APFD of a stored order")
    p.add_argument("--perm", required=True, help="permutation CSV")
    p.add_argument("--probs", required=True, help="probability matrix")
    p.add_argument("--labels", required=True, help="ground-truth labels, one per line")
    p.add_argument("--curve", help="also write the detection curve CSV here")
    p.add_argument("--signatures",
                   help="also report tests_to_max_coverage for this signature file")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("synth", help="generate a synthetic teacher/subject workload")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--n-tests", type=int, default=5000)
    p.add_argument("--dims", default="16,32,32,10",
                   help="comma-separated widths: input,hidden...,classes")
    p.add_argument("--noise-scale", type=float, default=0.05)
    p.add_argument("--n-train", type=int, default=2000,
                   help="profiling batch size")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("compare", help="run all methods and write an APFD report")
    p.add_argument("--synth", action="store_true",
                   help="use the default synthetic workload instead of files")
    p.add_argument("--synth-seed", type=int, default=7)
    p.add_argument("--probs")
    p.add_argument("--labels")
    p.add_argument("--trace")
    p.add_argument("--profile", help="network metadata JSON (layer map + neuron profile)")
    p.add_argument("--criteria",
                   help="comma-separated criterion list (default: the full grid)")
    p.add_argument("--seed", type=int, default=0, help="random baseline seed")
    p.add_argument("--out", required=True, help="report directory")
    p.add_argument("--timing-strict", action="store_true",
                   help="run methods strictly one at a time when timing "
                        "(always the case; flag documents intent)")
    p.set_defaults(func=_cmd_compare)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EvaluationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
