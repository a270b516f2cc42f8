"""Test prioritization for DNN test suites: impurity scores, neuron coverage,
greedy coverage orders, and APFD evaluation."""

from ._kernels import BACKEND
from .coverage import (
    CoverageSignature,
    CriterionConfig,
    entity_universe,
    load_signatures,
    save_signatures,
    signature,
    signatures,
    suite_coverage_rate,
)
from .evaluate import (
    EvalReport,
    EvaluationError,
    apfd,
    detection_curve,
    tests_to_max_coverage,
    write_report,
)
from .gini import GiniScores, gini_score, prioritize_by_gini, save_scores_csv
from .mlp import MlpModel, SynthExperiment, forward, load_model, save_model, synth_experiment
from .model import (
    ActivationTrace,
    FormatError,
    LabelVector,
    LayerMap,
    MisclassificationMask,
    NeuronProfile,
    Permutation,
    ProbabilityMatrix,
    compute_misclassification_mask,
    load_labels,
    load_matrix,
    load_network_meta,
    profile_neurons,
    save_labels,
    save_matrix,
    save_network_meta,
)
from .pipeline import DEFAULT_CRITERIA, compare_methods
from .prioritize import PrioritizationOutcome, cam, ctm, pack_signatures, random_permutation

__version__ = "0.1.0"

__all__ = [
    "ActivationTrace",
    "BACKEND",
    "CoverageSignature",
    "CriterionConfig",
    "DEFAULT_CRITERIA",
    "EvalReport",
    "EvaluationError",
    "FormatError",
    "GiniScores",
    "LabelVector",
    "LayerMap",
    "MisclassificationMask",
    "MlpModel",
    "NeuronProfile",
    "Permutation",
    "PrioritizationOutcome",
    "ProbabilityMatrix",
    "SynthExperiment",
    "apfd",
    "cam",
    "compare_methods",
    "compute_misclassification_mask",
    "ctm",
    "detection_curve",
    "entity_universe",
    "forward",
    "gini_score",
    "load_labels",
    "load_matrix",
    "load_model",
    "load_network_meta",
    "load_signatures",
    "pack_signatures",
    "prioritize_by_gini",
    "profile_neurons",
    "random_permutation",
    "save_labels",
    "save_matrix",
    "save_model",
    "save_network_meta",
    "save_scores_csv",
    "save_signatures",
    "signature",
    "signatures",
    "suite_coverage_rate",
    "synth_experiment",
    "tests_to_max_coverage",
    "write_report",
]
