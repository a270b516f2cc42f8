"""Gini-impurity scoring of probability rows and the ranking it induces.

A row's score is 1 - sum(p_i^2): zero when the model is certain (one-hot),
maximal at 1 - 1/N when all N classes are equally likely. Higher score means
the model is less sure about the test, so tests are executed in descending
score order.

Numerically the score is evaluated in the centered form

    score(p) = (1 - 1/N) - sum((p_i - 1/N)^2)

which is identical to 1 - sum(p_i^2) for rows summing to one, but anchors the
uniform row at exactly 1 - 1/N (the direct form drifts by one ulp for some N).
Tiny negative results at the one-hot corner (~2e-16) are clamped to zero so
the 0 <= score <= 1 - 1/N range always holds.

Scoring is a pure per-row function of the matrix: rows may be scored in any
order or in parallel with identical results.
"""

from dataclasses import dataclass

import numpy as np

from .model import Permutation, _readonly


@dataclass(frozen=True, eq=False)
class GiniScores:
    """Per-test impurity scores for a probability matrix with n_classes columns."""

    scores: np.ndarray
    n_classes: int

    @property
    def n_tests(self):
        return self.scores.size


def gini_score(probs):
    """Score every row of a ProbabilityMatrix; float64 throughout."""
    p = probs.values
    n_classes = probs.n_classes
    center = 1.0 / n_classes
    dev = p - center
    scores = (1.0 - center) - np.einsum("ij,ij->i", dev, dev)
    np.maximum(scores, 0.0, out=scores)
    return GiniScores(_readonly(scores), n_classes)


def prioritize_by_gini(probs):
    """Descending-score execution order; equal scores keep input order."""
    scores = gini_score(probs).scores
    order = np.argsort(-scores, kind="stable")
    return Permutation.from_order(order)


def save_scores_csv(path, scores):
    """Write scores as CSV: header test_index,score, one row per test."""
    with open(path, "w") as fh:
        fh.write("test_index,score\n")
        for i, s in enumerate(scores.scores):
            fh.write(f"{i},{s:.17g}\n")
