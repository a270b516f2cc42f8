import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

import ginirank as gr
from reference import ref_centered_sum, ref_gini_row


def _prob_rows(n_classes, max_rows=8):
    raw = hnp.arrays(
        np.float64,
        st.tuples(st.integers(1, max_rows), st.just(n_classes)),
        elements=st.floats(1e-6, 1.0),
    )
    return raw.map(lambda a: a / a.sum(axis=1, keepdims=True))


class TestScore:
    def test_worked_example_values(self, table_probs):
        scores = gr.gini_score(table_probs).scores
        assert np.abs(scores - [0.62, 0.34, 0.54, 0.64]).max() < 1e-12

    def test_one_hot_scores_zero(self):
        pm = gr.ProbabilityMatrix.from_values(np.eye(5))
        assert np.all(gr.gini_score(pm).scores <= 1e-15)

    def test_uniform_scores_exact_max(self):
        for n in (2, 3, 7, 10, 64, 1000):
            pm = gr.ProbabilityMatrix.from_values(np.full((1, n), 1.0 / n))
            assert gr.gini_score(pm).scores[0] == 1.0 - 1.0 / n

    def test_matches_direct_formula(self, rng):
        values = rng.dirichlet(np.ones(8), size=200)
        pm = gr.ProbabilityMatrix.from_values(values)
        scores = gr.gini_score(pm).scores
        for i in range(200):
            assert scores[i] == pytest.approx(ref_gini_row(pm.values[i]), abs=1e-12)

    def test_range(self, rng):
        for n_classes in (2, 5, 31):
            values = rng.dirichlet(np.full(n_classes, 0.3), size=300)
            pm = gr.ProbabilityMatrix.from_values(values)
            scores = gr.gini_score(pm).scores
            assert np.all(scores >= 0.0)
            assert np.all(scores <= 1.0 - 1.0 / n_classes)

    def test_class_permutation_invariant(self, rng):
        values = rng.dirichlet(np.ones(6), size=40)
        pm = gr.ProbabilityMatrix.from_values(values)
        shuffled = gr.ProbabilityMatrix.from_values(values[:, rng.permutation(6)])
        assert np.allclose(
            gr.gini_score(pm).scores, gr.gini_score(shuffled).scores, atol=1e-15
        )

    @given(_prob_rows(5))
    def test_identity_property(self, values):
        pm = gr.ProbabilityMatrix.from_values(values)
        scores = gr.gini_score(pm).scores
        for i in range(pm.n_tests):
            lhs = (1.0 - 1.0 / 5) - scores[i]
            assert lhs == pytest.approx(ref_centered_sum(pm.values[i], 5), abs=1e-12)


class TestOrder:
    def test_worked_example_order(self, table_probs):
        # scores 0.62, 0.34, 0.54, 0.64 -> D, A, C, B
        perm = gr.prioritize_by_gini(table_probs)
        assert perm.order.tolist() == [3, 0, 2, 1]

    def test_descending_scores(self, rng):
        values = rng.dirichlet(np.ones(4), size=100)
        pm = gr.ProbabilityMatrix.from_values(values)
        scores = gr.gini_score(pm).scores
        ordered = scores[gr.prioritize_by_gini(pm).order]
        assert np.all(np.diff(ordered) <= 0)

    def test_ties_keep_input_order(self):
        pm = gr.ProbabilityMatrix.from_values(
            [[0.5, 0.5], [0.9, 0.1], [0.5, 0.5], [0.1, 0.9]]
        )
        perm = gr.prioritize_by_gini(pm)
        # rows 0 and 2 tie at the max, rows 1 and 3 tie below
        assert perm.order.tolist() == [0, 2, 1, 3]

    def test_same_order_as_ascending_sum_of_squares(self, rng):
        values = rng.dirichlet(np.ones(5), size=60)
        values[10] = values[3]  # force duplicates
        values[40] = values[3]
        pm = gr.ProbabilityMatrix.from_values(values)
        sq = np.einsum("ij,ij->i", pm.values, pm.values)
        expect = np.argsort(sq, kind="stable")
        assert np.array_equal(gr.prioritize_by_gini(pm).order, expect)


class TestScoresCsv:
    def test_round_trip_text(self, tmp_path, table_probs):
        path = tmp_path / "scores.csv"
        gr.save_scores_csv(path, gr.gini_score(table_probs))
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "test_index,score"
        parsed = [line.split(",") for line in lines[1:]]
        assert [int(r[0]) for r in parsed] == [0, 1, 2, 3]
        back = np.array([float(r[1]) for r in parsed])
        assert np.array_equal(back, gr.gini_score(table_probs).scores)
