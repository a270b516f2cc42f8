import numpy as np
import pytest

import ginirank as gr
from ginirank.coverage import CriterionConfig
from ginirank.model import FormatError
from reference import ref_kmnc, ref_nac, ref_nbc, ref_snac, ref_tknc


def _trace(rows):
    return gr.ActivationTrace.from_values(rows)


def _profile(low, high, std):
    return gr.NeuronProfile.from_arrays(low, high, std)


class TestCriterionConfig:
    def test_parse(self):
        cfg = CriterionConfig.parse("nac:0.75")
        assert cfg.kind == "NAC"
        assert cfg.param == 0.75
        assert cfg.tag == "NAC(0.75)"
        assert CriterionConfig.parse("KMNC:1000").tag == "KMNC(1000)"

    def test_parse_rejects_garbage(self):
        for text in ("NAC", "NAC:", "FOO:1", "KMNC:abc", "KMNC:2.5", "TKNC:0", "NBC:-1"):
            with pytest.raises(ValueError):
                CriterionConfig.parse(text)

    def test_universe_sizes(self):
        lm = gr.LayerMap.from_lists([list(range(268))])
        assert gr.entity_universe(CriterionConfig.parse("NAC:0"), 268) == 268
        assert gr.entity_universe(CriterionConfig.parse("KMNC:1000"), 268) == 268000
        assert gr.entity_universe(CriterionConfig.parse("NBC:0"), 268) == 536
        assert gr.entity_universe(CriterionConfig.parse("SNAC:1"), 268) == 268
        assert gr.entity_universe(CriterionConfig.parse("TKNC:2"), 268, lm) == 268


class TestNac:
    def test_worked_example(self):
        sig = gr.signature(CriterionConfig.parse("NAC:0.75"), [0.1, 0.8, 0.0])
        assert sig.ids.tolist() == [1]
        assert sig.rate == pytest.approx(1.0 / 3.0)

    def test_threshold_strict(self):
        sig = gr.signature(CriterionConfig.parse("NAC:0.5"), [0.5, 0.50001])
        assert sig.ids.tolist() == [1]

    def test_lowering_threshold_grows_coverage(self, rng):
        trace = _trace(rng.random((30, 12)))
        loose = gr.signatures(CriterionConfig.parse("NAC:0.2"), trace)
        tight = gr.signatures(CriterionConfig.parse("NAC:0.8"), trace)
        for lo, hi in zip(loose, tight):
            assert set(hi.ids.tolist()) <= set(lo.ids.tolist())


class TestKmnc:
    CFG = CriterionConfig.parse("KMNC:10")

    def test_worked_examples(self):
        prof = _profile([0.0], [1.0], [0.1])
        assert gr.signature(self.CFG, [0.25], prof).ids.tolist() == [2]
        assert gr.signature(self.CFG, [1.0], prof).ids.tolist() == [9]
        assert gr.signature(self.CFG, [1.2], prof).ids.tolist() == []

    def test_below_range_uncovered(self):
        prof = _profile([0.0], [1.0], [0.1])
        assert gr.signature(self.CFG, [-0.01], prof).ids.tolist() == []

    def test_zero_width_neuron(self):
        prof = _profile([0.5], [0.5], [0.0])
        assert gr.signature(self.CFG, [0.5], prof).ids.tolist() == [0]
        assert gr.signature(self.CFG, [0.6], prof).ids.tolist() == []

    def test_entity_ids_offset_per_neuron(self):
        prof = _profile([0.0, 0.0], [1.0, 1.0], [0.1, 0.1])
        sig = gr.signature(self.CFG, [0.05, 0.95], prof)
        assert sig.ids.tolist() == [0, 19]

    def test_at_most_one_section_per_neuron(self, rng):
        m = 9
        prof = _profile(np.zeros(m), np.ones(m), np.full(m, 0.1))
        trace = _trace(rng.random((40, m)) * 1.4 - 0.2)
        for sig in gr.signatures(self.CFG, trace, prof):
            assert sig.ids.size <= m
            neurons = sig.ids // 10
            assert np.unique(neurons).size == neurons.size


class TestNbc:
    CFG = CriterionConfig.parse("NBC:1")

    def test_worked_examples(self):
        prof = _profile([0.0], [1.0], [0.1])
        assert gr.signature(self.CFG, [-0.2], prof).ids.tolist() == [0]
        assert gr.signature(self.CFG, [1.05], prof).ids.tolist() == []
        assert gr.signature(self.CFG, [1.1], prof).ids.tolist() == [1]

    def test_boundaries_inclusive(self):
        prof = _profile([0.0], [1.0], [0.25])
        assert gr.signature(self.CFG, [-0.25], prof).ids.tolist() == [0]
        assert gr.signature(self.CFG, [1.25], prof).ids.tolist() == [1]

    def test_in_range_covers_nothing(self, rng):
        m = 6
        prof = _profile(np.zeros(m), np.ones(m), np.full(m, 0.2))
        trace = _trace(rng.random((25, m)))
        for sig in gr.signatures(CriterionConfig.parse("NBC:0"), trace, prof):
            assert sig.ids.size == 0


class TestSnac:
    def test_upper_half_of_nbc(self, rng):
        m = 7
        prof = _profile(np.zeros(m), np.ones(m), np.full(m, 0.15))
        trace = _trace(rng.standard_normal((40, m)) * 1.5)
        for k in (0.0, 0.5, 1.0):
            nbc = gr.signatures(CriterionConfig(kind="NBC", param=k), trace, prof)
            snac = gr.signatures(CriterionConfig(kind="SNAC", param=k), trace, prof)
            for a, b in zip(nbc, snac):
                uppers = [int(e) // 2 for e in a.ids if e % 2 == 1]
                assert b.ids.tolist() == uppers


class TestTknc:
    def test_worked_example(self):
        lm = gr.LayerMap.from_lists([[0, 1, 2, 3]])
        sig = gr.signature(CriterionConfig.parse("TKNC:2"), [0.9, 0.5, 0.5, 0.1], layer_map=lm)
        assert sig.ids.tolist() == [0, 1, 2]  # the 0.5s tie at the 2nd highest

    def test_small_layer_fully_covered(self):
        lm = gr.LayerMap.from_lists([[0, 1], [2, 3, 4]])
        sig = gr.signature(
            CriterionConfig.parse("TKNC:3"), [0.1, 0.2, 5.0, 4.0, 3.0], layer_map=lm
        )
        assert sig.ids.tolist() == [0, 1, 2, 3, 4]

    def test_exactly_k_when_distinct(self, rng):
        lm = gr.LayerMap.from_lists([[0, 1, 2, 3, 4], [5, 6, 7, 8]])
        values = rng.permutation(9)[None, :].astype(float)  # all distinct
        for k in (1, 2, 3):
            sig = gr.signatures(CriterionConfig(kind="TKNC", param=k), _trace(values), layer_map=lm)[0]
            assert sig.ids.size == 2 * k

    def test_needs_layer_map(self):
        with pytest.raises(ValueError, match="layer map"):
            gr.signature(CriterionConfig.parse("TKNC:1"), [0.1, 0.2])


class TestAgainstReference:
    def test_all_criteria_match_naive_loops(self, rng):
        n, m = 30, 11
        lm = gr.LayerMap.from_lists([[0, 1, 2, 3], [4, 5, 6], [7, 8, 9, 10]])
        train = rng.standard_normal((60, m))
        prof = gr.profile_neurons(_trace(train))
        trace_values = rng.standard_normal((n, m)) * 1.6
        trace = _trace(trace_values)
        low, high, std = prof.low, prof.high, prof.std
        layers = [ids.tolist() for ids in lm.layers]

        cases = [
            (CriterionConfig.parse("NAC:0.3"), lambda r: ref_nac(r, 0.3)),
            (CriterionConfig.parse("KMNC:7"), lambda r: ref_kmnc(r, 7, low, high)),
            (CriterionConfig.parse("NBC:0.5"), lambda r: ref_nbc(r, 0.5, low, high, std)),
            (CriterionConfig.parse("SNAC:0.5"), lambda r: ref_snac(r, 0.5, high, std)),
            (CriterionConfig.parse("TKNC:2"), lambda r: ref_tknc(r, 2, layers)),
        ]
        for cfg, ref in cases:
            sigs = gr.signatures(cfg, trace, prof, lm)
            for i in range(n):
                got = set(sigs[i].ids.tolist())
                assert got == ref(trace_values[i]), f"{cfg.tag} row {i}"

    def test_single_row_equals_batch(self, rng):
        m = 8
        prof = gr.profile_neurons(_trace(rng.standard_normal((30, m))))
        lm = gr.LayerMap.from_lists([list(range(4)), list(range(4, 8))])
        trace_values = rng.standard_normal((10, m))
        for text in ("NAC:0.1", "KMNC:5", "NBC:0.5", "SNAC:0", "TKNC:2"):
            cfg = CriterionConfig.parse(text)
            batch = gr.signatures(cfg, _trace(trace_values), prof, lm)
            for i in range(10):
                single = gr.signature(cfg, trace_values[i], prof, lm)
                assert single.ids.tolist() == batch[i].ids.tolist()


class TestSuiteRate:
    def test_worked_example(self, table_sigs):
        assert gr.suite_coverage_rate(table_sigs) == 1.0
        assert gr.suite_coverage_rate(table_sigs[1:3]) == pytest.approx(6 / 8)

    def test_universe_mismatch(self, table_sigs):
        odd = gr.CoverageSignature(9, np.array([0], dtype=np.uint32))
        with pytest.raises(ValueError, match="universe"):
            gr.suite_coverage_rate(table_sigs + [odd])


class TestSignatureIO:
    def test_round_trip(self, tmp_path, rng):
        universe = 500
        sigs = []
        for _ in range(20):
            ids = np.unique(rng.integers(0, universe, rng.integers(0, 60)))
            sigs.append(gr.CoverageSignature(universe, ids.astype(np.uint32)))
        path = tmp_path / "suite.dgs1"
        gr.save_signatures(path, sigs)
        back = gr.load_signatures(path)
        assert len(back) == 20
        assert all(b.universe_size == universe for b in back)
        for a, b in zip(sigs, back):
            assert np.array_equal(a.ids, b.ids)

    def test_empty_signature_round_trips(self, tmp_path):
        sigs = [gr.CoverageSignature(4, np.array([], dtype=np.uint32))]
        path = tmp_path / "suite.dgs1"
        gr.save_signatures(path, sigs)
        assert gr.load_signatures(path)[0].ids.size == 0

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "suite.dgs1"
        path.write_bytes(b"WHAT" + b"\x00" * 8)
        with pytest.raises(FormatError, match="not a DGS1"):
            gr.load_signatures(path)

    def test_truncated(self, tmp_path, table_sigs):
        path = tmp_path / "suite.dgs1"
        gr.save_signatures(path, table_sigs)
        path.write_bytes(path.read_bytes()[:-2])
        with pytest.raises(FormatError, match="truncated"):
            gr.load_signatures(path)

    def test_id_out_of_universe(self, tmp_path):
        import struct

        payload = b"DGS1" + struct.pack("<II", 4, 1) + struct.pack("<I", 1) + struct.pack("<I", 4)
        path = tmp_path / "suite.dgs1"
        path.write_bytes(payload)
        with pytest.raises(FormatError, match="outside universe"):
            gr.load_signatures(path)

    def test_unsorted_ids_rejected(self, tmp_path):
        import struct

        payload = (b"DGS1" + struct.pack("<II", 8, 1) + struct.pack("<I", 2)
                   + struct.pack("<II", 5, 2))
        path = tmp_path / "suite.dgs1"
        path.write_bytes(payload)
        with pytest.raises(FormatError, match="ascending"):
            gr.load_signatures(path)
