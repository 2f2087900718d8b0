import csv
import json
import random

import numpy as np
import pytest

from ebpc.analysis import (
    Aggregate,
    ReportRow,
    aggregate_rows,
    burst_cdf,
    burst_sweep_table,
    measure,
    sparsity,
    sweep_block_size,
    sweep_max_burst,
    tensor_ratio_rows,
    total_compression,
    total_compression_warnings,
    value_histogram,
    write_report_json,
    write_rows_csv,
)
from ebpc.corpus import TensorRecord

from synthetic import band_tensor, blob_tensor, noisy_band_tensor, random_tensor


def vec_record(values, m=8):
    dtype = {2: np.uint8, 8: np.uint8, 16: np.uint16, 32: np.uint32}[m]
    return TensorRecord(dims=(1, 1, 1, len(values)), layout="NCHW", m=m,
                        data=np.asarray(values, dtype=dtype))


class TestSparsity:
    def test_half_zero(self):
        assert sparsity(vec_record([0, 0, 1, 2])) == 0.5

    def test_all_zero(self):
        assert sparsity(vec_record([0, 0, 0])) == 1.0

    def test_against_direct_count(self):
        t = random_tensor(m=16, dims=(1, 3, 9, 7), sparsity=0.6, seed=2)
        direct = sum(1 for v in t.data.tolist() if v == 0) / t.element_count
        assert sparsity(t) == direct


class TestBurstCdf:
    def test_hand_counted_example(self):
        cdf = burst_cdf(vec_record([0, 0, 1, 0]))
        assert cdf.zero == {1: 0.5, 2: 1.0}
        assert cdf.nonzero == {1: 1.0}

    def test_dense_tensor(self):
        cdf = burst_cdf(vec_record([3, 4, 5, 6]))
        assert cdf.zero == {}
        assert cdf.nonzero == {4: 1.0}

    def test_monotone_and_normalized(self):
        for seed in range(5):
            t = random_tensor(m=8, dims=(1, 2, 6, 6), sparsity=0.5, seed=seed)
            cdf = burst_cdf(t)
            for table in (cdf.zero, cdf.nonzero):
                probs = [table[l] for l in sorted(table)]
                assert all(a < b for a, b in zip(probs, probs[1:])) or len(probs) <= 1
                if probs:
                    assert probs[-1] == pytest.approx(1.0)


class TestValueHistogram:
    def test_hand_binned_example(self):
        # four equal-width bins over the word range, values in bins 0, 0, 1, 2
        t = vec_record([0, 0, 64, 128], m=8)
        h = value_histogram(t, bin_count=4)
        assert h.counts == (2, 1, 1, 0)
        assert h.zero_count == 2

    def test_all_zero_mass_in_first_bin(self):
        h = value_histogram(vec_record([0] * 9), bin_count=4)
        assert h.counts == (9, 0, 0, 0)
        assert h.zero_count == 9

    def test_counts_sum_to_element_count(self):
        t = random_tensor(m=16, dims=(2, 3, 4, 5), sparsity=0.3, seed=4)
        h = value_histogram(t, bin_count=64)
        assert sum(h.counts) == t.element_count

    def test_zero_bins_rejected(self):
        with pytest.raises(ValueError):
            value_histogram(vec_record([0]), bin_count=0)


class TestMeasure:
    def test_rejects_unknown_method(self):
        with pytest.raises(ValueError):
            measure([1, 2], "gzip", 8)

    def test_uncompressed_bits(self):
        unc, comp = measure([0, 0, 7, 7], "ebpc", 8, n=4, k=2)
        assert unc == 4 * 8 and comp > 0


class TestSweepBlockSize:
    def test_constant_tensor_ratio_grows_with_n(self):
        t = vec_record([777] * 128, m=16)
        rows, aggs = sweep_block_size([t], m=16, k=4, n_set=[4, 8, 16, 32])
        ratios = {a.key["n"]: a.ratio for a in aggs}
        assert ratios[4] < ratios[8] < ratios[16] < ratios[32]

    def test_rows_per_tensor_per_n(self):
        corpus = [band_tensor(m=16), blob_tensor(m=16)]
        rows, aggs = sweep_block_size(corpus, m=16, k=4, n_set=[8, 16])
        assert len(rows) == 4
        assert len(aggs) == 2

    def test_filters_other_widths(self):
        rows, aggs = sweep_block_size([band_tensor(m=8)], m=16, k=4, n_set=[8])
        assert rows == [] and aggs == []


class TestSweepMaxBurst:
    def test_table_shape(self):
        corpus = [band_tensor(m=8), band_tensor(m=16), band_tensor(m=32)]
        table, rows = sweep_max_burst(corpus, [8, 16, 32], [1, 2, 3, 4, 5, 6])
        assert len(table) == 3
        for entry in table:
            assert set(entry) == {"m", "zvc", "zero_rle"}
            assert sorted(entry["zero_rle"]) == [1, 2, 3, 4, 5, 6]

    def test_all_zero_tensor_ratio_strictly_grows_with_k(self):
        t = vec_record([0] * 4096, m=16)
        table, _ = sweep_max_burst([t], [16], [1, 2, 3, 4, 5, 6])
        ratios = [table[0]["zero_rle"][k] for k in (1, 2, 3, 4, 5, 6)]
        assert all(a < b for a, b in zip(ratios, ratios[1:]))

    def test_dense_tensor_zvc_ratio_matches_mask_overhead_formula(self):
        values = list(range(1, 65))
        t = vec_record(values, m=8)
        table, _ = sweep_max_burst([t], [8], [1])
        expected = 64 * 8 / (64 + 64 * 8)
        assert table[0]["zvc"] == pytest.approx(expected)
        assert table[0]["zvc"] < 1


class TestTotalCompression:
    def test_smooth_sparse_corpus_ordering(self):
        corpus = [band_tensor(m=16), blob_tensor(m=16)]
        rows, aggs, warnings = total_compression(corpus, dtypes=(16,))
        ratios = {a.key["method"]: a.ratio for a in aggs}
        assert ratios["ebpc"] > ratios["zvc"]
        assert ratios["ebpc"] > ratios["zero-rle"]
        assert ratios["ebpc"] > ratios["bpc"]

    def test_aggregates_are_ratios_of_sums(self):
        corpus = [blob_tensor(m=16, seed=1), blob_tensor(m=16, seed=2)]
        rows, aggs, _ = total_compression(corpus, methods=("zvc",), dtypes=(16,))
        unc = sum(r.uncompressed_bits for r in rows)
        comp = sum(r.compressed_bits for r in rows)
        assert aggs[0].ratio == unc / comp

    def test_shard_order_invariance(self):
        corpus = [blob_tensor(m=16, seed=s) for s in range(4)]
        _, fwd, _ = total_compression(corpus, methods=("ebpc",), dtypes=(16,))
        _, rev, _ = total_compression(corpus[::-1], methods=("ebpc",), dtypes=(16,))
        assert [a.to_dict() for a in fwd] == [a.to_dict() for a in rev]

    def test_width_ordering_warning_fires_when_inverted(self):
        # dense noise at m=8 compresses worse than a half-zero tensor at m=16
        bad8 = random_tensor(m=8, dims=(1, 1, 8, 8), sparsity=0.0, seed=5,
                             network="net", layer="l")
        good16 = random_tensor(m=16, dims=(1, 1, 8, 8), sparsity=0.9, seed=6,
                               network="net", layer="l")
        _, _, warnings = total_compression([bad8, good16], methods=("zvc",),
                                           dtypes=(8, 16))
        assert warnings and "m=8" in warnings[0]

    def test_width_ordering_clean_when_extra_bits_are_noise(self):
        corpus = [noisy_band_tensor(m) for m in (8, 16, 32)]
        _, aggs, warnings = total_compression(corpus, methods=("ebpc",))
        ratios = {a.key["m"]: a.ratio for a in aggs}
        assert ratios[8] >= ratios[16] >= ratios[32]
        assert warnings == []


class TestReports:
    def test_csv_schema(self, tmp_path):
        rows = tensor_ratio_rows(band_tensor(m=16))
        path = tmp_path / "rows.csv"
        write_rows_csv(rows, path)
        with open(path) as f:
            got = list(csv.DictReader(f))
        assert list(got[0]) == ["network", "layer", "method", "m", "n", "k",
                                "layout", "uncompressedBits", "compressedBits",
                                "ratio"]
        assert len(got) == len(rows)
        zvc_row = next(r for r in got if r["method"] == "zvc")
        assert zvc_row["n"] == "" and zvc_row["k"] == ""

    def test_json_report(self, tmp_path):
        rows = tensor_ratio_rows(blob_tensor(m=16), methods=("ebpc",))
        aggs = aggregate_rows(rows, ("method", "m"))
        path = tmp_path / "report.json"
        write_report_json(path, rows=rows, aggregates=aggs, warnings=[])
        doc = json.loads(path.read_text())
        assert doc["headerBytes"] == {"containerBytes": 28, "tensorBytes": 24}
        assert doc["rows"][0]["method"] == "ebpc"
        assert doc["aggregates"][0]["ratio"] > 0
        assert doc["warnings"] == []

    def test_burst_sweep_table_from_rows(self):
        corpus = [band_tensor(m=8)]
        table, rows = sweep_max_burst(corpus, [8], [1, 4])
        rebuilt = burst_sweep_table(rows, [8], [1, 4])
        assert rebuilt == table
