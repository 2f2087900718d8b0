import csv
import json

import numpy as np
import pytest

from ebpc.cli import main
from ebpc.corpus import CorpusManifest, ManifestEntry, save_manifest, store_tensor, TensorRecord

from synthetic import band_tensor, blob_tensor


@pytest.fixture
def corpus_dir(tmp_path):
    tensors = [
        band_tensor(m=8, network="netA", layer="conv1"),
        band_tensor(m=16, network="netA", layer="conv1"),
        band_tensor(m=32, network="netA", layer="conv1"),
        blob_tensor(m=16, network="netA", layer="conv2"),
    ]
    entries = []
    for i, t in enumerate(tensors):
        path = tmp_path / f"t{i}.tnsr"
        store_tensor(t, path)
        entries.append(ManifestEntry(path=path, network=t.network, layer=t.layer, m=t.m))
    save_manifest(CorpusManifest(entries), tmp_path / "manifest.json")
    return tmp_path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestCompressDecompress:
    def test_round_trip_byte_exact(self, tmp_path, capsys):
        t = blob_tensor(m=16, batches=2, channels=3, height=10, width=10)
        src = tmp_path / "in.tnsr"
        store_tensor(t, src)
        code, out, _ = run(capsys, "compress", src, tmp_path / "c.ebpc")
        assert code == 0
        summary = json.loads(out)
        assert summary["elementCount"] == t.element_count
        assert summary["ratio"] > 1

        dims = ",".join(str(d) for d in t.dims)
        code, out, _ = run(
            capsys, "decompress", tmp_path / "c.ebpc", tmp_path / "out.tnsr",
            "--dims", dims, "--layout", "nchw",
        )
        assert code == 0
        assert (tmp_path / "out.tnsr").read_bytes() == src.read_bytes()

    @pytest.mark.parametrize("method", ["zvc", "zero-rle", "bpc"])
    def test_baseline_methods_round_trip(self, tmp_path, capsys, method):
        t = band_tensor(m=16)
        src = tmp_path / "in.tnsr"
        store_tensor(t, src)
        code, out, _ = run(capsys, "compress", src, tmp_path / "c.bin",
                           "--method", method)
        assert code == 0
        dims = ",".join(str(d) for d in t.dims)
        code, _, _ = run(capsys, "decompress", tmp_path / "c.bin",
                         tmp_path / "out.tnsr", "--dims", dims)
        assert code == 0
        assert (tmp_path / "out.tnsr").read_bytes() == src.read_bytes()

    def test_all_zero_tensor_reports_ten_payload_bits(self, tmp_path, capsys):
        t = TensorRecord(dims=(1, 1, 1, 32), layout="NCHW", m=16,
                         data=np.zeros(32, dtype=np.uint16))
        store_tensor(t, tmp_path / "z.tnsr")
        code, out, _ = run(capsys, "compress", tmp_path / "z.tnsr",
                           tmp_path / "z.ebpc", "--max-burst-log", 4)
        assert code == 0
        assert json.loads(out)["payloadBits"] == 10

    def test_missing_input_exits_1(self, tmp_path, capsys):
        code, out, err = run(capsys, "compress", tmp_path / "absent.tnsr",
                             tmp_path / "c.ebpc")
        assert code == 1
        assert err.strip() and not out.strip()

    def test_bad_params_exit_2(self, tmp_path, capsys):
        t = band_tensor(m=16)
        store_tensor(t, tmp_path / "in.tnsr")
        code, _, err = run(capsys, "compress", tmp_path / "in.tnsr",
                           tmp_path / "c.ebpc", "--block-size", 1)
        assert code == 2
        assert err.strip()

    def test_corrupt_payload_exits_1(self, tmp_path, capsys):
        t = blob_tensor(m=16)
        store_tensor(t, tmp_path / "in.tnsr")
        run(capsys, "compress", tmp_path / "in.tnsr", tmp_path / "c.ebpc")
        raw = bytearray((tmp_path / "c.ebpc").read_bytes())
        raw[40] ^= 0xFF  # flip payload bits
        (tmp_path / "c.ebpc").write_bytes(bytes(raw))
        code, _, err = run(capsys, "decompress", tmp_path / "c.ebpc",
                           tmp_path / "out.tnsr")
        assert code == 1
        assert err.strip()

    def test_truncated_container_exits_1(self, tmp_path, capsys):
        t = band_tensor(m=16)
        store_tensor(t, tmp_path / "in.tnsr")
        run(capsys, "compress", tmp_path / "in.tnsr", tmp_path / "c.ebpc")
        raw = (tmp_path / "c.ebpc").read_bytes()
        (tmp_path / "c.ebpc").write_bytes(raw[: len(raw) // 2])
        code, _, err = run(capsys, "decompress", tmp_path / "c.ebpc",
                           tmp_path / "out.tnsr")
        assert code == 1
        assert err.strip()

    def test_human_mode(self, tmp_path, capsys):
        t = band_tensor(m=16)
        store_tensor(t, tmp_path / "in.tnsr")
        code, out, _ = run(capsys, "--human", "compress", tmp_path / "in.tnsr",
                           tmp_path / "c.ebpc")
        assert code == 0
        assert "ratio:" in out
        with pytest.raises(json.JSONDecodeError):
            json.loads(out)


class TestAnalyze:
    def test_sparsity_single_tensor_manifest(self, tmp_path, capsys):
        t = band_tensor(m=16)
        store_tensor(t, tmp_path / "a.tnsr")
        save_manifest(
            CorpusManifest([ManifestEntry(tmp_path / "a.tnsr", "n", "l", 16)]),
            tmp_path / "m.json",
        )
        code, out, _ = run(capsys, "analyze", tmp_path / "m.json",
                           "--which", "sparsity", "--out-dir", tmp_path / "rep")
        assert code == 0
        summary = json.loads(out)
        assert summary["rows"] == 1
        with open(tmp_path / "rep" / "sparsity.csv") as f:
            rows = list(csv.DictReader(f))
        assert len(rows) == 1
        assert float(rows[0]["sparsity"]) == pytest.approx(0.375)

    def test_sweep_k_emits_table_shape(self, corpus_dir, capsys):
        code, out, _ = run(capsys, "analyze", corpus_dir / "manifest.json",
                           "--which", "sweep-k", "--out-dir", corpus_dir / "rep")
        assert code == 0
        with open(corpus_dir / "rep" / "sweep-k.csv") as f:
            rows = list(csv.DictReader(f))
        assert len(rows) == 3  # one per word width
        assert list(rows[0]) == ["m", "zvc", "max_2", "max_4", "max_8",
                                 "max_16", "max_32", "max_64"]
        doc = json.loads((corpus_dir / "rep" / "sweep-k.json").read_text())
        assert len(doc["table"]) == 3
        assert len(doc["table"][0]["zero_rle"]) == 6

    def test_total_grid(self, corpus_dir, capsys):
        code, out, _ = run(capsys, "analyze", corpus_dir / "manifest.json",
                           "--which", "total", "--out-dir", corpus_dir / "rep")
        assert code == 0
        doc = json.loads((corpus_dir / "rep" / "total.json").read_text())
        methods = {a["method"] for a in doc["aggregates"]}
        widths = {a["m"] for a in doc["aggregates"]}
        assert methods == {"ebpc", "zvc", "zero-rle", "bpc"}
        assert widths == {8, 16, 32}
        assert "warnings" in doc

    def test_sweep_n_aggregates(self, corpus_dir, capsys):
        code, out, _ = run(capsys, "analyze", corpus_dir / "manifest.json",
                           "--which", "sweep-n", "--wordwidth", 16,
                           "--n-set", "8,16", "--out-dir", corpus_dir / "rep")
        assert code == 0
        doc = json.loads((corpus_dir / "rep" / "sweep-n.json").read_text())
        assert {a["n"] for a in doc["aggregates"]} == {8, 16}

    def test_bursts_and_hist(self, corpus_dir, capsys):
        code, _, _ = run(capsys, "analyze", corpus_dir / "manifest.json",
                         "--which", "bursts", "--layout", "all",
                         "--out-dir", corpus_dir / "rep")
        assert code == 0
        with open(corpus_dir / "rep" / "bursts.csv") as f:
            rows = list(csv.DictReader(f))
        assert {r["layout"] for r in rows} == {"NCHW", "NHWC", "CHWN", "HWCN"}

        code, _, _ = run(capsys, "analyze", corpus_dir / "manifest.json",
                         "--which", "hist", "--bins", "16",
                         "--out-dir", corpus_dir / "rep")
        assert code == 0
        with open(corpus_dir / "rep" / "hist.csv") as f:
            rows = list(csv.DictReader(f))
        t_rows = [r for r in rows if r["layer"] == "conv2"]
        assert len(t_rows) == 17  # zero row + 16 bins
        total = sum(int(r["count"]) for r in t_rows if r["bin"] != "zero")
        assert total == blob_tensor(m=16).element_count

    def test_deterministic_outputs(self, corpus_dir, capsys):
        for d in ("rep1", "rep2"):
            code, _, _ = run(capsys, "analyze", corpus_dir / "manifest.json",
                             "--which", "total", "--out-dir", corpus_dir / d)
            assert code == 0
        a = (corpus_dir / "rep1" / "total.json").read_text()
        b = (corpus_dir / "rep2" / "total.json").read_text()
        assert a == b

    def test_parallel_jobs_match_serial(self, corpus_dir, capsys):
        run(capsys, "analyze", corpus_dir / "manifest.json", "--which", "total",
            "--out-dir", corpus_dir / "serial")
        run(capsys, "analyze", corpus_dir / "manifest.json", "--which", "total",
            "--out-dir", corpus_dir / "parallel", "--jobs", 2)
        assert (
            (corpus_dir / "serial" / "total.json").read_text()
            == (corpus_dir / "parallel" / "total.json").read_text()
        )

    def test_csv_only_format(self, corpus_dir, capsys):
        code, _, _ = run(capsys, "analyze", corpus_dir / "manifest.json",
                         "--which", "sparsity", "--format", "csv",
                         "--out-dir", corpus_dir / "csvonly")
        assert code == 0
        assert (corpus_dir / "csvonly" / "sparsity.csv").exists()
        assert not (corpus_dir / "csvonly" / "sparsity.json").exists()

    def test_bad_manifest_exits_1(self, tmp_path, capsys):
        (tmp_path / "m.json").write_text("{not json")
        code, _, err = run(capsys, "analyze", tmp_path / "m.json",
                           "--which", "sparsity", "--out-dir", tmp_path)
        assert code == 1
        assert err.strip()
