"""Command-line surface: compress/decompress tensor files and run corpus
analyses. Exit codes: 0 success, 1 I/O or data error, 2 usage error."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import analysis, baselines, codec
from .container import METHOD_TAGS, CompressedStream, HEADER_BYTES
from .corpus import (
    LAYOUTS,
    CorpusManifest,
    ManifestEntry,
    TensorRecord,
    load_manifest,
    load_tensor,
    permute_layout,
    store_tensor,
)
from .errors import CodecError

WHICH_CHOICES = ("sparsity", "bursts", "hist", "sweep-n", "sweep-k", "total")


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ebpc", description=__doc__)
    ap.add_argument("--human", action="store_true",
                    help="print summaries as text instead of JSON")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compress", help="compress a TNSR tensor file")
    c.add_argument("input")
    c.add_argument("output")
    c.add_argument("--method", choices=sorted(METHOD_TAGS), default="ebpc")
    c.add_argument("--wordwidth", type=int, choices=(8, 16, 32), default=None,
                   help="override the word width (default: from the tensor file)")
    c.add_argument("--block-size", type=int, default=16, metavar="N")
    c.add_argument("--max-burst-log", type=int, default=4, metavar="K")
    c.add_argument("--layout", choices=[l.lower() for l in LAYOUTS], default=None,
                   help="serialize in this layout before compressing "
                        "(default: the file's own layout)")

    d = sub.add_parser("decompress", help="expand a compressed container back to TNSR")
    d.add_argument("input")
    d.add_argument("output")
    d.add_argument("--dims", default=None, metavar="N,C,H,W",
                   help="tensor dimensions (default: 1,1,1,<count>)")
    d.add_argument("--layout", choices=[l.lower() for l in LAYOUTS], default="nchw")

    a = sub.add_parser("analyze", help="run corpus measurements from a manifest")
    a.add_argument("manifest")
    a.add_argument("--which", choices=WHICH_CHOICES, required=True)
    a.add_argument("--out-dir", default=".", metavar="DIR")
    a.add_argument("--format", choices=("csv", "json", "both"), default="both")
    a.add_argument("--layout", choices=[l.lower() for l in LAYOUTS] + ["all"],
                   default="nchw")
    a.add_argument("--wordwidth", type=int, choices=(8, 16, 32), default=16)
    a.add_argument("--block-size", type=int, default=16, metavar="N")
    a.add_argument("--max-burst-log", type=int, default=4, metavar="K")
    a.add_argument("--n-set", type=_int_list, default=[4, 8, 16, 32])
    a.add_argument("--k-set", type=_int_list, default=[1, 2, 3, 4, 5, 6])
    a.add_argument("--m-set", type=_int_list, default=[8, 16, 32])
    a.add_argument("--methods", default="ebpc,zvc,zero-rle,bpc",
                   help="comma-separated method list for --which total")
    a.add_argument("--dtypes", type=_int_list, default=[8, 16, 32])
    a.add_argument("--bins", type=int, default=64)
    a.add_argument("--jobs", type=int, default=1)
    return ap


def _emit(doc: dict, human: bool) -> None:
    if human:
        for key, value in doc.items():
            print(f"{key}: {value}")
    else:
        print(json.dumps(doc))


def _cmd_compress(args) -> dict:
    t = load_tensor(args.input)
    if args.layout:
        t = permute_layout(t, args.layout.upper())
    m = args.wordwidth or t.m
    method = args.method
    n = args.block_size
    k = args.max_burst_log
    if method == "ebpc":
        stream = codec.compress(t.data, codec.EbpcParams(m=m, n=n, k=k))
    elif method == "zvc":
        stream = baselines.zvc_compress(t.data, m)
    elif method == "zero-rle":
        stream = baselines.zero_rle_only_compress(t.data, m, k)
    else:
        stream = baselines.raw_bpc_compress(t.data, m, n)
    stream.write(args.output)
    return {
        "input": args.input,
        "output": args.output,
        "method": method,
        "m": stream.m,
        "n": stream.n or None,
        "k": stream.k or None,
        "elementCount": stream.element_count,
        "payloadBits": stream.payload_bits,
        "uncompressedBits": stream.element_count * m,
        "ratio": stream.element_count * m / stream.payload_bits if stream.payload_bits else None,
        "headerBytes": HEADER_BYTES,
    }


_DECODERS = {
    "ebpc": codec.decompress,
    "zvc": baselines.zvc_decompress,
    "zero-rle": baselines.zero_rle_only_decompress,
    "bpc": baselines.raw_bpc_decompress,
}


def _cmd_decompress(args) -> dict:
    stream = CompressedStream.read(args.input)
    words = _DECODERS[stream.method_name](stream)
    if args.dims:
        dims = tuple(_int_list(args.dims))
        if len(dims) != 4:
            raise ValueError(f"--dims needs four counts, got {args.dims!r}")
    else:
        dims = (1, 1, 1, len(words))
    dtype = {8: np.uint8, 16: np.uint16, 32: np.uint32}.get(stream.m)
    if dtype is None:
        raise ValueError(f"word width {stream.m} cannot be stored as a tensor file")
    t = TensorRecord(
        dims=dims, layout=args.layout.upper(), m=stream.m,
        data=np.asarray(words, dtype=dtype),
    )
    store_tensor(t, args.output)
    return {
        "input": args.input,
        "output": args.output,
        "method": stream.method_name,
        "elementCount": stream.element_count,
        "dims": list(dims),
        "layout": t.layout,
    }


def _entry_rows(job: tuple[ManifestEntry, str, dict]) -> list:
    entry, which, p = job
    t = entry.load()
    if which == "sparsity":
        return [
            {
                "network": t.network, "layer": t.layer, "m": t.m,
                "elements": t.element_count,
                "zeros": int(round(analysis.sparsity(t) * t.element_count)),
                "sparsity": analysis.sparsity(t),
            }
        ]
    if which == "bursts":
        rows = []
        for layout in p["layouts"]:
            cdf = analysis.burst_cdf(t, layout)
            for kind, table in (("zero", cdf.zero), ("nonzero", cdf.nonzero)):
                for length, prob in table.items():
                    rows.append(
                        {
                            "network": t.network, "layer": t.layer,
                            "layout": layout, "kind": kind,
                            "length": length, "cumProb": prob,
                        }
                    )
        return rows
    if which == "hist":
        h = analysis.value_histogram(t, p["bins"])
        rows = [
            {"network": t.network, "layer": t.layer, "m": t.m,
             "bin": "zero", "count": h.zero_count}
        ]
        rows.extend(
            {"network": t.network, "layer": t.layer, "m": t.m, "bin": i, "count": c}
            for i, c in enumerate(h.counts)
        )
        return rows
    if which == "sweep-n":
        if t.m != p["m"]:
            return []
        return analysis.tensor_block_sweep_rows(t, p["n_set"], p["k"], p["layout"])
    if which == "sweep-k":
        if t.m not in p["m_set"]:
            return []
        return analysis.tensor_burst_sweep_rows(t, p["k_set"], p["layout"])
    if which == "total":
        if t.m not in p["dtypes"]:
            return []
        return analysis.tensor_ratio_rows(t, p["methods"], n=p["n"], k=p["k"],
                                          layout=p["layout"])
    raise ValueError(f"unknown analysis {which!r}")


def _collect_rows(manifest: CorpusManifest, which: str, p: dict, jobs: int) -> list:
    jobs_args = [(entry, which, p) for entry in manifest]
    if jobs > 1 and len(jobs_args) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_entry_rows, jobs_args))
    else:
        chunks = [_entry_rows(j) for j in jobs_args]
    return [row for chunk in chunks for row in chunk]


def _write_dict_csv(rows: list[dict], fields: list[str], path: Path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=fields)
        w.writeheader()
        w.writerows(rows)


def _cmd_analyze(args) -> dict:
    manifest = load_manifest(args.manifest)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    which = args.which
    layout = args.layout.upper() if args.layout != "all" else "all"
    p = {
        "layouts": list(LAYOUTS) if layout == "all" else [layout],
        "layout": analysis.DEFAULT_LAYOUT if layout == "all" else layout,
        "bins": args.bins,
        "m": args.wordwidth,
        "n": args.block_size,
        "k": args.max_burst_log,
        "n_set": args.n_set,
        "k_set": args.k_set,
        "m_set": args.m_set,
        "dtypes": args.dtypes,
        "methods": [s.strip() for s in args.methods.split(",") if s.strip()],
    }
    rows = _collect_rows(manifest, which, p, args.jobs)
    outputs: list[str] = []
    want_csv = args.format in ("csv", "both")
    want_json = args.format in ("json", "both")
    csv_path = out_dir / f"{which}.csv"
    json_path = out_dir / f"{which}.json"

    if which in ("sparsity", "bursts", "hist"):
        order = {
            "sparsity": ["network", "layer", "m", "elements", "zeros", "sparsity"],
            "bursts": ["network", "layer", "layout", "kind", "length", "cumProb"],
            "hist": ["network", "layer", "m", "bin", "count"],
        }[which]
        rows.sort(key=lambda r: tuple(str(r[f]) for f in order[:4]))
        if want_csv:
            _write_dict_csv(rows, order, csv_path)
            outputs.append(str(csv_path))
        if want_json:
            json_path.write_text(json.dumps({"rows": rows}, indent=2) + "\n")
            outputs.append(str(json_path))
        return {"which": which, "rows": len(rows), "outputs": outputs}

    rows.sort(key=analysis._row_key)
    if which == "sweep-n":
        aggregates = analysis.aggregate_rows(rows, ("method", "m", "n", "k"))
        extra = {}
    elif which == "sweep-k":
        aggregates = analysis.aggregate_rows(rows, ("method", "m", "k"))
        table = analysis.burst_sweep_table(rows, p["m_set"], p["k_set"])
        extra = {"table": table}
        if want_csv:
            table_fields = ["m", "zvc"] + [f"max_{1 << k}" for k in p["k_set"]]
            table_rows = [
                {"m": e["m"], "zvc": e["zvc"],
                 **{f"max_{1 << k}": e["zero_rle"][k] for k in p["k_set"]}}
                for e in table
            ]
            _write_dict_csv(table_rows, table_fields, csv_path)
            outputs.append(str(csv_path))
            csv_path = out_dir / f"{which}_rows.csv"
    else:  # total
        aggregates = analysis.aggregate_rows(rows, ("network", "method", "m"))
        warnings = analysis.total_compression_warnings(aggregates)
        extra = {"warnings": warnings}

    if want_csv:
        analysis.write_rows_csv(rows, csv_path)
        outputs.append(str(csv_path))
    if want_json:
        analysis.write_report_json(json_path, rows=rows, aggregates=aggregates, **extra)
        outputs.append(str(json_path))
    return {"which": which, "rows": len(rows), "outputs": outputs}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "compress":
            doc = _cmd_compress(args)
        elif args.command == "decompress":
            doc = _cmd_decompress(args)
        else:
            doc = _cmd_analyze(args)
    except (ValueError,) as e:
        print(f"ebpc: {e}", file=sys.stderr)
        return 2
    except (OSError, CodecError) as e:
        print(f"ebpc: {e}", file=sys.stderr)
        return 1
    _emit(doc, args.human)
    return 0


if __name__ == "__main__":
    sys.exit(main())
