"""Corpus measurements: sparsity, burst-length CDFs per layout, value
histograms, parameter sweeps, and per-method compression ratios.

Every reported ratio comes from a stream that was decompressed and
compared against its input first; a mismatch aborts the analysis instead
of producing a number. Aggregate ratios are ratios of summed bit counts,
never means of per-tensor ratios, so sharding a corpus across workers
cannot change the result.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import baselines, codec
from .container import HEADER_BYTES as CONTAINER_HEADER_BYTES
from .corpus import HEADER_BYTES as TENSOR_HEADER_BYTES
from .corpus import LAYOUTS, TensorRecord, permute_layout
from .errors import CodecError

METHODS = ("ebpc", "zvc", "zero-rle", "bpc")
DEFAULT_LAYOUT = "NCHW"


class RoundTripFailure(CodecError):
    """A compressed stream did not decode back to its input."""


@dataclass(frozen=True)
class ReportRow:
    network: str
    layer: str
    method: str
    m: int
    n: int | None
    k: int | None
    layout: str
    uncompressed_bits: int
    compressed_bits: int

    @property
    def ratio(self) -> float:
        return self.uncompressed_bits / self.compressed_bits

    def to_dict(self) -> dict:
        return {
            "network": self.network,
            "layer": self.layer,
            "method": self.method,
            "m": self.m,
            "n": self.n,
            "k": self.k,
            "layout": self.layout,
            "uncompressedBits": self.uncompressed_bits,
            "compressedBits": self.compressed_bits,
            "ratio": self.ratio,
        }


def _row_key(r: ReportRow):
    return (r.network, r.layer, r.method, r.m, r.n or 0, r.k or 0, r.layout)


def sparsity(t: TensorRecord) -> float:
    """Fraction of exactly-zero words."""
    if t.element_count == 0:
        raise ValueError("sparsity of an empty tensor is undefined")
    return float(np.count_nonzero(t.data == 0) / t.element_count)


@dataclass(frozen=True)
class BurstCdf:
    """Empirical cumulative distributions of maximal burst lengths, for
    zero bursts and non-zero bursts separately; empty when no burst of
    that kind exists."""

    zero: dict[int, float]
    nonzero: dict[int, float]

    def value(self, kind: str, length: int) -> float:
        """CDF evaluated at `length` (1.0 past the longest burst, 0.0 when
        no bursts exist)."""
        table = self.zero if kind == "zero" else self.nonzero
        return max((p for l, p in table.items() if l <= length), default=0.0)


def _run_lengths(mask: np.ndarray) -> np.ndarray:
    """Lengths of maximal runs of True, in order."""
    if mask.size == 0:
        return np.empty(0, dtype=np.int64)
    edges = np.diff(np.concatenate(([0], mask.view(np.int8), [0])))
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1)
    return ends - starts


def _cdf(lengths: np.ndarray) -> dict[int, float]:
    if lengths.size == 0:
        return {}
    values, counts = np.unique(lengths, return_counts=True)
    cum = np.cumsum(counts) / lengths.size
    return {int(v): float(c) for v, c in zip(values, cum)}


def burst_cdf(t: TensorRecord, layout: str = DEFAULT_LAYOUT) -> BurstCdf:
    data = permute_layout(t, layout).data
    zero_mask = data == 0
    return BurstCdf(
        zero=_cdf(_run_lengths(zero_mask)),
        nonzero=_cdf(_run_lengths(~zero_mask)),
    )


@dataclass(frozen=True)
class Histogram:
    """Equal-width bins over the full m-bit range; counts sum to the
    element count. The dominant zero bin is also reported on its own."""

    m: int
    bin_count: int
    counts: tuple[int, ...]
    zero_count: int


def value_histogram(t: TensorRecord, bin_count: int = 64) -> Histogram:
    if bin_count < 1:
        raise ValueError("bin_count must be positive")
    idx = ((t.data.astype(np.uint64) * bin_count) >> t.m).astype(np.int64)
    counts = np.bincount(idx, minlength=bin_count)
    return Histogram(
        m=t.m,
        bin_count=bin_count,
        counts=tuple(int(c) for c in counts),
        zero_count=int(np.count_nonzero(t.data == 0)),
    )


def measure(words, method: str, m: int, n: int = 16, k: int = 4,
            verify: bool = True) -> tuple[int, int]:
    """(uncompressed bits, compressed payload bits) for one method, with a
    mandatory round-trip check. Container header bytes are not counted."""
    arr = codec.words_array(words, m)
    if method == "ebpc":
        stream = codec.compress(arr, codec.EbpcParams(m=m, n=n, k=k))
        decoded = codec.decompress(stream) if verify else None
    elif method == "zvc":
        stream = baselines.zvc_compress(arr, m)
        decoded = baselines.zvc_decompress(stream) if verify else None
    elif method == "zero-rle":
        stream = baselines.zero_rle_only_compress(arr, m, k)
        decoded = baselines.zero_rle_only_decompress(stream) if verify else None
    elif method == "bpc":
        stream = baselines.raw_bpc_compress(arr, m, n)
        decoded = baselines.raw_bpc_decompress(stream) if verify else None
    else:
        raise ValueError(f"unknown method {method!r}")
    if verify and not np.array_equal(np.asarray(decoded, dtype=arr.dtype), arr):
        raise RoundTripFailure(f"{method} stream failed its round-trip check")
    return int(arr.size) * m, stream.payload_bits


def tensor_ratio_rows(t: TensorRecord, methods: Sequence[str] = METHODS,
                      n: int = 16, k: int = 4,
                      layout: str = DEFAULT_LAYOUT) -> list[ReportRow]:
    data = permute_layout(t, layout).data
    rows = []
    for method in methods:
        unc, comp = measure(data, method, t.m, n=n, k=k)
        rows.append(
            ReportRow(
                network=t.network,
                layer=t.layer,
                method=method,
                m=t.m,
                n=n if method in ("ebpc", "bpc") else None,
                k=k if method in ("ebpc", "zero-rle") else None,
                layout=layout,
                uncompressed_bits=unc,
                compressed_bits=comp,
            )
        )
    return rows


@dataclass
class Aggregate:
    key: dict
    uncompressed_bits: int = 0
    compressed_bits: int = 0

    @property
    def ratio(self) -> float:
        return self.uncompressed_bits / self.compressed_bits

    def to_dict(self) -> dict:
        return {
            **self.key,
            "uncompressedBits": self.uncompressed_bits,
            "compressedBits": self.compressed_bits,
            "ratio": self.ratio,
        }


def aggregate_rows(rows: Iterable[ReportRow], group_by: Sequence[str]) -> list[Aggregate]:
    groups: dict[tuple, Aggregate] = {}
    for r in rows:
        d = r.to_dict()
        key = tuple(d[g] for g in group_by)
        agg = groups.get(key)
        if agg is None:
            agg = groups[key] = Aggregate(key={g: d[g] for g in group_by})
        agg.uncompressed_bits += r.uncompressed_bits
        agg.compressed_bits += r.compressed_bits
    return [groups[k] for k in sorted(groups, key=lambda k: tuple(str(x) for x in k))]


def tensor_block_sweep_rows(t: TensorRecord, n_set: Sequence[int], k: int,
                            layout: str = DEFAULT_LAYOUT) -> list[ReportRow]:
    data = permute_layout(t, layout).data
    rows = []
    for n in n_set:
        unc, comp = measure(data, "ebpc", t.m, n=n, k=k)
        rows.append(
            ReportRow(
                network=t.network, layer=t.layer, method="ebpc",
                m=t.m, n=n, k=k, layout=layout,
                uncompressed_bits=unc, compressed_bits=comp,
            )
        )
    return rows


def sweep_block_size(corpus: Iterable[TensorRecord], m: int, k: int,
                     n_set: Sequence[int],
                     layout: str = DEFAULT_LAYOUT) -> tuple[list[ReportRow], list[Aggregate]]:
    """Main-codec ratio per block size, for corpus tensors of width m."""
    rows: list[ReportRow] = []
    for t in corpus:
        if t.m == m:
            rows.extend(tensor_block_sweep_rows(t, n_set, k, layout))
    rows.sort(key=_row_key)
    return rows, aggregate_rows(rows, ("method", "m", "n", "k"))


def tensor_burst_sweep_rows(t: TensorRecord, k_set: Sequence[int],
                            layout: str = DEFAULT_LAYOUT) -> list[ReportRow]:
    data = permute_layout(t, layout).data
    unc, comp = measure(data, "zvc", t.m)
    rows = [
        ReportRow(
            network=t.network, layer=t.layer, method="zvc", m=t.m,
            n=None, k=None, layout=layout,
            uncompressed_bits=unc, compressed_bits=comp,
        )
    ]
    for k in k_set:
        unc, comp = measure(data, "zero-rle", t.m, k=k)
        rows.append(
            ReportRow(
                network=t.network, layer=t.layer, method="zero-rle",
                m=t.m, n=None, k=k, layout=layout,
                uncompressed_bits=unc, compressed_bits=comp,
            )
        )
    return rows


def sweep_max_burst(corpus: Iterable[TensorRecord], m_set: Sequence[int],
                    k_set: Sequence[int],
                    layout: str = DEFAULT_LAYOUT) -> tuple[list[dict], list[ReportRow]]:
    """Mask-based vs run-length flag coding across word widths: one table
    row per m with the zvc ratio and the zero-rle ratio per max burst 2**k."""
    rows: list[ReportRow] = []
    for t in corpus:
        if t.m in m_set:
            rows.extend(tensor_burst_sweep_rows(t, k_set, layout))
    rows.sort(key=_row_key)
    return burst_sweep_table(rows, m_set, k_set), rows


def burst_sweep_table(rows: Iterable[ReportRow], m_set: Sequence[int],
                      k_set: Sequence[int]) -> list[dict]:
    aggs = aggregate_rows(rows, ("method", "m", "k"))
    ratios = {(a.key["method"], a.key["m"], a.key["k"]): a.ratio for a in aggs}
    table = []
    for m in m_set:
        if ("zvc", m, None) not in ratios:
            continue
        table.append(
            {
                "m": m,
                "zvc": ratios[("zvc", m, None)],
                "zero_rle": {k: ratios[("zero-rle", m, k)] for k in k_set},
            }
        )
    return table


def total_compression(corpus: Iterable[TensorRecord],
                      methods: Sequence[str] = METHODS,
                      dtypes: Sequence[int] = (8, 16, 32),
                      n: int = 16, k: int = 4,
                      layout: str = DEFAULT_LAYOUT,
                      ) -> tuple[list[ReportRow], list[Aggregate], list[str]]:
    """Aggregate ratio per (network, method, m) over all feature maps."""
    rows: list[ReportRow] = []
    for t in corpus:
        if t.m not in dtypes:
            continue
        rows.extend(tensor_ratio_rows(t, methods, n=n, k=k, layout=layout))
    rows.sort(key=_row_key)
    aggregates = aggregate_rows(rows, ("network", "method", "m"))
    return rows, aggregates, total_compression_warnings(aggregates)


def total_compression_warnings(aggregates: Iterable[Aggregate]) -> list[str]:
    """Warn (never fail) when wider words compress better than narrower
    ones on the same network and method; the reverse is the norm."""
    warnings: list[str] = []
    by_nm: dict[tuple[str, str], dict[int, float]] = {}
    for a in aggregates:
        by_nm.setdefault((a.key["network"], a.key["method"]), {})[a.key["m"]] = a.ratio
    for (network, method), ratios in sorted(by_nm.items()):
        ms = sorted(ratios)
        for lo, hi in zip(ms, ms[1:]):
            if ratios[lo] < ratios[hi]:
                warnings.append(
                    f"{network}/{method}: ratio at m={lo} ({ratios[lo]:.3f}) is below "
                    f"m={hi} ({ratios[hi]:.3f}); wider words usually compress worse"
                )
    return warnings


def header_overhead() -> dict:
    """Fixed per-file header sizes, excluded from every ratio."""
    return {"containerBytes": CONTAINER_HEADER_BYTES, "tensorBytes": TENSOR_HEADER_BYTES}


CSV_FIELDS = ("network", "layer", "method", "m", "n", "k", "layout",
              "uncompressedBits", "compressedBits", "ratio")


def write_rows_csv(rows: Iterable[ReportRow], path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=CSV_FIELDS)
        writer.writeheader()
        for r in rows:
            d = r.to_dict()
            writer.writerow({k: ("" if d[k] is None else d[k]) for k in CSV_FIELDS})


def write_report_json(path, rows: Iterable[ReportRow] | None = None,
                      aggregates: Iterable[Aggregate] | None = None,
                      **extra) -> None:
    doc: dict = {"headerBytes": header_overhead(), **extra}
    if rows is not None:
        doc["rows"] = [r.to_dict() for r in rows]
    if aggregates is not None:
        doc["aggregates"] = [a.to_dict() for a in aggregates]
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")
