"""Reference compressors the main codec is measured against.

zvc: per 32-element group, a 32-bit presence mask (bit j set = element j
non-zero, mask bit order = element order) followed by the non-zero values
verbatim; the final partial group still spends a full 32-bit mask.

zero-rle: the flag stream of zero_rle, but every '1' flag is immediately
followed by the m-bit value.

bpc: block bit-plane coding of the whole stream, zeros included, in
n-word blocks; the final partial block is zero-padded and truncated on
decode via the container's element count.
"""

from __future__ import annotations

import numpy as np

from .bitstream import BitReader, BitWriter
from .bpc import BpcParams, block_size_bits, decode_block, encode_block
from .codec import words_array
from .container import (
    DTYPE_UINT,
    METHOD_BPC,
    METHOD_ZERO_RLE,
    METHOD_ZVC,
    CompressedStream,
)
from .errors import BadFormat, CountMismatch, TrailingBits
from .zero_rle import RleParams

ZVC_GROUP = 32


def _wrap(method: int, m: int, n: int, k: int, count: int, w: BitWriter,
          dtype_tag: int = DTYPE_UINT) -> CompressedStream:
    return CompressedStream(
        m=m,
        n=n,
        k=k,
        dtype_tag=dtype_tag,
        method=method,
        element_count=count,
        payload_bits=w.bit_length,
        payload=w.getvalue(),
    )


def zvc_compress(words, m: int) -> CompressedStream:
    arr = words_array(words, m)
    w = BitWriter()
    count = int(arr.size)
    for start in range(0, count, ZVC_GROUP):
        group = arr[start : start + ZVC_GROUP]
        mask = 0
        for j, v in enumerate(group.tolist()):
            if v:
                mask |= 1 << (ZVC_GROUP - 1 - j)
        w.write_bits(mask, ZVC_GROUP)
        for v in group[group != 0].tolist():
            w.write_bits(v, m)
    return _wrap(METHOD_ZVC, m, 0, 0, count, w)


def zvc_decompress(s: CompressedStream) -> list[int]:
    if s.method != METHOD_ZVC:
        raise BadFormat(f"stream method is {s.method_name}, not zvc")
    r = BitReader(s.payload, s.payload_bits)
    count = s.element_count
    m = s.m
    out: list[int] = []
    while len(out) < count:
        mask = r.read_bits(ZVC_GROUP)
        take = min(ZVC_GROUP, count - len(out))
        for j in range(take):
            if (mask >> (ZVC_GROUP - 1 - j)) & 1:
                out.append(r.read_bits(m))
            else:
                out.append(0)
    if r.cursor != r.limit:
        raise TrailingBits(f"{r.limit - r.cursor} unconsumed payload bits")
    return out


def zvc_size_bits(words, m: int) -> int:
    """ceil(count/32)*32 mask bits plus m bits per non-zero value."""
    arr = words_array(words, m)
    count = int(arr.size)
    nnz = int(np.count_nonzero(arr))
    return ((count + ZVC_GROUP - 1) // ZVC_GROUP) * ZVC_GROUP + nnz * m


def zero_rle_only_compress(words, m: int, k: int = 4) -> CompressedStream:
    RleParams(k)
    arr = words_array(words, m)
    count = int(arr.size)
    max_burst = 1 << k
    w = BitWriter()
    nz_idx = np.flatnonzero(arr)
    prev = 0
    for pos, v in zip(nz_idx.tolist(), arr[nz_idx].tolist()):
        gap = pos - prev
        full, rem = divmod(gap, max_burst)
        for _ in range(full):
            w.write_bits(0, 1)
            w.write_bits(max_burst - 1, k)
        if rem:
            w.write_bits(0, 1)
            w.write_bits(rem - 1, k)
        w.write_bits(1, 1)
        w.write_bits(v, m)
        prev = pos + 1
    gap = count - prev
    full, rem = divmod(gap, max_burst)
    for _ in range(full):
        w.write_bits(0, 1)
        w.write_bits(max_burst - 1, k)
    if rem:
        w.write_bits(0, 1)
        w.write_bits(rem - 1, k)
    return _wrap(METHOD_ZERO_RLE, m, 0, k, count, w)


def zero_rle_only_decompress(s: CompressedStream) -> list[int]:
    if s.method != METHOD_ZERO_RLE:
        raise BadFormat(f"stream method is {s.method_name}, not zero-rle")
    r = BitReader(s.payload, s.payload_bits)
    count = s.element_count
    m = s.m
    k = s.k
    out: list[int] = []
    while len(out) < count:
        if r.read_bits(1):
            out.append(r.read_bits(m))
        else:
            burst = r.read_bits(k) + 1
            if len(out) + burst > count:
                raise CountMismatch(
                    f"zero burst of {burst} at element {len(out)} exceeds count {count}"
                )
            out.extend([0] * burst)
    if r.cursor != r.limit:
        raise TrailingBits(f"{r.limit - r.cursor} unconsumed payload bits")
    return out


def zero_rle_only_size_bits(words, m: int, k: int = 4) -> int:
    arr = words_array(words, m)
    count = int(arr.size)
    max_burst = 1 << k
    nz_idx = np.flatnonzero(arr)
    nnz = int(nz_idx.size)
    if nnz:
        gaps = np.diff(nz_idx, prepend=-1) - 1
        symbols = int(np.sum((gaps + max_burst - 1) // max_burst))
        symbols += (count - 1 - int(nz_idx[-1]) + max_burst - 1) // max_burst
    else:
        symbols = (count + max_burst - 1) // max_burst
    return nnz * (1 + m) + (1 + k) * symbols


def raw_bpc_compress(words, m: int, n: int = 16) -> CompressedStream:
    p = BpcParams(m, n)
    arr = words_array(words, m)
    count = int(arr.size)
    w = BitWriter()
    vals = arr.tolist()
    for start in range(0, count - n + 1, n):
        encode_block(vals[start : start + n], p, w)
    rem = count % n
    if rem:
        encode_block(vals[count - rem :] + [0] * (n - rem), p, w)
    return _wrap(METHOD_BPC, m, n, 0, count, w)


def raw_bpc_decompress(s: CompressedStream) -> list[int]:
    if s.method != METHOD_BPC:
        raise BadFormat(f"stream method is {s.method_name}, not bpc")
    p = BpcParams(s.m, s.n)
    r = BitReader(s.payload, s.payload_bits)
    count = s.element_count
    out: list[int] = []
    blocks = (count + s.n - 1) // s.n
    for _ in range(blocks):
        out.extend(decode_block(r, p))
    if r.cursor != r.limit:
        raise TrailingBits(f"{r.limit - r.cursor} unconsumed payload bits")
    return out[:count]


def raw_bpc_size_bits(words, m: int, n: int = 16) -> int:
    p = BpcParams(m, n)
    arr = words_array(words, m)
    count = int(arr.size)
    vals = arr.tolist()
    bits = 0
    for start in range(0, count - n + 1, n):
        bits += block_size_bits(vals[start : start + n], p)
    rem = count % n
    if rem:
        bits += block_size_bits(vals[count - rem :] + [0] * (n - rem), p)
    return bits
