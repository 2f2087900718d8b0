"""The full codec: zero-run coded flag stream fused with block bit-plane
compression of the non-zero values, in one bitstream.

Every input word contributes one flag: '0' words join zero bursts coded as
run symbols (see zero_rle), non-zero words emit a '1' flag and enter a
block buffer. The moment the buffer holds n non-zero words, the coded
block (see bpc) is injected inline, directly after that word's flag. At
end of input a partial buffer is zero-padded to a full block; the decoder
drops the padding by counting flags.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bitstream import BitReader, BitWriter
from .bpc import BpcParams, block_size_bits, decode_block, encode_block
from .container import DTYPE_FLOAT_BITS, DTYPE_UINT, METHOD_EBPC, CompressedStream
from .errors import BadFormat, CountMismatch, TrailingBits


@dataclass(frozen=True)
class EbpcParams:
    """m: word width (bits); n: block size (words); k: zero-run field width.

    Defaults m=16, n=16, k=4. dtype_tag records whether words are plain
    unsigned integers or reinterpreted float bit patterns; it does not
    change the coding, only how consumers interpret the words.
    """

    m: int = 16
    n: int = 16
    k: int = 4
    dtype_tag: int = DTYPE_UINT

    def __post_init__(self) -> None:
        BpcParams(self.m, self.n)  # range checks
        if not 1 <= self.k <= 6:
            raise ValueError(f"zero-run field width k={self.k} outside [1, 6]")
        if self.dtype_tag not in (DTYPE_UINT, DTYPE_FLOAT_BITS):
            raise ValueError(f"unknown dtype tag {self.dtype_tag}")

    @property
    def bpc(self) -> BpcParams:
        return BpcParams(self.m, self.n)


class StreamingEncoder:
    """Word-at-a-time encoder with bounded state.

    Live state between words is at most n-1 buffered words, the block
    coder's base and previous-word registers, and the k-bit run counter;
    state_bits() reports that footprint.
    """

    def __init__(self, p: EbpcParams, w: BitWriter) -> None:
        self.p = p
        self.w = w
        self._bpc = p.bpc
        self._limit = 1 << p.m
        self._max_burst = 1 << p.k
        self._zero_run = 0
        self._buf: list[int] = []
        self._finished = False

    def _flush_run(self) -> None:
        w = self.w
        k = self.p.k
        run = self._zero_run
        while run:
            chunk = run if run < self._max_burst else self._max_burst
            w.write_bits(0, 1)
            w.write_bits(chunk - 1, k)
            run -= chunk
        self._zero_run = 0

    def push(self, word: int) -> None:
        word = int(word)
        if not 0 <= word < self._limit:
            raise ValueError(f"word {word} out of range for m={self.p.m}")
        if word == 0:
            self._zero_run += 1
            if self._zero_run == self._max_burst:
                self._flush_run()
            return
        self._flush_run()
        self.w.write_bits(1, 1)
        buf = self._buf
        buf.append(word)
        if len(buf) == self.p.n:
            encode_block(buf, self._bpc, self.w)
            buf.clear()

    def finish(self) -> None:
        if self._finished:
            return
        self._flush_run()
        buf = self._buf
        if buf:
            buf.extend([0] * (self.p.n - len(buf)))
            encode_block(buf, self._bpc, self.w)
            buf.clear()
        self._finished = True

    def state_bits(self) -> int:
        """Bits of live encoder state: buffered words plus the block
        coder's two word registers plus the run counter."""
        return len(self._buf) * self.p.m + 2 * self.p.m + self.p.k


def words_array(words, m: int) -> np.ndarray:
    """Flat uint64 view of the input with the m-bit range check applied."""
    try:
        arr = np.ascontiguousarray(words, dtype=np.uint64)
    except (OverflowError, TypeError) as e:
        raise ValueError(f"input is not a sequence of unsigned words: {e}") from None
    if arr.ndim != 1:
        arr = arr.reshape(-1)
    if arr.size and m < 64 and int(arr.max()) >> m:
        raise ValueError(f"input contains words out of range for m={m}")
    return arr


def _prepare(words, p: EbpcParams) -> tuple[np.ndarray, np.ndarray, int]:
    arr = words_array(words, p.m)
    nz_idx = np.flatnonzero(arr)
    return arr, nz_idx, int(arr.size)


def _run_symbols(w: BitWriter, gap: int, k: int, max_burst: int) -> None:
    full, rem = divmod(gap, max_burst)
    for _ in range(full):
        w.write_bits(0, 1)
        w.write_bits(max_burst - 1, k)
    if rem:
        w.write_bits(0, 1)
        w.write_bits(rem - 1, k)


def compress(words, p: EbpcParams = EbpcParams()) -> CompressedStream:
    """Compress a word sequence into a container. Bit-identical to pushing
    each word through StreamingEncoder."""
    arr, nz_idx, count = _prepare(words, p)
    w = BitWriter()
    k = p.k
    n = p.n
    max_burst = 1 << k
    bpc = p.bpc
    values = arr[nz_idx].tolist()
    positions = nz_idx.tolist()

    prev = 0
    buf: list[int] = []
    for pos, v in zip(positions, values):
        if pos != prev:
            _run_symbols(w, pos - prev, k, max_burst)
        w.write_bits(1, 1)
        buf.append(v)
        if len(buf) == n:
            encode_block(buf, bpc, w)
            buf.clear()
        prev = pos + 1
    if count != prev:
        _run_symbols(w, count - prev, k, max_burst)
    if buf:
        buf.extend([0] * (n - len(buf)))
        encode_block(buf, bpc, w)

    return CompressedStream(
        m=p.m,
        n=p.n,
        k=p.k,
        dtype_tag=p.dtype_tag,
        method=METHOD_EBPC,
        element_count=count,
        payload_bits=w.bit_length,
        payload=w.getvalue(),
    )


def decompress(s: CompressedStream) -> list[int]:
    """Inverse of compress: flags place zeros, inline blocks carry the
    non-zero words, the final partial block is truncated by flag count."""
    if s.method != METHOD_EBPC:
        raise BadFormat(f"stream method is {s.method_name}, not ebpc")
    p = EbpcParams(m=s.m, n=s.n, k=s.k, dtype_tag=s.dtype_tag)
    bpc = p.bpc
    n = p.n
    k = p.k
    count = s.element_count
    r = BitReader(s.payload, s.payload_bits)

    out: list[int] = []
    slots: list[int] = []  # output indices awaiting block values
    pending = 0
    while len(out) < count:
        if r.read_bits(1):
            slots.append(len(out))
            out.append(0)
            pending += 1
            if pending == n:
                for slot, v in zip(slots, decode_block(r, bpc)):
                    out[slot] = v
                slots.clear()
                pending = 0
        else:
            burst = r.read_bits(k) + 1
            if len(out) + burst > count:
                raise CountMismatch(
                    f"zero burst of {burst} at element {len(out)} exceeds count {count}"
                )
            out.extend([0] * burst)
    if pending:
        for slot, v in zip(slots, decode_block(r, bpc)[:pending]):
            out[slot] = v
    if r.cursor != r.limit:
        raise TrailingBits(f"{r.limit - r.cursor} unconsumed payload bits")
    return out


def compressed_size_bits(words, p: EbpcParams = EbpcParams()) -> int:
    """Payload size of compress(words, p), computed from run and block
    arithmetic without materializing the stream."""
    arr, nz_idx, count = _prepare(words, p)
    k = p.k
    n = p.n
    max_burst = 1 << k
    bpc = p.bpc
    nnz = int(nz_idx.size)

    # flag stream: one bit per non-zero, (1+k) bits per run symbol
    if nnz:
        gaps = np.diff(nz_idx, prepend=-1) - 1
        tail = count - 1 - int(nz_idx[-1])
        symbols = int(np.sum((gaps + max_burst - 1) // max_burst))
        symbols += (tail + max_burst - 1) // max_burst
    else:
        symbols = (count + max_burst - 1) // max_burst
    bits = nnz + (1 + k) * symbols

    values = arr[nz_idx].tolist()
    for start in range(0, nnz - n + 1, n):
        bits += block_size_bits(values[start : start + n], bpc)
    rem = nnz % n
    if rem:
        bits += block_size_bits(values[nnz - rem :] + [0] * (n - rem), bpc)
    return bits


def floats_to_words(values) -> np.ndarray:
    """Reinterpret IEEE floats as unsigned words of the same width; only
    the all-zero pattern (+0.0) maps to word 0."""
    arr = np.ascontiguousarray(values)
    if arr.dtype == np.float32:
        return arr.view(np.uint32)
    if arr.dtype == np.float64:
        return arr.view(np.uint64)
    raise ValueError(f"expected float32 or float64 data, got {arr.dtype}")


def words_to_floats(words, m: int) -> np.ndarray:
    if m == 32:
        return np.ascontiguousarray(words, dtype=np.uint32).view(np.float32)
    if m == 64:
        return np.ascontiguousarray(words, dtype=np.uint64).view(np.float64)
    raise ValueError(f"no float type of width {m}")
