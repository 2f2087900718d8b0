"""Run-length coding of the zero/non-zero flag stream.

Each maximal burst of zero flags is emitted as one or more symbols
'0' + <k-bit field> where the field holds (burst chunk length - 1), so a
k-bit field covers chunk lengths 1 .. 2**k. Bursts longer than 2**k are
split greedily into maximal chunks. Every non-zero flag costs a single
'1' bit; runs of ones are deliberately not coded.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .bitstream import BitReader, BitWriter
from .errors import DecodeOverrun


@dataclass(frozen=True)
class RleParams:
    """k is the burst-length field width in bits; max burst chunk is 2**k."""

    k: int = 4

    def __post_init__(self) -> None:
        if not 1 <= self.k <= 6:
            raise ValueError(f"burst field width k={self.k} outside [1, 6]")

    @property
    def max_burst(self) -> int:
        return 1 << self.k


def encode_flags(flags: Iterable[bool], p: RleParams, w: BitWriter) -> None:
    """Emit the flag stream in input order: run symbols for zero bursts,
    one '1' bit per non-zero flag."""
    k = p.k
    max_burst = 1 << k
    run = 0
    for f in flags:
        if f:
            while run:
                chunk = run if run < max_burst else max_burst
                w.write_bits(0, 1)
                w.write_bits(chunk - 1, k)
                run -= chunk
            w.write_bits(1, 1)
        else:
            run += 1
            if run == max_burst:
                w.write_bits(0, 1)
                w.write_bits(max_burst - 1, k)
                run = 0
    while run:
        chunk = run if run < max_burst else max_burst
        w.write_bits(0, 1)
        w.write_bits(chunk - 1, k)
        run -= chunk


def decode_flags(r: BitReader, element_count: int, p: RleParams) -> list[bool]:
    """Inverse of encode_flags; consumes exactly the bits it produced."""
    k = p.k
    flags: list[bool] = []
    n = 0
    while n < element_count:
        if r.read_bits(1):
            flags.append(True)
            n += 1
        else:
            burst = r.read_bits(k) + 1
            if n + burst > element_count:
                raise DecodeOverrun(
                    f"zero burst of {burst} at element {n} exceeds count {element_count}"
                )
            flags.extend([False] * burst)
            n += burst
    return flags


def encoded_size_bits(flags: Sequence[bool], p: RleParams) -> int:
    """Closed-form size: one bit per non-zero flag plus (1+k) bits per
    emitted run symbol, ceil(burst / 2**k) symbols per zero burst."""
    k = p.k
    max_burst = 1 << k
    bits = 0
    run = 0
    for f in flags:
        if f:
            if run:
                bits += (1 + k) * ((run + max_burst - 1) // max_burst)
                run = 0
            bits += 1
        else:
            run += 1
    if run:
        bits += (1 + k) * ((run + max_burst - 1) // max_burst)
    return bits
