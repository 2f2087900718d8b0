"""On-disk container wrapping a compressed bit payload.

Layout (little-endian multi-byte fields):

    offset  size  field
    0       4     magic "EBPC"
    4       1     version (1)
    5       1     m  (word width, bits)
    6       1     n  (block size, words; 0 when the method has no blocks)
    7       1     k  (zero-run field width, bits; 0 when unused)
    8       1     dtype tag (0 = unsigned int, 1 = float bit pattern)
    9       1     method tag (0 = ebpc, 1 = zvc, 2 = zero-rle, 3 = bpc)
    10      2     reserved, zero
    12      8     element count (u64)
    20      8     payload length in bits (u64)
    28      ...   payload, ceil(payloadBits / 8) bytes, MSB-first packed
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

from .errors import BadFormat

MAGIC = b"EBPC"
VERSION = 1
HEADER = struct.Struct("<4sBBBBBBxxQQ")
HEADER_BYTES = HEADER.size

DTYPE_UINT = 0
DTYPE_FLOAT_BITS = 1

METHOD_EBPC = 0
METHOD_ZVC = 1
METHOD_ZERO_RLE = 2
METHOD_BPC = 3

METHOD_NAMES = {
    METHOD_EBPC: "ebpc",
    METHOD_ZVC: "zvc",
    METHOD_ZERO_RLE: "zero-rle",
    METHOD_BPC: "bpc",
}
METHOD_TAGS = {name: tag for tag, name in METHOD_NAMES.items()}


@dataclass(frozen=True)
class CompressedStream:
    m: int
    n: int
    k: int
    dtype_tag: int
    method: int
    element_count: int
    payload_bits: int
    payload: bytes

    def __post_init__(self) -> None:
        need = (self.payload_bits + 7) // 8
        if len(self.payload) != need:
            raise ValueError(
                f"payload of {len(self.payload)} bytes does not match {self.payload_bits} bits"
            )

    @property
    def method_name(self) -> str:
        return METHOD_NAMES[self.method]

    def to_bytes(self) -> bytes:
        return (
            HEADER.pack(
                MAGIC,
                VERSION,
                self.m,
                self.n,
                self.k,
                self.dtype_tag,
                self.method,
                self.element_count,
                self.payload_bits,
            )
            + self.payload
        )

    @classmethod
    def from_bytes(cls, data: bytes) -> "CompressedStream":
        if len(data) < HEADER_BYTES:
            raise BadFormat(f"container truncated: {len(data)} bytes < {HEADER_BYTES} header")
        magic, version, m, n, k, dtype_tag, method, count, bits = HEADER.unpack_from(data)
        if magic != MAGIC:
            raise BadFormat(f"bad magic {magic!r}")
        if version != VERSION:
            raise BadFormat(f"unsupported version {version}")
        if method not in METHOD_NAMES:
            raise BadFormat(f"unknown method tag {method}")
        payload = data[HEADER_BYTES:]
        need = (bits + 7) // 8
        if len(payload) < need:
            raise BadFormat(f"payload truncated: {len(payload)} bytes < {need}")
        if len(payload) > need:
            raise BadFormat(f"{len(payload) - need} trailing bytes after payload")
        return cls(
            m=m,
            n=n,
            k=k,
            dtype_tag=dtype_tag,
            method=method,
            element_count=count,
            payload_bits=bits,
            payload=payload,
        )

    def write(self, path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def read(cls, path) -> "CompressedStream":
        return cls.from_bytes(Path(path).read_bytes())
