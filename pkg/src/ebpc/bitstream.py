"""Bit-granular writer/reader over byte buffers, MSB-first.

Bits are packed most-significant-first within each byte: stream bit 8*i is
bit 7 of byte i. A single write or read moves at most 64 bits; callers
compose longer fields from multiple calls.
"""

from __future__ import annotations

from .errors import EndOfStream


class BitWriter:
    """Append-only bit sink backed by a growable byte buffer."""

    __slots__ = ("_buf", "_acc", "_nacc")

    def __init__(self) -> None:
        self._buf = bytearray()
        self._acc = 0  # pending bits, oldest at the MSB side
        self._nacc = 0  # number of pending bits, always < 8 between calls

    @property
    def bit_length(self) -> int:
        """Total bits written so far (flush padding never counts)."""
        return len(self._buf) * 8 + self._nacc

    def write_bits(self, value: int, count: int) -> None:
        """Append the `count` least-significant bits of `value`, most
        significant of those bits first."""
        if not 0 <= count <= 64:
            raise ValueError(f"bit count {count} outside [0, 64]")
        if value < 0 or value >> count:
            raise ValueError(f"value {value} does not fit in {count} bits")
        acc = (self._acc << count) | value
        n = self._nacc + count
        buf = self._buf
        while n >= 8:
            n -= 8
            buf.append((acc >> n) & 0xFF)
        self._acc = acc & ((1 << n) - 1)
        self._nacc = n

    def getvalue(self) -> bytes:
        """Byte image of the stream; trailing pad bits are zero."""
        if self._nacc:
            return bytes(self._buf) + bytes(((self._acc << (8 - self._nacc)) & 0xFF,))
        return bytes(self._buf)


class BitReader:
    """Sequential bit source over a byte buffer with a hard bit limit."""

    __slots__ = ("_data", "_pos", "_limit")

    def __init__(self, data: bytes, limit_bits: int | None = None) -> None:
        if limit_bits is None:
            limit_bits = len(data) * 8
        elif limit_bits > len(data) * 8:
            raise ValueError(f"limit {limit_bits} bits exceeds buffer of {len(data)} bytes")
        self._data = data
        self._pos = 0
        self._limit = limit_bits

    @property
    def cursor(self) -> int:
        return self._pos

    @property
    def limit(self) -> int:
        return self._limit

    @property
    def remaining(self) -> int:
        return self._limit - self._pos

    def read_bits(self, count: int) -> int:
        """Return the next `count` bits as an unsigned integer, first bit
        read being the most significant."""
        if not 0 <= count <= 64:
            raise ValueError(f"bit count {count} outside [0, 64]")
        pos = self._pos
        end = pos + count
        if end > self._limit:
            raise EndOfStream(f"read of {count} bits at offset {pos} passes limit {self._limit}")
        if count == 0:
            return 0
        data = self._data
        if count == 1:
            self._pos = end
            return (data[pos >> 3] >> (7 - (pos & 7))) & 1
        first = pos >> 3
        last = (end + 7) >> 3
        chunk = int.from_bytes(data[first:last], "big")
        shift = last * 8 - end
        self._pos = end
        return (chunk >> shift) & ((1 << count) - 1)
