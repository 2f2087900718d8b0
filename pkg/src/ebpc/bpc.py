"""Block bit-plane compression of n-word groups.

A block of n unsigned m-bit words is coded as the first word (the base,
written verbatim) plus n-1 consecutive differences. The differences, taken
as (m+1)-bit two's complement, are transposed into m+1 delta bit-planes
(DBPs) of n-1 bits each: bit i of plane j is bit j of delta i. Adjacent
planes are XOR-ed into DBX planes, keeping the most significant plane
un-XORed as the reconstruction anchor; the XOR maps small negative deltas
to mostly-zero plane words. Plane words are then symbol-coded with a
prefix-free table, planes emitted anchor first, then DBX from the most
significant down:

    plane word pattern                        code
    --------------------------------------------------------------
    zero, part of a run of 2..m+1 planes      001 + runlen-2   (ceil(log2 m) bits)
    zero, isolated                            01
    all ones                                  00000
    DBX plane whose DBP word is zero          00001
    exactly two adjacent ones at q, q+1       00010 + q        (ceil(log2(n-1)) bits)
    exactly one set bit at q                  00011 + q        (ceil(log2(n-1)) bits)
    anything else                             1 + raw plane    (n-1 bits)

Rows are tried in table order, so an all-ones word wins over a zero DBP
word when both apply (the two decode identically). Bit position 0 of a
plane word is delta index 0 and the word's least significant bit.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bitstream import BitReader, BitWriter
from .errors import CorruptBlock


@dataclass(frozen=True)
class BpcParams:
    """m: word width in bits; n: words per block (one base + n-1 deltas).

    The standard widths are m in {8, 16, 32} and n in {4, 8, 16, 32};
    any m in [2, 64] and n in [2, 255] is accepted.
    """

    m: int = 16
    n: int = 16

    def __post_init__(self) -> None:
        if not 2 <= self.m <= 64:
            raise ValueError(f"word width m={self.m} outside [2, 64]")
        if not 2 <= self.n <= 255:
            raise ValueError(f"block size n={self.n} outside [2, 255]")

    @property
    def plane_width(self) -> int:
        """Bits per plane word: one per delta."""
        return self.n - 1

    @property
    def plane_count(self) -> int:
        """Planes per block: deltas are m+1-bit two's complement."""
        return self.m + 1

    @property
    def run_field_bits(self) -> int:
        """Field width for zero-run lengths 2..m+1 (stored as length-2)."""
        return (self.m - 1).bit_length()

    @property
    def pos_field_bits(self) -> int:
        """Field width for bit positions within a plane word."""
        return (self.n - 2).bit_length()


@dataclass(frozen=True)
class BpcBlock:
    """base: first word verbatim; deltas: exact consecutive differences."""

    base: int
    deltas: tuple[int, ...]


@dataclass(frozen=True)
class PlaneSet:
    """dbp[j] holds bit j of every delta; dbx[j] = dbp[j] ^ dbp[j+1].

    dbp has m+1 entries (j = 0 .. m), dbx has m. The anchor plane is
    dbp[m], the sign-bit plane of the two's complement deltas.
    """

    dbp: tuple[int, ...]
    dbx: tuple[int, ...]

    @property
    def base_dbp(self) -> int:
        return self.dbp[-1]


def delta_transform(words, p: BpcParams) -> BpcBlock:
    if len(words) != p.n:
        raise ValueError(f"block needs exactly {p.n} words, got {len(words)}")
    limit = 1 << p.m
    ws = [int(x) for x in words]
    for x in ws:
        if not 0 <= x < limit:
            raise ValueError(f"word {x} out of range for m={p.m}")
    return BpcBlock(base=ws[0], deltas=tuple(ws[i + 1] - ws[i] for i in range(p.n - 1)))


def inverse_delta(b: BpcBlock, p: BpcParams) -> list[int]:
    limit = 1 << p.m
    words = [b.base]
    cur = b.base
    for d in b.deltas:
        cur += d
        if not 0 <= cur < limit:
            raise CorruptBlock(f"prefix sum {cur} out of [0, {limit - 1}]")
        words.append(cur)
    return words


def plane_transform(b: BpcBlock, p: BpcParams) -> PlaneSet:
    m = p.m
    mask = (1 << (m + 1)) - 1
    tc = [d & mask for d in b.deltas]  # two's complement in m+1 bits
    dbp = []
    for j in range(m + 1):
        plane = 0
        for i, d in enumerate(tc):
            plane |= ((d >> j) & 1) << i
        dbp.append(plane)
    dbx = [dbp[j] ^ dbp[j + 1] for j in range(m)]
    return PlaneSet(dbp=tuple(dbp), dbx=tuple(dbx))


def inverse_planes(ps: PlaneSet, p: BpcParams) -> BpcBlock:
    """Rebuild signed deltas from the planes (base must be supplied separately)."""
    m = p.m
    deltas = []
    for i in range(p.n - 1):
        v = 0
        for j in range(m + 1):
            v |= ((ps.dbp[j] >> i) & 1) << j
        if v >> m:  # sign bit of the m+1-bit value
            v -= 1 << (m + 1)
        deltas.append(v)
    return BpcBlock(base=0, deltas=tuple(deltas))


def _write_field(w: BitWriter, value: int, count: int) -> None:
    """write_bits for fields wider than the 64-bit single-call cap."""
    while count > 64:
        count -= 64
        w.write_bits((value >> count) & 0xFFFFFFFFFFFFFFFF, 64)
    w.write_bits(value, count)


def _read_field(r: BitReader, count: int) -> int:
    v = 0
    while count > 64:
        v = (v << 64) | r.read_bits(64)
        count -= 64
    return (v << count) | r.read_bits(count)


def _emission_planes(ps: PlaneSet, p: BpcParams) -> list[tuple[int, int | None]]:
    """(plane word, matching DBP word or None) in wire order: anchor plane
    first, then DBX planes from most significant down."""
    pairs: list[tuple[int, int | None]] = [(ps.dbp[p.m], None)]
    for j in range(p.m - 1, -1, -1):
        pairs.append((ps.dbx[j], ps.dbp[j]))
    return pairs


def _encode_symbols(planes: list[tuple[int, int | None]], p: BpcParams, w: BitWriter) -> None:
    """Symbol-code a plane sequence. The DBP-zero row only fires for planes
    carrying a DBP word (dbp is None for the anchor plane)."""
    run_bits = p.run_field_bits
    pos_bits = p.pos_field_bits
    width = p.plane_width
    all_ones = (1 << width) - 1
    total = len(planes)
    i = 0
    while i < total:
        v, dbp = planes[i]
        if v == 0:
            run = 1
            while i + run < total and planes[i + run][0] == 0:
                run += 1
            if run == 1:
                w.write_bits(0b01, 2)
            else:
                w.write_bits(0b001, 3)
                w.write_bits(run - 2, run_bits)
            i += run
            continue
        if v == all_ones:
            w.write_bits(0b00000, 5)
        elif dbp == 0:
            w.write_bits(0b00001, 5)
        elif v.bit_count() == 2 and v & (v >> 1):
            w.write_bits(0b00010, 5)
            w.write_bits((v & -v).bit_length() - 1, pos_bits)
        elif v.bit_count() == 1:
            w.write_bits(0b00011, 5)
            w.write_bits(v.bit_length() - 1, pos_bits)
        else:
            w.write_bits(1, 1)
            _write_field(w, v, width)
        i += 1


def _symbol_stream_size_bits(planes: list[tuple[int, int | None]], p: BpcParams) -> int:
    """Size of _encode_symbols output, computed arithmetically."""
    run_bits = p.run_field_bits
    pos_bits = p.pos_field_bits
    width = p.plane_width
    all_ones = (1 << width) - 1
    total = len(planes)
    bits = 0
    i = 0
    while i < total:
        v, dbp = planes[i]
        if v == 0:
            run = 1
            while i + run < total and planes[i + run][0] == 0:
                run += 1
            bits += 2 if run == 1 else 3 + run_bits
            i += run
            continue
        if v == all_ones or dbp == 0:
            bits += 5
        elif v.bit_count() == 1 or (v.bit_count() == 2 and v & (v >> 1)):
            bits += 5 + pos_bits
        else:
            bits += 1 + width
        i += 1
    return bits


def encode_plane_symbols(ps: PlaneSet, p: BpcParams, w: BitWriter) -> None:
    _encode_symbols(_emission_planes(ps, p), p, w)


def decode_plane_symbols(r: BitReader, p: BpcParams) -> PlaneSet:
    """Read symbols until all m+1 planes are accounted for and rebuild the
    plane set via dbp[j] = dbx[j] ^ dbp[j+1]."""
    m = p.m
    run_bits = p.run_field_bits
    pos_bits = p.pos_field_bits
    width = p.plane_width
    all_ones = (1 << width) - 1
    total = m + 1

    # plane words in wire order; None marks a DBP-zero symbol
    values: list[int | None] = []
    while len(values) < total:
        if r.read_bits(1):
            values.append(_read_field(r, width))
            continue
        if r.read_bits(1):
            values.append(0)
            continue
        if r.read_bits(1):
            run = r.read_bits(run_bits) + 2
            if len(values) + run > total:
                raise CorruptBlock(f"zero run of {run} planes overshoots block of {total}")
            values.extend([0] * run)
            continue
        sel = r.read_bits(2)
        if sel == 0b00:
            values.append(all_ones)
        elif sel == 0b01:
            if not values:
                raise CorruptBlock("DBP-zero symbol on the anchor plane")
            values.append(None)
        elif sel == 0b10:
            q = r.read_bits(pos_bits)
            if q + 1 >= width:
                raise CorruptBlock(f"adjacent-pair position {q} out of range")
            values.append(0b11 << q)
        else:
            q = r.read_bits(pos_bits)
            if q >= width:
                raise CorruptBlock(f"single-bit position {q} out of range")
            values.append(1 << q)

    dbp = [0] * (m + 1)
    dbx = [0] * m
    dbp[m] = values[0]  # anchor plane is never None
    for t in range(1, total):
        j = m - t
        v = values[t]
        if v is None:
            dbp[j] = 0
            dbx[j] = dbp[j + 1]
        else:
            dbx[j] = v
            dbp[j] = v ^ dbp[j + 1]
    return PlaneSet(dbp=tuple(dbp), dbx=tuple(dbx))


def encode_block(words, p: BpcParams, w: BitWriter) -> None:
    """Write base verbatim (m bits) then the symbol-coded planes."""
    block = delta_transform(words, p)
    w.write_bits(block.base, p.m)
    encode_plane_symbols(plane_transform(block, p), p, w)


def decode_block(r: BitReader, p: BpcParams) -> list[int]:
    base = r.read_bits(p.m)
    ps = decode_plane_symbols(r, p)
    block = inverse_planes(ps, p)
    return inverse_delta(BpcBlock(base=base, deltas=block.deltas), p)


def block_size_bits(words, p: BpcParams) -> int:
    """Exact encode_block output size without emitting bits."""
    ps = plane_transform(delta_transform(words, p), p)
    return p.m + _symbol_stream_size_bits(_emission_planes(ps, p), p)
