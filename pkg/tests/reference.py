"""Independent reference encoders used as oracles.

Everything here works on '0'/'1' strings built with plain string ops, with
no shared code with the package's bit-packed implementations. Plane words
are kept as strings whose character i is delta index i, so s[::-1] is the
MSB-first rendering of the plane word.
"""

import math


def to_bin(value, width):
    return format(value & ((1 << width) - 1), f"0{width}b") if width else ""


def xor_str(a, b):
    return "".join("1" if x != y else "0" for x, y in zip(a, b))


def ref_run_symbols(burst, k):
    """Greedy split of one zero burst into '0'+field symbols."""
    out = ""
    while burst:
        chunk = min(burst, 2 ** k)
        out += "0" + to_bin(chunk - 1, k)
        burst -= chunk
    return out


def ref_zero_rle_flags(flags, k):
    out = ""
    run = 0
    for f in flags:
        if f:
            out += ref_run_symbols(run, k)
            run = 0
            out += "1"
        else:
            run += 1
    return out + ref_run_symbols(run, k)


def ref_plane_strings(words, m):
    """Emission-ordered (plane, dbp) string pairs for one block."""
    deltas = [words[i + 1] - words[i] for i in range(len(words) - 1)]
    rows = [to_bin(d, m + 1) for d in deltas]  # MSB-first per delta
    # planes[t] collects bit (m - t) of every delta; char i = delta i
    planes = ["".join(row[t] for row in rows) for t in range(m + 1)]
    pairs = [(planes[0], None)]  # anchor plane, never XOR-ed
    for t in range(1, m + 1):
        pairs.append((xor_str(planes[t], planes[t - 1]), planes[t]))
    return pairs


def ref_symbol_stream(pairs, m, n):
    run_bits = math.ceil(math.log2(m))
    pos_bits = math.ceil(math.log2(n - 1)) if n > 2 else 0
    width = n - 1
    out = ""
    i = 0
    while i < len(pairs):
        plane, dbp = pairs[i]
        if "1" not in plane:
            run = 1
            while i + run < len(pairs) and "1" not in pairs[i + run][0]:
                run += 1
            out += "01" if run == 1 else "001" + to_bin(run - 2, run_bits)
            i += run
            continue
        if "0" not in plane:
            out += "00000"
        elif dbp is not None and "1" not in dbp:
            out += "00001"
        elif plane.count("1") == 2 and "11" in plane:
            out += "00010" + to_bin(plane.find("11"), pos_bits)
        elif plane.count("1") == 1:
            out += "00011" + to_bin(plane.find("1"), pos_bits)
        else:
            out += "1" + plane[::-1]
        i += 1
    return out


def ref_bpc_block(words, m, n):
    assert len(words) == n
    return to_bin(words[0], m) + ref_symbol_stream(ref_plane_strings(words, m), m, n)


def ref_ebpc(words, m, n, k):
    out = ""
    run = 0
    buf = []
    for w in words:
        if w == 0:
            run += 1
            if run == 2 ** k:
                out += ref_run_symbols(run, k)
                run = 0
            continue
        out += ref_run_symbols(run, k)
        run = 0
        out += "1"
        buf.append(w)
        if len(buf) == n:
            out += ref_bpc_block(buf, m, n)
            buf = []
    out += ref_run_symbols(run, k)
    if buf:
        buf += [0] * (n - len(buf))
        out += ref_bpc_block(buf, m, n)
    return out


def ref_zvc(words, m):
    out = ""
    for start in range(0, len(words), 32):
        group = words[start : start + 32]
        out += "".join("1" if w else "0" for w in group) + "0" * (32 - len(group))
        out += "".join(to_bin(w, m) for w in group if w)
    return out


def ref_zero_rle_only(words, m, k):
    out = ""
    run = 0
    for w in words:
        if w == 0:
            run += 1
            continue
        out += ref_run_symbols(run, k)
        run = 0
        out += "1" + to_bin(w, m)
    return out + ref_run_symbols(run, k)


def ref_raw_bpc(words, m, n):
    out = ""
    for start in range(0, len(words), n):
        block = list(words[start : start + n])
        block += [0] * (n - len(block))
        out += ref_bpc_block(block, m, n)
    return out
