"""Writer/reader for the TNSR tensor file format and its JSON manifest.

This is the hand-off surface to the compression tooling, implemented
independently against the format definition:

    magic "TNSR" | version u8=1 | m u8 in {8,16,32} | layout u8
    {0 NCHW, 1 NHWC, 2 CHWN, 3 HWCN} | reserved u8 | dims 4 x u32 LE in
    N,C,H,W order | data words LE in the declared layout order

Manifests are JSON arrays of {"path", "network", "layer", "m"} with paths
relative to the manifest file.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MAGIC = b"TNSR"
VERSION = 1
HEADER = struct.Struct("<4sBBBB4I")

LAYOUT_TAGS = {"NCHW": 0, "NHWC": 1, "CHWN": 2, "HWCN": 3}
LAYOUT_NAMES = {tag: name for name, tag in LAYOUT_TAGS.items()}
WORD_DTYPES = {8: np.dtype("<u1"), 16: np.dtype("<u2"), 32: np.dtype("<u4")}


class TnsrError(Exception):
    pass


@dataclass(frozen=True)
class Tensor:
    dims: tuple[int, int, int, int]
    layout: str
    m: int
    data: np.ndarray


def write_tensor(path, data: np.ndarray, dims, m: int, layout: str = "NCHW") -> None:
    if m not in WORD_DTYPES:
        raise TnsrError(f"word width {m} not in {sorted(WORD_DTYPES)}")
    if layout not in LAYOUT_TAGS:
        raise TnsrError(f"unknown layout {layout!r}")
    dims = tuple(int(d) for d in dims)
    if len(dims) != 4 or any(d < 1 for d in dims):
        raise TnsrError(f"dims {dims} must be four positive counts")
    flat = np.ascontiguousarray(data, dtype=WORD_DTYPES[m]).reshape(-1)
    if flat.size != int(np.prod(dims)):
        raise TnsrError(f"{flat.size} words do not fill dims {dims}")
    header = HEADER.pack(MAGIC, VERSION, m, LAYOUT_TAGS[layout], 0, *dims)
    Path(path).write_bytes(header + flat.tobytes())


def read_tensor(path) -> Tensor:
    raw = Path(path).read_bytes()
    if len(raw) < HEADER.size:
        raise TnsrError(f"{path}: shorter than the {HEADER.size}-byte header")
    magic, version, m, layout_tag, _, dn, dc, dh, dw = HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise TnsrError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise TnsrError(f"{path}: unsupported version {version}")
    if m not in WORD_DTYPES:
        raise TnsrError(f"{path}: bad word width {m}")
    if layout_tag not in LAYOUT_NAMES:
        raise TnsrError(f"{path}: bad layout tag {layout_tag}")
    dims = (dn, dc, dh, dw)
    if any(d < 1 for d in dims):
        raise TnsrError(f"{path}: non-positive dimension in {dims}")
    dtype = WORD_DTYPES[m]
    count = int(np.prod(dims, dtype=np.int64))
    if len(raw) != HEADER.size + count * dtype.itemsize:
        raise TnsrError(f"{path}: size mismatch for dims {dims}")
    data = np.frombuffer(raw, dtype=dtype, offset=HEADER.size)
    return Tensor(dims=dims, layout=LAYOUT_NAMES[layout_tag], m=m, data=data)


def write_manifest(path, entries: list[dict]) -> None:
    path = Path(path)
    rows = []
    for e in entries:
        p = Path(e["path"])
        try:
            p = p.relative_to(path.parent)
        except ValueError:
            pass
        rows.append({"path": str(p), "network": e["network"],
                     "layer": e["layer"], "m": int(e["m"])})
    path.write_text(json.dumps(rows, indent=2) + "\n")


def read_manifest(path) -> list[dict]:
    path = Path(path)
    rows = json.loads(path.read_text())
    if not isinstance(rows, list):
        raise TnsrError(f"{path}: manifest must be a JSON array")
    out = []
    for i, row in enumerate(rows):
        try:
            p = Path(row["path"])
            out.append({
                "path": p if p.is_absolute() else path.parent / p,
                "network": str(row.get("network", "")),
                "layer": str(row.get("layer", "")),
                "m": int(row["m"]),
            })
        except (KeyError, TypeError, ValueError) as e:
            raise TnsrError(f"{path}: entry {i} malformed: {e}") from None
    return out


def validate_corpus(manifest_path) -> list[str]:
    """Re-open every referenced file and check it against the format and
    against the manifest's own word width. Returns one message per
    problem; an empty list means the corpus is sound."""
    errors: list[str] = []
    try:
        entries = read_manifest(manifest_path)
    except (OSError, json.JSONDecodeError, TnsrError) as e:
        return [str(e)]
    for e in entries:
        try:
            t = read_tensor(e["path"])
        except (OSError, TnsrError) as err:
            errors.append(str(err))
            continue
        if t.m != e["m"]:
            errors.append(f"{e['path']}: manifest says m={e['m']}, file has m={t.m}")
        if t.data.size and e["m"] < 64 and int(t.data.max()) >> e["m"]:
            errors.append(
                f"{e['path']}: word {int(t.data.max())} exceeds {e['m']}-bit range"
            )
    return errors
