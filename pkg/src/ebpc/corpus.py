"""On-disk tensor format, layout permutation, and corpus manifests.

TNSR file layout (little-endian):

    offset  size  field
    0       4     magic "TNSR"
    4       1     version (1)
    5       1     m, word width in bits, one of {8, 16, 32}
    6       1     layout tag (0 NCHW, 1 NHWC, 2 CHWN, 3 HWCN)
    7       1     reserved, zero
    8       16    dims, four u32 in N, C, H, W order regardless of layout
    24      ...   N*C*H*W unsigned words, little-endian, serialized in the
                  declared layout order

A manifest is a JSON array of {"path", "network", "layer", "m"} entries;
relative paths are resolved against the manifest's directory.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import BadFormat

MAGIC = b"TNSR"
VERSION = 1
HEADER = struct.Struct("<4sBBBB4I")
HEADER_BYTES = HEADER.size

LAYOUTS = ("NCHW", "NHWC", "CHWN", "HWCN")
_LAYOUT_TAGS = {name: i for i, name in enumerate(LAYOUTS)}
_WORD_DTYPES = {8: np.dtype("<u1"), 16: np.dtype("<u2"), 32: np.dtype("<u4")}


@dataclass(frozen=True)
class TensorRecord:
    """A 4-D unsigned fixed-point tensor with a declared serialization order.

    data is the flat word array in `layout` order; dims are always given
    as (N, C, H, W) counts.
    """

    dims: tuple[int, int, int, int]
    layout: str
    m: int
    data: np.ndarray
    network: str = ""
    layer: str = ""

    def __post_init__(self) -> None:
        if self.layout not in _LAYOUT_TAGS:
            raise ValueError(f"unknown layout {self.layout!r}")
        if self.m not in _WORD_DTYPES:
            raise ValueError(f"word width m={self.m} not in {sorted(_WORD_DTYPES)}")
        if len(self.dims) != 4 or any(d < 1 for d in self.dims):
            raise ValueError(f"dims {self.dims} must be four positive counts")
        want = int(np.prod(self.dims, dtype=np.int64))
        if self.data.size != want:
            raise ValueError(f"data has {self.data.size} words, dims need {want}")
        if self.data.dtype != _WORD_DTYPES[self.m]:
            object.__setattr__(self, "data", self.data.astype(_WORD_DTYPES[self.m]))

    @property
    def element_count(self) -> int:
        return int(self.data.size)

    def dim(self, axis: str) -> int:
        return self.dims["NCHW".index(axis)]


def permute_layout(t: TensorRecord, target: str) -> TensorRecord:
    """Reorder the flat data so the same (n, c, h, w) elements serialize in
    the target layout's linear order."""
    if target not in _LAYOUT_TAGS:
        raise ValueError(f"unknown layout {target!r}")
    if target == t.layout:
        return t
    shape = [t.dim(ax) for ax in t.layout]
    perm = [t.layout.index(ax) for ax in target]
    data = np.ascontiguousarray(t.data.reshape(shape).transpose(perm)).reshape(-1)
    return replace(t, layout=target, data=data)


def store_tensor(t: TensorRecord, path) -> None:
    header = HEADER.pack(MAGIC, VERSION, t.m, _LAYOUT_TAGS[t.layout], 0, *t.dims)
    Path(path).write_bytes(header + t.data.tobytes())


def load_tensor(path, network: str = "", layer: str = "") -> TensorRecord:
    data = Path(path).read_bytes()
    if len(data) < HEADER_BYTES:
        raise BadFormat(f"{path}: file shorter than the {HEADER_BYTES}-byte header")
    magic, version, m, layout_tag, _, dn, dc, dh, dw = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise BadFormat(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise BadFormat(f"{path}: unsupported version {version}")
    if m not in _WORD_DTYPES:
        raise BadFormat(f"{path}: bad word width {m}")
    if layout_tag >= len(LAYOUTS):
        raise BadFormat(f"{path}: bad layout tag {layout_tag}")
    dims = (dn, dc, dh, dw)
    if any(d < 1 for d in dims):
        raise BadFormat(f"{path}: non-positive dimension in {dims}")
    count = int(np.prod(dims, dtype=np.int64))
    dtype = _WORD_DTYPES[m]
    want = HEADER_BYTES + count * dtype.itemsize
    if len(data) != want:
        raise BadFormat(f"{path}: expected {want} bytes for dims {dims}, got {len(data)}")
    words = np.frombuffer(data, dtype=dtype, offset=HEADER_BYTES)
    return TensorRecord(
        dims=dims, layout=LAYOUTS[layout_tag], m=m, data=words,
        network=network, layer=layer,
    )


@dataclass(frozen=True)
class ManifestEntry:
    path: Path
    network: str
    layer: str
    m: int

    def load(self) -> TensorRecord:
        t = load_tensor(self.path, network=self.network, layer=self.layer)
        if t.m != self.m:
            raise BadFormat(f"{self.path}: manifest says m={self.m}, file has m={t.m}")
        return t


@dataclass
class CorpusManifest:
    entries: list[ManifestEntry] = field(default_factory=list)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)


def load_manifest(path) -> CorpusManifest:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise BadFormat(f"{path}: not valid JSON: {e}") from None
    if not isinstance(raw, list):
        raise BadFormat(f"{path}: manifest must be a JSON array")
    entries = []
    for i, item in enumerate(raw):
        try:
            p = Path(item["path"])
            if not p.is_absolute():
                p = path.parent / p
            entries.append(
                ManifestEntry(
                    path=p,
                    network=str(item.get("network", "")),
                    layer=str(item.get("layer", "")),
                    m=int(item["m"]),
                )
            )
        except (KeyError, TypeError, ValueError) as e:
            raise BadFormat(f"{path}: entry {i} malformed: {e}") from None
    missing = [str(e.path) for e in entries if not e.path.is_file()]
    if missing:
        raise BadFormat(f"{path}: missing tensor files: {', '.join(missing)}")
    return CorpusManifest(entries)


def save_manifest(manifest: CorpusManifest, path) -> None:
    path = Path(path)
    rows = []
    for e in manifest:
        p = e.path
        try:
            p = p.relative_to(path.parent)
        except ValueError:
            pass
        rows.append({"path": str(p), "network": e.network, "layer": e.layer, "m": e.m})
    path.write_text(json.dumps(rows, indent=2) + "\n")
