"""Lossless streaming compression for sparse fixed-point tensor data.

The main codec splits a word stream into a zero/non-zero flag stream
(run-length coded) and a stream of non-zero values (block bit-plane
coded), interleaved into a single bitstream. Baseline codecs, a tensor
file format, and a compression-ratio analysis harness ride along.
"""

from .baselines import (
    raw_bpc_compress,
    raw_bpc_decompress,
    raw_bpc_size_bits,
    zero_rle_only_compress,
    zero_rle_only_decompress,
    zero_rle_only_size_bits,
    zvc_compress,
    zvc_decompress,
    zvc_size_bits,
)
from .bitstream import BitReader, BitWriter
from .bpc import (
    BpcBlock,
    BpcParams,
    PlaneSet,
    block_size_bits,
    decode_block,
    decode_plane_symbols,
    delta_transform,
    encode_block,
    encode_plane_symbols,
    inverse_delta,
    plane_transform,
)
from .codec import (
    EbpcParams,
    StreamingEncoder,
    compress,
    compressed_size_bits,
    decompress,
    floats_to_words,
    words_to_floats,
)
from .container import (
    DTYPE_FLOAT_BITS,
    DTYPE_UINT,
    METHOD_BPC,
    METHOD_EBPC,
    METHOD_ZERO_RLE,
    METHOD_ZVC,
    CompressedStream,
)
from .corpus import (
    LAYOUTS,
    CorpusManifest,
    ManifestEntry,
    TensorRecord,
    load_manifest,
    load_tensor,
    permute_layout,
    save_manifest,
    store_tensor,
)
from .errors import (
    BadFormat,
    CodecError,
    CorruptBlock,
    CountMismatch,
    DecodeOverrun,
    EndOfStream,
    TrailingBits,
)
from .zero_rle import RleParams, decode_flags, encode_flags, encoded_size_bits

__version__ = "0.1.0"

__all__ = [
    "BitReader",
    "BitWriter",
    "RleParams",
    "encode_flags",
    "decode_flags",
    "encoded_size_bits",
    "BpcParams",
    "BpcBlock",
    "PlaneSet",
    "delta_transform",
    "inverse_delta",
    "plane_transform",
    "encode_plane_symbols",
    "decode_plane_symbols",
    "encode_block",
    "decode_block",
    "block_size_bits",
    "EbpcParams",
    "StreamingEncoder",
    "compress",
    "decompress",
    "compressed_size_bits",
    "floats_to_words",
    "words_to_floats",
    "CompressedStream",
    "DTYPE_UINT",
    "DTYPE_FLOAT_BITS",
    "METHOD_EBPC",
    "METHOD_ZVC",
    "METHOD_ZERO_RLE",
    "METHOD_BPC",
    "zvc_compress",
    "zvc_decompress",
    "zvc_size_bits",
    "zero_rle_only_compress",
    "zero_rle_only_decompress",
    "zero_rle_only_size_bits",
    "raw_bpc_compress",
    "raw_bpc_decompress",
    "raw_bpc_size_bits",
    "TensorRecord",
    "LAYOUTS",
    "permute_layout",
    "load_tensor",
    "store_tensor",
    "CorpusManifest",
    "ManifestEntry",
    "load_manifest",
    "save_manifest",
    "CodecError",
    "EndOfStream",
    "CorruptBlock",
    "DecodeOverrun",
    "TrailingBits",
    "CountMismatch",
    "BadFormat",
]
