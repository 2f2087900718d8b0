"""Exception types shared by the codecs and file formats."""


class CodecError(Exception):
    """Base class for all decode/format failures."""


class EndOfStream(CodecError):
    """A read ran past the declared end of the bit payload."""


class CorruptBlock(CodecError):
    """A decoded block is internally inconsistent (bad symbol, bad run,
    position out of range, or a reconstructed word out of range)."""


class DecodeOverrun(CodecError):
    """A decoded zero burst would extend past the declared element count."""


class TrailingBits(CodecError):
    """Decoding finished but the payload declares more bits than were consumed."""


class CountMismatch(CodecError):
    """The number of decoded elements does not match the container header."""


class BadFormat(CodecError):
    """A container or tensor file failed header/structure validation."""
