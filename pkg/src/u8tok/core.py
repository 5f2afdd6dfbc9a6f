"""Exact, reversible mapping between text and its UTF-8 byte values.

Token IDs *are* the bytes: ``tokenize`` returns the UTF-8 encoding of the
input with one token per byte, and ``detokenize`` is its inverse. There is
no normalization, no pretokenization, no learned vocabulary and no token ID
outside [0, 255], ever.

A token buffer is a plain ``bytes`` object. That representation already
guarantees the core contracts: every element is in [0, 255], storage is
exactly one byte per token, and ``as_array`` gives a zero-copy ``uint8``
view for array frameworks. Serialized form is the raw byte stream itself,
with no header.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

from . import kernels
from ._scan_py import KIND_NAMES, RARE_LEADING
from .errors import Utf8DecodeError

if TYPE_CHECKING:
    import numpy as np

#: A token buffer is just bytes; the alias documents intent in signatures.
TokenBuffer = bytes

#: Byte used to pad batches; positions holding it beyond a sequence's
#: original length are masked out.
PAD_BYTE = 0x00


@dataclass(frozen=True)
class Utf8Diagnostic:
    """One finding from UTF-8 validation.

    ``advisory`` entries flag rare-but-valid leading bytes (0xC2, 0xC3,
    0xF1, 0xF2, 0xF4); they do not make the stream invalid. All other kinds
    are hard errors.
    """

    offset: int
    kind: str
    byte_value: int
    advisory: bool = False


@dataclass(frozen=True)
class BatchEncoding:
    """A right-padded batch of token sequences.

    ``tokens`` is a (batch, length) uint8 array, ``attention_mask`` a bool
    array of the same shape that is True exactly on real (unpadded)
    positions, and ``original_lengths`` the per-sequence token counts.
    """

    tokens: np.ndarray
    attention_mask: np.ndarray
    original_lengths: tuple[int, ...]

    def sequence(self, i: int) -> TokenBuffer:
        """The i-th sequence with padding stripped."""
        return self.tokens[i, : self.original_lengths[i]].tobytes()


def tokenize(text: str) -> TokenBuffer:
    """Map ``text`` to its UTF-8 bytes, one token per byte.

    The empty string maps to the empty buffer. Nothing is prepended or
    appended; wrapping with structural bytes is the caller's job.
    """
    return text.encode("utf-8")


def detokenize(tokens, policy: str = "strict") -> str:
    """Decode a token buffer back to text.

    ``strict`` (the default) raises :class:`Utf8DecodeError` carrying the
    first diagnostic if the bytes are not valid UTF-8; ``replace`` maps
    invalid subsequences to U+FFFD and never fails.
    """
    data = as_bytes(tokens)
    if policy == "replace":
        return data.decode("utf-8", errors="replace")
    if policy != "strict":
        raise ValueError(f"unknown decode policy: {policy!r}")
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError:
        errors = [d for d in validate_utf8(data) if not d.advisory]
        raise Utf8DecodeError(errors[0]) from None


def validate_utf8(tokens) -> list[Utf8Diagnostic]:
    """Scan a token buffer and report UTF-8 diagnostics sorted by offset.

    The non-advisory entries are empty if and only if the buffer decodes as
    valid UTF-8. Advisory entries additionally flag valid leading bytes
    that almost never occur in natural text.
    """
    data = as_bytes(tokens)
    return [
        Utf8Diagnostic(offset, KIND_NAMES[code], byte, advisory=code == RARE_LEADING)
        for offset, code, byte in kernels.utf8_scan(data)
    ]


def batch_encode(texts: Sequence[str], pad_to: int | None = None) -> BatchEncoding:
    """Tokenize ``texts`` and right-pad them to a common length with 0x00.

    ``pad_to`` forces the padded length; it must be at least the longest
    encoded sequence.
    """
    import numpy as np

    buffers = [tokenize(t) for t in texts]
    lengths = tuple(len(b) for b in buffers)
    width = max(lengths, default=0)
    if pad_to is not None:
        if pad_to < width:
            raise ValueError(
                f"pad_to={pad_to} is shorter than the longest sequence ({width})"
            )
        width = pad_to
    tokens = np.zeros((len(buffers), width), dtype=np.uint8)
    mask = np.zeros((len(buffers), width), dtype=bool)
    for i, buf in enumerate(buffers):
        tokens[i, : len(buf)] = np.frombuffer(buf, dtype=np.uint8)
        mask[i, : len(buf)] = True
    return BatchEncoding(tokens=tokens, attention_mask=mask, original_lengths=lengths)


def as_bytes(tokens) -> bytes:
    """Coerce any byte-like or iterable-of-int token source to ``bytes``."""
    if isinstance(tokens, bytes):
        return tokens
    if isinstance(tokens, (bytearray, memoryview)):
        return bytes(tokens)
    if hasattr(tokens, "tobytes"):  # numpy arrays and friends
        return tokens.tobytes()
    return bytes(tokens)


def as_array(tokens: TokenBuffer):
    """Zero-copy uint8 view of a token buffer (read-only, 1 byte/token)."""
    import numpy as np

    return np.frombuffer(tokens, dtype=np.uint8)


def read_tokens(path) -> TokenBuffer:
    """Load a token buffer from a raw binary file (the file is the stream)."""
    with open(path, "rb") as fh:
        return fh.read()


def write_tokens(path, tokens) -> None:
    """Write a token buffer as a raw binary file with no header."""
    with open(path, "wb") as fh:
        fh.write(as_bytes(tokens))
