"""Repurposed C0 control bytes: constants, wrapping, span parsing, safety.

The protocol assigns twelve C0 bytes a structural role; the whitespace run
0x09-0x0D stays ordinary text and the remaining C0 positions are left
unassigned (they pass through span parsing as text, but ``sanitize`` still
flags them because they do not belong in natural-language content).

Span grammar, frozen here because streams need one:

* string may contain messages and text
* message may contain attention blocks, thinking spans and text, and may
  carry a heading (role bytes terminated by LF) at the start of its body
* thinking may contain tool calls and text
* attention and tool_call contain only text
* padding (0x00) is recognized only as a trailing run at the top level

``parse_spans`` returns a :class:`SpanTree` whose root is a synthetic
container, since a stream may hold several top-level spans or none at all.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum, IntEnum
import re

from . import kernels
from .core import TokenBuffer, as_bytes
from .errors import ControlByteError, SpanError

LF = 0x0A


class ControlToken(IntEnum):
    """The C0 bytes this protocol repurposes; value is the byte itself."""

    NUL = 0
    SOH = 1
    STX = 2
    ETX = 3
    ENQ = 5
    ACK = 6
    SO = 14
    SI = 15
    DC1 = 17
    ETB = 23
    SUB = 26
    ESC = 27

    @property
    def byte_value(self) -> int:
        return int(self)

    @property
    def abbr(self) -> str:
        return self.name

    @property
    def role(self) -> str:
        return _ROLES[int(self)]


_ROLES = {
    0: "Padding",
    1: "Begin message block",
    2: "Beginning of string",
    3: "End of string",
    5: "Begin thinking",
    6: "End thinking",
    14: "Begin attention block",
    15: "End attention block",
    17: "Tool Definition",
    23: "End of message block",
    26: "Begin tool calling",
    27: "End tool calling",
}


class SpanKind(Enum):
    ROOT = "root"
    STRING = "string"
    MESSAGE = "message"
    THINKING = "thinking"
    ATTENTION = "attention"
    TOOL_CALL = "tool_call"
    TEXT = "text"


#: (open byte, close byte) per structural span kind.
SPAN_PAIRS: dict[SpanKind, tuple[int, int]] = {
    SpanKind.STRING: (ControlToken.STX, ControlToken.ETX),
    SpanKind.MESSAGE: (ControlToken.SOH, ControlToken.ETB),
    SpanKind.THINKING: (ControlToken.ENQ, ControlToken.ACK),
    SpanKind.ATTENTION: (ControlToken.SO, ControlToken.SI),
    SpanKind.TOOL_CALL: (ControlToken.SUB, ControlToken.ESC),
}

_OPEN_KIND = {int(o): k for k, (o, _) in SPAN_PAIRS.items()}
_CLOSE_KIND = {int(c): k for k, (_, c) in SPAN_PAIRS.items()}

# Which span kinds may open inside each container (text is allowed anywhere).
_ALLOWED_CHILDREN: dict[SpanKind, frozenset[SpanKind]] = {
    SpanKind.ROOT: frozenset(SPAN_PAIRS),
    SpanKind.STRING: frozenset({SpanKind.MESSAGE}),
    SpanKind.MESSAGE: frozenset({SpanKind.ATTENTION, SpanKind.THINKING}),
    SpanKind.THINKING: frozenset({SpanKind.TOOL_CALL}),
    SpanKind.ATTENTION: frozenset(),
    SpanKind.TOOL_CALL: frozenset(),
}

_FORBIDDEN_CHARS = re.compile("[\x00-\x08\x0e-\x1f\x7f]")
_STRIP_TABLE = {code: None for code in [*range(0x00, 0x09), *range(0x0E, 0x20), 0x7F]}


def special_ids() -> dict[str, int]:
    """The fixed special-token ID mapping (token IDs are the bytes)."""
    return {
        "pad": 0,
        "bos": 2,
        "eos": 3,
        "message_open": 1,
        "message_close": 23,
        "think_open": 5,
        "think_close": 6,
        "attn_open": 14,
        "attn_close": 15,
        "tool_def": 17,
        "tool_open": 26,
        "tool_close": 27,
    }


@dataclass
class Span:
    """One node of the parsed structure.

    ``start``/``end`` are byte offsets into the source stream; for
    structural spans they include the delimiters, for text leaves they
    cover the raw bytes. ``heading`` holds the LF-terminated role bytes of
    a message span (None when the message body has no heading).
    """

    kind: SpanKind
    start: int
    end: int
    children: list["Span"] = field(default_factory=list)
    heading: bytes | None = None


@dataclass
class SpanTree:
    """Parse result: the source stream, a synthetic root, trailing padding."""

    source: bytes
    root: Span
    pad_count: int = 0

    def bytes_of(self, span: Span) -> bytes:
        return self.source[span.start : span.end]

    def interior_of(self, span: Span) -> bytes:
        """Bytes between a structural span's delimiters."""
        if span.kind in (SpanKind.TEXT, SpanKind.ROOT):
            return self.bytes_of(span)
        return self.source[span.start + 1 : span.end - 1]

    def walk(self):
        """All spans in document order, root included."""
        stack = [self.root]
        while stack:
            span = stack.pop()
            yield span
            stack.extend(reversed(span.children))

    def find_all(self, kind: SpanKind) -> list[Span]:
        return [s for s in self.walk() if s.kind is kind]

    def reconstruct(self) -> bytes:
        """Re-emit the stream from the tree; equals the source byte-for-byte."""
        out = bytearray()

        def emit(span: Span) -> None:
            if span.kind is SpanKind.TEXT:
                out.extend(self.source[span.start : span.end])
                return
            if span.kind is not SpanKind.ROOT:
                open_byte, _ = SPAN_PAIRS[span.kind]
                out.append(open_byte)
                if span.heading is not None:
                    out.extend(span.heading)
                    out.append(LF)
            for child in span.children:
                emit(child)
            if span.kind is not SpanKind.ROOT:
                _, close_byte = SPAN_PAIRS[span.kind]
                out.append(close_byte)

        emit(self.root)
        out.extend(b"\x00" * self.pad_count)
        return bytes(out)


def wrap(kind: SpanKind, content) -> TokenBuffer:
    """Enclose sanitized content in the delimiter pair for ``kind``.

    Content must already be free of protocol control bytes; offering an
    escape syntax would break the bytes-only contract, so a violation is a
    hard error naming the byte and offset.
    """
    if kind not in SPAN_PAIRS:
        raise ValueError(f"cannot wrap content in a {kind.value} span")
    data = as_bytes(content)
    bad = kernels.first_forbidden(data)
    if bad >= 0:
        raise ControlByteError(data[bad], bad)
    open_byte, close_byte = SPAN_PAIRS[kind]
    return bytes([open_byte]) + data + bytes([close_byte])


def sanitize(text: str, mode: str = "reject") -> str:
    """Check or clean text of protocol control bytes.

    ``reject`` raises on the first offending character; ``strip`` removes
    every offending character (idempotent). Whitespace 0x09-0x0D is never
    touched.
    """
    if mode == "strip":
        return text.translate(_STRIP_TABLE)
    if mode != "reject":
        raise ValueError(f"unknown sanitize mode: {mode!r}")
    m = _FORBIDDEN_CHARS.search(text)
    if m is not None:
        raise ControlByteError(ord(m.group()), m.start())
    return text


def parse_spans(tokens) -> SpanTree:
    """Parse a token stream into its span structure.

    Raises :class:`SpanError` for unbalanced pairs, close-before-open,
    nesting violations, and padding bytes anywhere but a trailing run.
    """
    data = as_bytes(tokens)
    body = data.rstrip(b"\x00")
    pad_count = len(data) - len(body)

    root = Span(SpanKind.ROOT, 0, len(data))
    stack = [root]
    pos = 0

    def flush_text(upto: int) -> None:
        if upto > pos:
            stack[-1].children.append(Span(SpanKind.TEXT, pos, upto))

    for offset, byte in kernels.control_positions(body):
        if byte == 0:
            raise SpanError("padding byte inside the stream", offset)
        if byte in _OPEN_KIND:
            kind = _OPEN_KIND[byte]
            parent = stack[-1]
            if kind not in _ALLOWED_CHILDREN[parent.kind]:
                raise SpanError(
                    f"{kind.value} span may not open inside {parent.kind.value}",
                    offset,
                )
            flush_text(offset)
            stack.append(Span(kind, offset, -1))
        else:
            kind = _CLOSE_KIND[byte]
            top = stack[-1]
            if top.kind is SpanKind.ROOT:
                raise SpanError(f"close of {kind.value} with no open span", offset)
            if top.kind is not kind:
                raise SpanError(
                    f"unclosed {top.kind.value} span from offset {top.start}: "
                    f"expected its closer, found close of {kind.value}",
                    top.start,
                )
            flush_text(offset)
            top.end = offset + 1
            stack.pop()
            stack[-1].children.append(top)
        pos = offset + 1

    if len(stack) > 1:
        top = stack[-1]
        raise SpanError(f"unclosed {top.kind.value} span", top.start)
    flush_text(len(body))

    tree = SpanTree(source=data, root=root, pad_count=pad_count)
    for span in tree.find_all(SpanKind.MESSAGE):
        _extract_heading(data, span)
    return tree


def _extract_heading(data: bytes, message: Span) -> None:
    """Split ``role LF`` off the front of a message span's first text run."""
    if not message.children:
        return
    first = message.children[0]
    if first.kind is not SpanKind.TEXT:
        return
    cut = data.find(LF, first.start, first.end)
    if cut < 0:
        return
    message.heading = data[first.start : cut]
    if cut + 1 == first.end:
        message.children.pop(0)
    else:
        first.start = cut + 1


def filter_spans(tokens, kinds) -> TokenBuffer:
    """Remove every span of the given kinds, delimiters included."""
    kinds = set(kinds)
    if SpanKind.ROOT in kinds:
        raise ValueError("cannot filter the root container")
    tree = parse_spans(tokens)

    removed: list[tuple[int, int]] = []

    def collect(span: Span) -> None:
        for child in span.children:
            if child.kind in kinds:
                removed.append((child.start, child.end))
            else:
                collect(child)

    collect(tree.root)

    out = bytearray()
    prev = 0
    for start, end in removed:
        out.extend(tree.source[prev:start])
        prev = end
    out.extend(tree.source[prev:])
    return bytes(out)


def attention_segments(tokens) -> list[tuple[int, int]]:
    """Byte ranges of attention-block interiors, disjoint and in order.

    Callers building prefix-LM or bidirectional masks can mark these ranges
    for full self-attention.
    """
    tree = parse_spans(tokens)
    return [
        (span.start + 1, span.end - 1) for span in tree.find_all(SpanKind.ATTENTION)
    ]
