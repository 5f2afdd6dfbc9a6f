"""Display control bytes legibly without touching the underlying stream.

Rendering swaps each C0 code point for its Unicode Control Picture
(U+2400 + code, DEL to U+2421) so logs and data reviews stay readable.
Whitespace controls 0x09-0x0D are ordinary text and stay as-is unless
explicitly requested. This is display-only output; nothing in the package
consumes it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import as_bytes

_ABBRS = (
    "NUL SOH STX ETX EOT ENQ ACK BEL BS HT LF VT FF CR SO SI DLE DC1 DC2 DC3 "
    "DC4 NAK SYN ETB CAN EM SUB ESC FS GS RS US"
).split()

_WHITESPACE = range(0x09, 0x0E)


@dataclass(frozen=True)
class RenderOptions:
    """show_whitespace also pictures 0x09-0x0D; annotate appends mnemonics."""

    show_whitespace: bool = False
    annotate: bool = False


def visualize_control_tokens(data, options: RenderOptions | None = None) -> str:
    """Render text (or a token buffer) with control pictures.

    Accepts either a string or raw tokens; token buffers that are not
    valid UTF-8 do not fail, since the point is debugging broken streams:
    undecodable bytes come out as ⟨0xHH⟩ escapes.
    """
    opts = options or RenderOptions()
    if not isinstance(data, str):
        data = _decode_lossy(as_bytes(data))
    return data.translate(_table(opts))


def _table(opts: RenderOptions) -> dict[int, str]:
    table: dict[int, str] = {}
    for code in range(0x20):
        if code in _WHITESPACE and not opts.show_whitespace:
            continue
        table[code] = _picture(code, opts.annotate)
    table[0x7F] = _picture(0x7F, opts.annotate)
    return table


def _picture(code: int, annotate: bool) -> str:
    glyph = chr(0x2421) if code == 0x7F else chr(0x2400 + code)
    if annotate:
        abbr = "DEL" if code == 0x7F else _ABBRS[code]
        return f"{glyph}({abbr})"
    return glyph


def _decode_lossy(data: bytes) -> str:
    """Decode valid UTF-8 runs, hex-escape everything else."""
    pieces = []
    pos = 0
    while pos < len(data):
        try:
            pieces.append(data[pos:].decode("utf-8"))
            break
        except UnicodeDecodeError as exc:
            pieces.append(data[pos : pos + exc.start].decode("utf-8"))
            for byte in data[pos + exc.start : pos + exc.end]:
                pieces.append(f"⟨0x{byte:02X}⟩")
            pos += exc.end
    return "".join(pieces)
