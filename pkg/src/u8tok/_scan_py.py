"""Pure-Python byte-scanning kernels.

This module is the portable fallback for the compiled ``u8tok._scan``
extension; both expose the same three functions and must agree byte for
byte (the test suite fuzzes them against each other).

``utf8_scan`` classifies ill-formed UTF-8 instead of merely rejecting it.
The classification and resynchronization policy is fixed as follows:

* 0xC0, 0xC1 and 0xF5-0xFF can never start a sequence -> invalid-leading-byte,
  resume at the next byte.
* A continuation byte (0x80-0xBF) outside a sequence -> invalid-continuation
  at its own offset, resume at the next byte.
* A sequence whose lead is valid but which runs off the end of the input ->
  truncated-sequence reported at the lead's offset with the lead's value.
* A required continuation position holding a non-continuation byte ->
  invalid-continuation at that position, resume AT that byte (it may itself
  start a valid sequence).
* A continuation byte that is in 0x80-0xBF but outside the restricted range
  of the first continuation (overlong forms, UTF-16 surrogates, code points
  above U+10FFFF) -> overlong-or-out-of-range at the lead's offset; the lead
  and the run of continuation bytes it would have claimed are consumed as one
  ill-formed unit.
* Leads 0xC2, 0xC3, 0xF1, 0xF2, 0xF4 are valid but nearly unseen in real
  corpora; they get an advisory rare-leading-byte entry in addition to normal
  processing.

The hard guarantee, fuzzed in the tests: the scan reports at least one
non-advisory entry if and only if ``bytes.decode("utf-8")`` would fail.
"""

from __future__ import annotations

import re

# Diagnostic kind codes. The Cython kernel hard-codes the same numbers; keep
# the two in sync.
INVALID_LEADING = 0
TRUNCATED = 1
INVALID_CONTINUATION = 2
OVERLONG_OR_OUT_OF_RANGE = 3
RARE_LEADING = 4

KIND_NAMES = (
    "invalid-leading-byte",
    "truncated-sequence",
    "invalid-continuation",
    "overlong-or-out-of-range",
    "rare-leading-byte",
)

_RARE_LEADS = frozenset((0xC2, 0xC3, 0xF1, 0xF2, 0xF4))

# C0 bytes with span semantics (NUL, SOH, STX, ETX, ENQ, ACK, SO, SI, ETB,
# SUB, ESC). DC1 (0x11) is a bare constant with no span role and the
# whitespace bytes 0x09-0x0D are ordinary text, so neither appears here.
_STRUCTURAL = re.compile(rb"[\x00-\x03\x05\x06\x0e\x0f\x17\x1a\x1b]")

# Bytes that may never occur in span/message content: all of C0 except the
# whitespace run 0x09-0x0D, plus DEL.
_FORBIDDEN = re.compile(rb"[\x00-\x08\x0e-\x1f\x7f]")


def utf8_scan(data: bytes) -> list[tuple[int, int, int]]:
    """Scan ``data`` and return (offset, kind_code, byte_value) triples."""
    out: list[tuple[int, int, int]] = []
    n = len(data)
    i = 0
    while i < n:
        c = data[i]
        if c < 0x80:
            i += 1
            continue
        if c <= 0xBF:
            out.append((i, INVALID_CONTINUATION, c))
            i += 1
            continue
        if c <= 0xC1 or c >= 0xF5:
            out.append((i, INVALID_LEADING, c))
            i += 1
            continue
        if c in _RARE_LEADS:
            out.append((i, RARE_LEADING, c))
        if c <= 0xDF:
            need = 1
        elif c <= 0xEF:
            need = 2
        else:
            need = 3
        lo, hi = 0x80, 0xBF
        if c == 0xE0:
            lo = 0xA0
        elif c == 0xED:
            hi = 0x9F
        elif c == 0xF0:
            lo = 0x90
        elif c == 0xF4:
            hi = 0x8F
        if i + 1 >= n:
            out.append((i, TRUNCATED, c))
            break
        d = data[i + 1]
        if not 0x80 <= d <= 0xBF:
            out.append((i + 1, INVALID_CONTINUATION, d))
            i += 1
            continue
        if not lo <= d <= hi:
            out.append((i, OVERLONG_OR_OUT_OF_RANGE, c))
            j = i + 1
            stop = min(i + 1 + need, n)
            while j < stop and 0x80 <= data[j] <= 0xBF:
                j += 1
            i = j
            continue
        k = 2
        ok = True
        while k <= need:
            if i + k >= n:
                out.append((i, TRUNCATED, c))
                i = n
                ok = False
                break
            e = data[i + k]
            if not 0x80 <= e <= 0xBF:
                out.append((i + k, INVALID_CONTINUATION, e))
                i = i + k
                ok = False
                break
            k += 1
        if ok:
            i += need + 1
    return out


def control_positions(data: bytes) -> list[tuple[int, int]]:
    """Offsets of all bytes that carry span semantics, in stream order."""
    return [(m.start(), m.group()[0]) for m in _STRUCTURAL.finditer(data)]


def first_forbidden(data: bytes) -> int:
    """Offset of the first protocol-reserved byte, or -1 if there is none."""
    m = _FORBIDDEN.search(data)
    return -1 if m is None else m.start()
