# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled byte-scanning kernels.

Mirror of u8tok._scan_py with single-pass C loops; see that module for the
classification and resynchronization policy. Kind codes are duplicated as
an enum here and must stay in sync with _scan_py.
"""

cdef enum:
    INVALID_LEADING = 0
    TRUNCATED = 1
    INVALID_CONTINUATION = 2
    OVERLONG_OR_OUT_OF_RANGE = 3
    RARE_LEADING = 4


def utf8_scan(data):
    """Scan ``data`` and return (offset, kind_code, byte_value) triples."""
    cdef const unsigned char[:] b
    cdef Py_ssize_t n, i, j, stop
    cdef int c, d, e, need, lo, hi, k, ok
    out = []
    if len(data) == 0:
        return out
    b = data
    n = b.shape[0]
    i = 0
    while i < n:
        c = b[i]
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
        if c == 0xC2 or c == 0xC3 or c == 0xF1 or c == 0xF2 or c == 0xF4:
            out.append((i, RARE_LEADING, c))
        if c <= 0xDF:
            need = 1
        elif c <= 0xEF:
            need = 2
        else:
            need = 3
        lo = 0x80
        hi = 0xBF
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
        d = b[i + 1]
        if not (0x80 <= d <= 0xBF):
            out.append((i + 1, INVALID_CONTINUATION, d))
            i += 1
            continue
        if not (lo <= d <= hi):
            out.append((i, OVERLONG_OR_OUT_OF_RANGE, c))
            j = i + 1
            stop = i + 1 + need
            if stop > n:
                stop = n
            while j < stop and 0x80 <= b[j] <= 0xBF:
                j += 1
            i = j
            continue
        k = 2
        ok = 1
        while k <= need:
            if i + k >= n:
                out.append((i, TRUNCATED, c))
                i = n
                ok = 0
                break
            e = b[i + k]
            if not (0x80 <= e <= 0xBF):
                out.append((i + k, INVALID_CONTINUATION, e))
                i = i + k
                ok = 0
                break
            k += 1
        if ok:
            i += need + 1
    return out


def control_positions(data):
    """Offsets of all bytes that carry span semantics, in stream order."""
    cdef const unsigned char[:] b
    cdef Py_ssize_t n, i
    cdef int c
    out = []
    if len(data) == 0:
        return out
    b = data
    n = b.shape[0]
    for i in range(n):
        c = b[i]
        if c > 0x1B:
            continue
        if c <= 0x03 or c == 0x05 or c == 0x06 or c == 0x0E or c == 0x0F \
                or c == 0x17 or c == 0x1A or c == 0x1B:
            out.append((i, c))
    return out


def first_forbidden(data):
    """Offset of the first protocol-reserved byte, or -1 if there is none."""
    cdef const unsigned char[:] b
    cdef Py_ssize_t n, i
    cdef int c
    if len(data) == 0:
        return -1
    b = data
    n = b.shape[0]
    for i in range(n):
        c = b[i]
        if c == 0x7F or (c <= 0x1F and not (0x09 <= c <= 0x0D)):
            return i
    return -1
