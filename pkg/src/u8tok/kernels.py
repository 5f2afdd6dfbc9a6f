"""Kernel selection: compiled extension if available, pure Python otherwise.

Set ``U8TOK_PURE=1`` in the environment to force the fallback (useful for
benchmarking the two implementations against each other; ``u8tok bench``
does exactly that).
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _scan_py


def load(pure: bool = False) -> ModuleType:
    """Return the requested kernel module, or the fallback if unavailable."""
    if not pure:
        try:
            from . import _scan  # type: ignore[attr-defined]

            return _scan
        except ImportError:
            pass
    return _scan_py


_impl = load(pure=bool(os.environ.get("U8TOK_PURE")))

HAVE_EXTENSION = _impl is not _scan_py
IMPLEMENTATION = "cython" if HAVE_EXTENSION else "python"

utf8_scan = _impl.utf8_scan
control_positions = _impl.control_positions
first_forbidden = _impl.first_forbidden
