"""Exception types shared across the package.

Every error that corresponds to malformed *data* (as opposed to misuse of
the API) derives from TokenizerError and carries a machine-readable
``kind`` plus, where meaningful, an ``offset`` into the offending input.
The CLI exposes both fields verbatim so that scripts and foreign-language
wrappers can recover them without parsing prose.
"""

from __future__ import annotations


class TokenizerError(ValueError):
    """Base class for all data errors raised by this package."""

    kind = "error"
    offset: int | None = None


class Utf8DecodeError(TokenizerError):
    """Raised by strict detokenization when the bytes are not valid UTF-8.

    ``diagnostic`` is the first validation diagnostic for the stream; its
    kind (e.g. ``invalid-leading-byte``) is mirrored on the exception.
    """

    def __init__(self, diagnostic):
        self.diagnostic = diagnostic
        self.kind = diagnostic.kind
        self.offset = diagnostic.offset
        super().__init__(
            f"invalid UTF-8: {diagnostic.kind} at offset {diagnostic.offset} "
            f"(byte 0x{diagnostic.byte_value:02x})"
        )


class ControlByteError(TokenizerError):
    """Content contains a control byte that the protocol reserves."""

    kind = "control-byte"

    def __init__(self, byte_value: int, offset: int):
        self.byte_value = byte_value
        self.offset = offset
        super().__init__(
            f"reserved control byte 0x{byte_value:02x} at offset {offset}"
        )


class SpanError(TokenizerError):
    """A token stream violates the span structure rules."""

    kind = "span-structure"

    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} (offset {offset})")


class ChatError(TokenizerError):
    """A conversation or rendered chat stream violates the chat grammar."""

    kind = "chat-format"

    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (offset {offset})"
        super().__init__(message)
