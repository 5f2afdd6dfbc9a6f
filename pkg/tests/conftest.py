"""Shared test helpers: independent oracles and seeded generators."""

from __future__ import annotations

import random

from u8tok import Conversation, Message, Part

# Code-point ranges sampled by the fuzz generators; chosen to cover every
# UTF-8 encoded length, combining marks, several scripts, emoji and the
# top of the last plane. None of them touch the surrogate block.
INTERESTING_RANGES = (
    (0x0009, 0x000D),  # whitespace controls, ordinary text
    (0x0020, 0x007E),  # ASCII
    (0x00A0, 0x02FF),  # Latin supplements, two-byte
    (0x0300, 0x036F),  # combining marks
    (0x0370, 0x04FF),  # Greek, Cyrillic
    (0x0590, 0x06FF),  # Hebrew, Arabic
    (0x0900, 0x097F),  # Devanagari
    (0x2000, 0x206F),  # punctuation
    (0x4E00, 0x9FFF),  # CJK
    (0xAC00, 0xD7A3),  # Hangul
    (0xE000, 0xF8FF),  # private use
    (0xFB00, 0xFB4F),  # ligatures
    (0x1F300, 0x1F9FF),  # emoji, four-byte
    (0x20000, 0x2A6DF),  # CJK extension B
    (0x10FF80, 0x10FFFD),  # end of the codespace
)


def reference_utf8_encode(text: str) -> list[int]:
    """Independent UTF-8 encoder built from the bit layout of the format."""
    out: list[int] = []
    for ch in text:
        cp = ord(ch)
        if cp < 0x80:
            out.append(cp)
        elif cp < 0x800:
            out.append(0xC0 | cp >> 6)
            out.append(0x80 | cp & 0x3F)
        elif cp < 0x10000:
            out.append(0xE0 | cp >> 12)
            out.append(0x80 | (cp >> 6) & 0x3F)
            out.append(0x80 | cp & 0x3F)
        else:
            out.append(0xF0 | cp >> 18)
            out.append(0x80 | (cp >> 12) & 0x3F)
            out.append(0x80 | (cp >> 6) & 0x3F)
            out.append(0x80 | cp & 0x3F)
    return out


def random_text(rng: random.Random, max_len: int = 48) -> str:
    chars = []
    for _ in range(rng.randrange(max_len + 1)):
        lo, hi = rng.choice(INTERESTING_RANGES)
        chars.append(chr(rng.randint(lo, hi)))
    return "".join(chars)


def random_texts(seed: int, count: int, max_len: int = 48) -> list[str]:
    rng = random.Random(seed)
    return [random_text(rng, max_len) for _ in range(count)]


_ROLES = ("system", "user", "assistant", "tool", "developer")


def _content_text(rng: random.Random) -> str:
    text = random_text(rng, max_len=24)
    return text or "x"


def _plain_or_calls(rng: random.Random) -> list[Part]:
    """Nested thinking content: no two adjacent plain parts, no empty plain."""
    parts: list[Part] = []
    prev_plain = False
    for _ in range(rng.randrange(4)):
        if prev_plain or rng.random() < 0.4:
            parts.append(Part.tool_call(_content_text(rng)))
            prev_plain = False
        else:
            parts.append(Part.plain(_content_text(rng)))
            prev_plain = True
    return parts


def _body_parts(rng: random.Random) -> tuple[Part, ...]:
    parts: list[Part] = []
    prev_plain = False
    for _ in range(rng.randrange(5)):
        if prev_plain or rng.random() < 0.4:
            parts.append(Part.thinking(*_plain_or_calls(rng)))
            prev_plain = False
        else:
            parts.append(Part.plain(_content_text(rng)))
            prev_plain = True
    return tuple(parts)


def random_conversation(rng: random.Random) -> Conversation:
    """A canonical conversation: renders and parses back to itself exactly.

    Canonical means no empty plain parts and no two adjacent plain parts
    (rendering would merge them), plus pad_to either absent or strictly
    longer than the rendered stream.
    """
    from u8tok import apply_chat_template

    messages = []
    for _ in range(rng.randint(1, 4)):
        role = rng.choice(_ROLES)
        default_wrap = role != "assistant"
        # An explicit flag equal to the default parses back as None, so
        # canonical conversations only carry the non-default override.
        attention = None if rng.random() < 0.7 else not default_wrap
        wraps = attention if attention is not None else default_wrap
        if wraps:
            parts = () if rng.random() < 0.2 else (Part.plain(_content_text(rng)),)
        else:
            parts = _body_parts(rng)
        messages.append(Message(role=role, parts=parts, attention=attention))
    conv = Conversation(messages=tuple(messages))
    if rng.random() < 0.4:
        rendered = len(apply_chat_template(conv))
        conv = Conversation(messages=conv.messages, pad_to=rendered + rng.randint(1, 8))
    return conv


def random_conversations(seed: int, count: int) -> list[Conversation]:
    rng = random.Random(seed)
    return [random_conversation(rng) for _ in range(count)]


def golden_conversation() -> Conversation:
    """The worked three-message calculator conversation."""
    return Conversation(
        messages=(
            Message("system", (Part.plain("You are a helpful assistant"),)),
            Message("user", (Part.plain("How much is 1+2?"),)),
            Message(
                "assistant",
                (
                    Part.plain("First I'll think about it.\n"),
                    Part.thinking(
                        Part.plain(
                            "The user wants me to calculate, I should\n"
                            "call the calculator "
                        ),
                        Part.tool_call('{"type": "calculator",\n"expression": "1+2"}'),
                        Part.plain("3"),
                    ),
                    Part.plain("\n1 + 2 = 3"),
                ),
            ),
        ),
    )


def golden_stream() -> bytes:
    """The calculator conversation's byte stream, assembled by hand.

    Deliberately built with explicit literals rather than the renderer so
    that renderer bugs cannot hide.
    """
    return (
        b"\x02"
        b"\x01system\n"
        b"\x0eYou are a helpful assistant\x0f"
        b"\x17"
        b"\x01user\n"
        b"\x0eHow much is 1+2?\x0f"
        b"\x17"
        b"\x01assistant\n"
        b"First I'll think about it.\n"
        b"\x05"
        b"The user wants me to calculate, I should\ncall the calculator "
        b"\x1a"
        b'{"type": "calculator",\n"expression": "1+2"}'
        b"\x1b"
        b"3"
        b"\x06"
        b"\n1 + 2 = 3"
        b"\x17"
        b"\x03"
    )
