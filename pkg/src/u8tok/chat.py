"""Render structured conversations to byte streams and parse them back.

Layout of a rendered conversation::

    <STX>
      <SOH> role LF body <ETB>     (one block per message)
    <ETX> <NUL>*                   (padding only when pad_to is given)

The body of a message defaults to an attention block (``<SO>`` text
``<SI>``) for every role except "assistant", whose parts are emitted
verbatim: plain text raw, thinking spans in ``<ENQ>``/``<ACK>`` with tool
calls nested in ``<SUB>``/``<ESC>``. A per-message ``attention`` override
is available; the role-based default matches the worked example this
grammar is frozen from. Tool calls may only appear inside thinking spans,
attention-wrapped bodies must be pure plain text, and the role heading is
terminated by a single LF.
"""

from __future__ import annotations

from dataclasses import dataclass

from .control import LF, SpanKind, parse_spans, sanitize
from .core import TokenBuffer, as_bytes
from .errors import ChatError

PLAIN = "plain"
THINKING = "thinking"
TOOL_CALL = "tool_call"

_PART_KINDS = (PLAIN, THINKING, TOOL_CALL)


@dataclass(frozen=True)
class Part:
    """One piece of message content.

    ``text`` carries the payload of plain and tool_call parts; thinking
    parts hold nested plain/tool_call parts instead and keep ``text``
    empty.
    """

    kind: str
    text: str = ""
    parts: tuple["Part", ...] = ()

    def __post_init__(self):
        if self.kind not in _PART_KINDS:
            raise ChatError(f"unknown part kind: {self.kind!r}")
        if self.kind == THINKING:
            if self.text:
                raise ChatError("thinking parts hold nested parts, not text")
            for nested in self.parts:
                if nested.kind == THINKING:
                    raise ChatError("thinking spans do not nest")
        elif self.parts:
            raise ChatError(f"{self.kind} parts take no nested parts")

    @classmethod
    def plain(cls, text: str) -> "Part":
        return cls(PLAIN, text=text)

    @classmethod
    def thinking(cls, *parts: "Part") -> "Part":
        return cls(THINKING, parts=tuple(parts))

    @classmethod
    def tool_call(cls, payload: str) -> "Part":
        return cls(TOOL_CALL, text=payload)


@dataclass(frozen=True)
class Message:
    """A single turn: role plus ordered content parts.

    ``attention`` overrides the role-based default for wrapping the body in
    an attention block (None means: wrap unless the role is "assistant").
    """

    role: str
    parts: tuple[Part, ...] = ()
    attention: bool | None = None

    def wraps_attention(self) -> bool:
        if self.attention is not None:
            return self.attention
        return self.role != "assistant"


@dataclass(frozen=True)
class Conversation:
    messages: tuple[Message, ...] = ()
    pad_to: int | None = None


def apply_chat_template(conv: Conversation) -> TokenBuffer:
    """Render a conversation to its exact byte layout.

    All text fields must be free of protocol control bytes; violations
    raise rather than silently escaping, since no escape syntax exists in
    a bytes-only stream.
    """
    if not conv.messages:
        raise ChatError("empty conversation")
    out = bytearray()
    out.append(0x02)
    for message in conv.messages:
        _check_role(message.role)
        out.append(0x01)
        out.extend(message.role.encode("ascii"))
        out.append(LF)
        if message.wraps_attention():
            out.append(0x0E)
            for part in message.parts:
                if part.kind != PLAIN:
                    raise ChatError(
                        "attention-wrapped messages may hold only plain text; "
                        f"got a {part.kind} part in role {message.role!r}"
                    )
                out.extend(sanitize(part.text).encode("utf-8"))
            out.append(0x0F)
        else:
            for part in message.parts:
                _render_part(out, part)
        out.append(0x17)
    out.append(0x03)
    if conv.pad_to is not None:
        if conv.pad_to < len(out):
            raise ChatError(
                f"pad_to={conv.pad_to} is shorter than the rendered "
                f"length ({len(out)})"
            )
        out.extend(b"\x00" * (conv.pad_to - len(out)))
    return bytes(out)


def _render_part(out: bytearray, part: Part) -> None:
    if part.kind == PLAIN:
        out.extend(sanitize(part.text).encode("utf-8"))
    elif part.kind == TOOL_CALL:
        raise ChatError("tool calls must be nested inside a thinking span")
    else:
        out.append(0x05)
        for nested in part.parts:
            if nested.kind == PLAIN:
                out.extend(sanitize(nested.text).encode("utf-8"))
            else:
                out.append(0x1A)
                out.extend(sanitize(nested.text).encode("utf-8"))
                out.append(0x1B)
        out.append(0x06)


def _check_role(role: str) -> None:
    if not role:
        raise ChatError("message role must be non-empty")
    if not role.isascii():
        raise ChatError(f"message role must be ASCII: {role!r}")
    if "\n" in role:
        raise ChatError(f"message role may not contain a newline: {role!r}")
    sanitize(role)


def parse_chat(tokens) -> Conversation:
    """Parse a rendered chat stream back into a conversation.

    Inverse of :func:`apply_chat_template` on everything that function can
    produce; trailing padding is recovered into ``pad_to``.
    """
    data = as_bytes(tokens)
    tree = parse_spans(data)
    top = tree.root.children
    if len(top) != 1 or top[0].kind is not SpanKind.STRING:
        raise ChatError("chat stream must be exactly one string span")
    string = top[0]
    if not string.children:
        raise ChatError("no messages", string.start)

    messages = []
    for child in string.children:
        if child.kind is not SpanKind.MESSAGE:
            raise ChatError(
                f"unexpected {child.kind.value} between message blocks", child.start
            )
        messages.append(_parse_message(tree, child))

    pad_to = len(data) if tree.pad_count else None
    return Conversation(messages=tuple(messages), pad_to=pad_to)


def _parse_message(tree, span) -> Message:
    if span.heading is None:
        raise ChatError("message heading missing its LF terminator", span.start)
    role = _decode_role(span.heading, span.start)

    body = span.children
    if len(body) == 1 and body[0].kind is SpanKind.ATTENTION:
        text = _decode(tree.interior_of(body[0]), body[0].start + 1)
        parts: tuple[Part, ...] = (Part.plain(text),) if text else ()
        wrapped = True
    else:
        wrapped = False
        collected = []
        for node in body:
            if node.kind is SpanKind.TEXT:
                collected.append(Part.plain(_decode(tree.bytes_of(node), node.start)))
            elif node.kind is SpanKind.THINKING:
                collected.append(_parse_thinking(tree, node))
            else:
                raise ChatError(
                    "attention block must be the entire message body", node.start
                )
        parts = tuple(collected)

    default_wrap = role != "assistant"
    attention = None if wrapped == default_wrap else wrapped
    return Message(role=role, parts=parts, attention=attention)


def _parse_thinking(tree, span) -> Part:
    nested = []
    for node in span.children:
        if node.kind is SpanKind.TEXT:
            nested.append(Part.plain(_decode(tree.bytes_of(node), node.start)))
        else:  # parser guarantees: only tool calls can nest here
            nested.append(
                Part.tool_call(_decode(tree.interior_of(node), node.start + 1))
            )
    return Part.thinking(*nested)


def _decode_role(heading: bytes, offset: int) -> str:
    role = _decode(heading, offset + 1)
    if not role or not role.isascii():
        raise ChatError(f"invalid message role: {role!r}", offset)
    return role


def _decode(data: bytes, offset: int) -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ChatError(f"content is not valid UTF-8: {exc.reason}", offset) from None


def conversation_to_obj(conv: Conversation) -> dict:
    """Plain-dict form of a conversation (the CLI's JSON schema)."""
    obj: dict = {"messages": [_message_to_obj(m) for m in conv.messages]}
    if conv.pad_to is not None:
        obj["pad_to"] = conv.pad_to
    return obj


def conversation_from_obj(obj) -> Conversation:
    """Parse the CLI's JSON schema into a Conversation."""
    if not isinstance(obj, dict) or "messages" not in obj:
        raise ChatError('conversation object must have a "messages" list')
    messages = obj["messages"]
    if not isinstance(messages, list):
        raise ChatError('"messages" must be a list')
    pad_to = obj.get("pad_to")
    if pad_to is not None and (not isinstance(pad_to, int) or pad_to < 0):
        raise ChatError('"pad_to" must be a non-negative integer')
    return Conversation(
        messages=tuple(_message_from_obj(m) for m in messages),
        pad_to=pad_to,
    )


def _message_to_obj(message: Message) -> dict:
    obj: dict = {
        "role": message.role,
        "parts": [_part_to_obj(p) for p in message.parts],
    }
    if message.attention is not None:
        obj["attention"] = message.attention
    return obj


def _message_from_obj(obj) -> Message:
    if not isinstance(obj, dict) or not isinstance(obj.get("role"), str):
        raise ChatError('each message needs a string "role"')
    parts = obj.get("parts", [])
    if not isinstance(parts, list):
        raise ChatError('"parts" must be a list')
    attention = obj.get("attention")
    if attention is not None and not isinstance(attention, bool):
        raise ChatError('"attention" must be a boolean when present')
    return Message(
        role=obj["role"],
        parts=tuple(_part_from_obj(p) for p in parts),
        attention=attention,
    )


def _part_to_obj(part: Part) -> dict:
    if part.kind == THINKING:
        return {"kind": THINKING, "parts": [_part_to_obj(p) for p in part.parts]}
    return {"kind": part.kind, "text": part.text}


def _part_from_obj(obj) -> Part:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ChatError('each part needs a "kind"')
    kind = obj["kind"]
    if kind == THINKING:
        nested = obj.get("parts", [])
        if not isinstance(nested, list):
            raise ChatError('thinking "parts" must be a list')
        return Part.thinking(*(_part_from_obj(p) for p in nested))
    text = obj.get("text", "")
    if not isinstance(text, str):
        raise ChatError('"text" must be a string')
    return Part(kind, text=text)
