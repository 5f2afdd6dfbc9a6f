"""Strict bytes-only UTF-8 tokenizer.

Token IDs are the UTF-8 bytes themselves (0-255, nothing else), structure
is carried by repurposed C0 control bytes, and embeddings can be trained
with a bit-feature bias that folds exactly into the 256-row table at
inference time.
"""

from .bits import (
    bit_bias_gradient_check,
    bit_feature_matrix,
    embed_with_bias,
    fold,
    fold_ready,
    load_matrix,
    save_matrix,
    unpack_bits,
)
from .chat import (
    Conversation,
    Message,
    Part,
    apply_chat_template,
    conversation_from_obj,
    conversation_to_obj,
    parse_chat,
)
from .control import (
    ControlToken,
    Span,
    SpanKind,
    SpanTree,
    attention_segments,
    filter_spans,
    parse_spans,
    sanitize,
    special_ids,
    wrap,
)
from .core import (
    BatchEncoding,
    TokenBuffer,
    Utf8Diagnostic,
    as_array,
    as_bytes,
    batch_encode,
    detokenize,
    read_tokens,
    tokenize,
    validate_utf8,
    write_tokens,
)
from .errors import (
    ChatError,
    ControlByteError,
    SpanError,
    TokenizerError,
    Utf8DecodeError,
)
from .viz import RenderOptions, visualize_control_tokens

__version__ = "0.1.0"

__all__ = [
    "BatchEncoding",
    "ChatError",
    "ControlByteError",
    "ControlToken",
    "Conversation",
    "Message",
    "Part",
    "RenderOptions",
    "Span",
    "SpanError",
    "SpanKind",
    "SpanTree",
    "TokenBuffer",
    "TokenizerError",
    "Utf8Diagnostic",
    "Utf8DecodeError",
    "apply_chat_template",
    "as_array",
    "as_bytes",
    "attention_segments",
    "batch_encode",
    "bit_bias_gradient_check",
    "bit_feature_matrix",
    "conversation_from_obj",
    "conversation_to_obj",
    "detokenize",
    "embed_with_bias",
    "filter_spans",
    "fold",
    "fold_ready",
    "load_matrix",
    "parse_chat",
    "parse_spans",
    "read_tokens",
    "sanitize",
    "save_matrix",
    "special_ids",
    "tokenize",
    "unpack_bits",
    "validate_utf8",
    "visualize_control_tokens",
    "wrap",
    "write_tokens",
]
