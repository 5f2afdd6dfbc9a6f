"""Command-line front end.

File arguments accept ``-`` for stdin/stdout so the commands compose in
pipelines and foreign-language wrappers can talk to the tool without temp
files. Exit codes are a stable scripting contract: 0 success, 1 data
validation/structure error, 2 I/O or usage error. Data errors are printed
as one stderr line ending in ``[kind=<kind> offset=<n>]`` so callers can
recover the error class and position mechanically.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time

from . import kernels
from .chat import (
    apply_chat_template,
    conversation_from_obj,
    conversation_to_obj,
    parse_chat,
)
from .control import special_ids
from .core import batch_encode, detokenize, tokenize, validate_utf8
from .errors import TokenizerError
from .viz import RenderOptions, visualize_control_tokens


@dataclasses.dataclass
class BenchmarkReport:
    """Throughput measurements for one input file.

    ``wall_time`` is seconds per tokenize pass (averaged over the timed
    passes), ``throughput`` is input bytes per second, ``per_token_memory``
    is the in-memory bytes per token (1 by construction), and
    ``comparison_ratio`` is the slowdown of the naive per-character
    reference loop relative to the real path.
    """

    input_bytes: int
    iters: int
    wall_time: float
    throughput: float
    per_token_memory: int
    naive_wall_time: float
    comparison_ratio: float
    scan_kernel: str
    scan_wall_time: float
    scan_fallback_wall_time: float | None

    def lines(self) -> list[str]:
        out = [
            f"input_bytes {self.input_bytes}",
            f"iters {self.iters}",
            f"wall_time {self.wall_time:.6f}",
            f"throughput {self.throughput:.1f}",
            f"per_token_memory {self.per_token_memory}",
            f"naive_wall_time {self.naive_wall_time:.6f}",
            f"comparison_ratio {self.comparison_ratio:.2f}",
            f"scan_kernel {self.scan_kernel}",
            f"scan_wall_time {self.scan_wall_time:.6f}",
        ]
        if self.scan_fallback_wall_time is not None:
            out.append(f"scan_fallback_wall_time {self.scan_fallback_wall_time:.6f}")
            out.append(
                f"scan_speedup {self.scan_fallback_wall_time / self.scan_wall_time:.2f}"
            )
        return out


def _read_bytes(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def _write_bytes(path: str, data: bytes) -> None:
    if path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        with open(path, "wb") as fh:
            fh.write(data)


def _load_json(path: str):
    raw = _read_bytes(path)
    try:
        return json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise TokenizerError(f"input is not valid JSON: {exc}") from None


def cmd_tokenize(args) -> int:
    data = _read_bytes(args.input)
    text = detokenize(data)  # reject invalid UTF-8 before claiming identity
    _write_bytes(args.output, tokenize(text))
    return 0


def cmd_detokenize(args) -> int:
    data = _read_bytes(args.input)
    text = detokenize(data, policy=args.policy)
    _write_bytes(args.output, text.encode("utf-8"))
    return 0


def cmd_chat(args) -> int:
    if args.parse:
        conv = parse_chat(_read_bytes(args.input))
        rendered = json.dumps(conversation_to_obj(conv), ensure_ascii=False, indent=2)
        _write_bytes(args.output, (rendered + "\n").encode("utf-8"))
        return 0
    conv = conversation_from_obj(_load_json(args.input))
    if args.pad is not None:
        conv = dataclasses.replace(conv, pad_to=args.pad)
    _write_bytes(args.output, apply_chat_template(conv))
    return 0


def cmd_visualize(args) -> int:
    data = _read_bytes(args.input)
    opts = RenderOptions(show_whitespace=args.show_whitespace, annotate=args.annotate)
    sys.stdout.write(visualize_control_tokens(data, opts))
    sys.stdout.write("\n")
    return 0


def cmd_fold(args) -> int:
    from .bits import fold, load_matrix, save_matrix

    table = load_matrix(args.table, expected_rows=256)
    projection = load_matrix(args.projection, expected_rows=8)
    save_matrix(args.output, fold(table, projection))
    return 0


def cmd_validate(args) -> int:
    diagnostics = validate_utf8(_read_bytes(args.input))
    for diag in diagnostics:
        print(f"{diag.offset} {diag.kind} 0x{diag.byte_value:02x}")
    return 1 if any(not d.advisory for d in diagnostics) else 0


def _naive_reference(text: str) -> list[int]:
    # Deliberately naive baseline: per-character encode and per-byte append.
    ids: list[int] = []
    for ch in text:
        for b in ch.encode("utf-8"):
            ids.append(b)
    return ids


def cmd_bench(args) -> int:
    data = _read_bytes(args.input)
    if not data:
        raise TokenizerError("empty benchmark input")
    if args.iters < 1:
        raise TokenizerError("iters must be at least 1")
    text = detokenize(data)

    start = time.perf_counter()
    for _ in range(args.iters):
        buf = tokenize(text)
    fast = (time.perf_counter() - start) / args.iters

    start = time.perf_counter()
    _naive_reference(text)
    naive = time.perf_counter() - start

    sample = data[: args.scan_bytes]
    fast_scan, fallback_scan = _time_scan_kernels(sample)

    report = BenchmarkReport(
        input_bytes=len(data),
        iters=args.iters,
        wall_time=fast,
        throughput=len(data) / fast,
        per_token_memory=memoryview(buf).itemsize,
        naive_wall_time=naive,
        comparison_ratio=naive / fast,
        scan_kernel=kernels.IMPLEMENTATION,
        scan_wall_time=fast_scan,
        scan_fallback_wall_time=fallback_scan,
    )
    for line in report.lines():
        print(line)
    return 0


def _time_scan_kernels(sample: bytes) -> tuple[float, float | None]:
    """Time the active scan kernel, and the fallback when an extension exists."""
    start = time.perf_counter()
    kernels.utf8_scan(sample)
    active = time.perf_counter() - start
    if not kernels.HAVE_EXTENSION:
        return active, None
    fallback = kernels.load(pure=True)
    start = time.perf_counter()
    fallback.utf8_scan(sample)
    return active, time.perf_counter() - start


def cmd_batch(args) -> int:
    import numpy as np

    texts = _load_json(args.input)
    if not isinstance(texts, list) or not all(isinstance(t, str) for t in texts):
        raise TokenizerError("batch input must be a JSON array of strings")
    enc = batch_encode(texts, pad_to=args.pad)
    n, width = enc.tokens.shape
    out = bytearray()
    out.extend(np.asarray([n, width], dtype="<u4").tobytes())
    out.extend(enc.tokens.tobytes())
    out.extend(enc.attention_mask.astype(np.uint8).tobytes())
    out.extend(np.asarray(enc.original_lengths, dtype="<u4").tobytes())
    _write_bytes(args.output, bytes(out))
    return 0


def cmd_ids(args) -> int:
    print(json.dumps(special_ids()))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="u8tok",
        description="Bytes-only UTF-8 tokenizer toolbox (use - for stdin/stdout).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tokenize", help="text file in, raw token bytes out")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=cmd_tokenize)

    p = sub.add_parser("detokenize", help="raw token bytes in, text out")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--policy", choices=("strict", "replace"), default="strict")
    p.set_defaults(func=cmd_detokenize)

    p = sub.add_parser("chat", help="render a conversation JSON file to tokens")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--pad", type=int, default=None, help="pad stream to this length")
    p.add_argument(
        "--parse", action="store_true", help="reverse: tokens in, conversation out"
    )
    p.set_defaults(func=cmd_chat)

    p = sub.add_parser("visualize", help="print a stream with control pictures")
    p.add_argument("input")
    p.add_argument("--show-whitespace", action="store_true")
    p.add_argument("--annotate", action="store_true")
    p.set_defaults(func=cmd_visualize)

    p = sub.add_parser("fold", help="fold a bit projection into an embedding table")
    p.add_argument("table", help="(256, d) matrix file")
    p.add_argument("projection", help="(8, d) matrix file")
    p.add_argument("output")
    p.set_defaults(func=cmd_fold)

    p = sub.add_parser("validate", help="print UTF-8 diagnostics, one per line")
    p.add_argument("input")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("bench", help="measure tokenizer throughput")
    p.add_argument("input")
    p.add_argument("--iters", type=int, default=3, help="timed tokenize passes")
    p.add_argument(
        "--scan-bytes",
        type=int,
        default=1 << 20,
        help="bytes of input used for the scan-kernel comparison",
    )
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("batch", help="encode a JSON array of strings as a batch")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--pad", type=int, default=None, help="pad every row to this length")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("ids", help="print the special-token ID mapping as JSON")
    p.set_defaults(func=cmd_ids)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TokenizerError as exc:
        _print_error(exc)
        return 1
    except ValueError as exc:
        print(f"u8tok: error: {exc} [kind=value]", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"u8tok: i/o error: {exc}", file=sys.stderr)
        return 2


def _print_error(exc: TokenizerError) -> None:
    tail = f"[kind={exc.kind}"
    if exc.offset is not None:
        tail += f" offset={exc.offset}"
    tail += "]"
    print(f"u8tok: error: {exc} {tail}", file=sys.stderr)


def entrypoint() -> None:
    sys.exit(main())
