"""Acceptance suite: one test per shipping criterion.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS line per
criterion. Every tolerance and runtime budget is pinned here; nothing is
deferred to later calibration.
"""

import random
import time

import numpy as np
import pytest

import u8tok
from u8tok import SpanKind, cli

from conftest import (
    INTERESTING_RANGES,
    golden_conversation,
    golden_stream,
    random_conversations,
)


def _report(name: str) -> None:
    print(f"ACCEPTANCE PASS: {name}")


def _random_string_any_plane(rng: random.Random, max_len: int = 48) -> str:
    chars = []
    for _ in range(rng.randrange(max_len + 1)):
        if rng.random() < 0.7:
            lo, hi = rng.choice(INTERESTING_RANGES)
            chars.append(chr(rng.randint(lo, hi)))
        else:
            cp = rng.randint(0, 0x10FFFF)
            while 0xD800 <= cp <= 0xDFFF:
                cp = rng.randint(0, 0x10FFFF)
            chars.append(chr(cp))
    return "".join(chars)


def test_round_trip_fuzz_10000_strings():
    rng = random.Random(0xBEEF)
    start = time.perf_counter()
    for _ in range(10_000):
        text = _random_string_any_plane(rng)
        assert u8tok.detokenize(u8tok.tokenize(text)) == text
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0, f"round-trip fuzz took {elapsed:.1f}s"
    _report(f"round-trip fuzz, 10,000 strings in {elapsed:.2f}s")


def test_byte_identity_for_all_ascii():
    for code in range(128):
        assert list(u8tok.tokenize(chr(code))) == [code]
    assert list(u8tok.tokenize("\t")) == [9]
    _report("byte identity over all 128 ASCII characters")


def test_storage_is_one_byte_per_token_and_8x_vs_int64():
    text = "storage check: ασδφ 字 🧮"
    buf = u8tok.tokenize(text)
    arr = u8tok.as_array(buf)
    assert arr.itemsize == 1
    assert arr.nbytes == len(buf) == len(text.encode("utf-8"))
    wide = arr.astype(np.int64)
    assert wide.nbytes == 8 * arr.nbytes
    _report("storage: 1 byte/token, exactly 8x smaller than int64")


def test_fold_identity_100_pairs_per_dimension():
    rng = np.random.default_rng(2024)
    all_tokens = bytes(range(256))
    start = time.perf_counter()
    worst = 0.0
    for d in (1, 16, 64):
        for _ in range(100):
            table = rng.normal(0.0, 0.02, (256, d)).astype(np.float32)
            proj = rng.normal(0.0, 0.02, (8, d)).astype(np.float32)
            folded = u8tok.fold(table, proj)
            direct = u8tok.embed_with_bias(all_tokens, table, proj)
            worst = max(worst, float(np.abs(folded - direct).max()))
    elapsed = time.perf_counter() - start
    assert worst <= 1e-6, f"fold deviation {worst:.3e}"
    assert elapsed < 5.0, f"fold identity took {elapsed:.1f}s"
    _report(
        f"fold identity, 100 pairs at d in {{1,16,64}}: max dev {worst:.2e} "
        f"in {elapsed:.2f}s"
    )


def test_bit_structure_case_pairs_and_digit_nibble():
    for upper in range(65, 91):
        diff = u8tok.unpack_bits(upper) ^ u8tok.unpack_bits(upper + 32)
        assert diff.tolist() == [0, 0, 1, 0, 0, 0, 0, 0]
    for digit in range(0x30, 0x3A):
        assert u8tok.unpack_bits(digit)[:4].tolist() == [0, 0, 1, 1]
    _report("bit structure: 26 case pairs flip bit index 2; digits share 0011")


def test_gradient_check_quadratic_probe():
    rng = np.random.default_rng(7)
    table = rng.normal(0.0, 0.1, (256, 4)).astype(np.float32)
    proj = rng.normal(0.0, 0.1, (8, 4)).astype(np.float32)
    start = time.perf_counter()
    err = u8tok.bit_bias_gradient_check(table, proj, b"Aa0~\xff\x00", step=1e-4)
    elapsed = time.perf_counter() - start
    assert err <= 1e-4, f"gradient relative error {err:.3e}"
    assert elapsed < 1.0, f"gradient check took {elapsed:.2f}s"
    _report(f"gradient check at d=4: relative error {err:.2e}")


def test_protocol_round_trip_1000_conversations():
    start = time.perf_counter()
    conversations = random_conversations(seed=0xC0FFEE, count=1_000)
    for conv in conversations:
        stream = u8tok.apply_chat_template(conv)
        u8tok.parse_spans(stream)  # must never raise on template output
        assert u8tok.parse_chat(stream) == conv
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0, f"conversation round-trip took {elapsed:.1f}s"
    _report(f"protocol round-trip, 1,000 conversations in {elapsed:.2f}s")


def test_golden_conversation_tree_and_thinking_filter():
    stream = golden_stream()
    assert u8tok.apply_chat_template(golden_conversation()) == stream

    tree = u8tok.parse_spans(stream)
    (string,) = tree.root.children
    assert string.kind is SpanKind.STRING
    assert [c.kind for c in string.children] == [SpanKind.MESSAGE] * 3
    assistant = string.children[2]
    thinkings = [c for c in assistant.children if c.kind is SpanKind.THINKING]
    assert len(thinkings) == 1
    thinking = thinkings[0]
    assert [c.kind for c in thinking.children] == [
        SpanKind.TEXT,
        SpanKind.TOOL_CALL,
        SpanKind.TEXT,
    ]

    # Filtering must remove exactly the think-open..think-close region.
    removed_region = stream[thinking.start : thinking.end]
    assert removed_region[0] == 5 and removed_region[-1] == 6
    expected = stream[: thinking.start] + stream[thinking.end :]
    assert u8tok.filter_spans(stream, {SpanKind.THINKING}) == expected
    _report("golden conversation: documented tree shape and exact filter")


def test_validation_of_never_valid_leading_bytes():
    for byte in [*range(0xF5, 0x100), 0xC0, 0xC1]:
        diags = u8tok.validate_utf8(bytes([byte]))
        assert diags, f"no diagnostic for 0x{byte:02x}"
        assert diags[0].kind == "invalid-leading-byte"
        assert diags[0].byte_value == byte
        assert not diags[0].advisory
    _report("validation: 0xF5-0xFF and 0xC0-0xC1 all invalid-leading-byte")


@pytest.fixture(scope="module")
def mixed_script_file(tmp_path_factory):
    unit = (
        "The quick brown fox jumps over the lazy dog. "
        "Ωραία γράμματα και ένα δοκιμαστικό κείμενο. "
        "Быстрая бурая лиса перепрыгнула ленивую собаку. "
        "敏捷的棕色狐狸跳过了懒狗。日本語のテキストもここにある。"
        "مرحبا بالعالم، هذا نص تجريبي. "
        "नमस्ते दुनिया, यह एक परीक्षण है। "
        "🦊🐶✨ emoji and symbols ≈ ∑ ∞ € £ ¥\n"
    )
    target = 10 * 1024 * 1024
    unit_bytes = unit.encode("utf-8")
    repeats = target // len(unit_bytes) + 1
    path = tmp_path_factory.mktemp("bench") / "mixed.txt"
    path.write_bytes(unit_bytes * repeats)
    assert path.stat().st_size >= target
    return path


def test_throughput_vs_naive_reference(mixed_script_file, capsys):
    assert cli.main(["bench", str(mixed_script_file), "--iters", "3"]) == 0
    report = dict(
        line.split(" ", 1) for line in capsys.readouterr().out.splitlines()
    )
    ratio = float(report["comparison_ratio"])
    assert ratio >= 1.0, f"comparison_ratio {ratio:.2f} < 1"
    assert report["per_token_memory"] == "1"
    _report(
        f"throughput on {report['input_bytes']} bytes: "
        f"{float(report['throughput']):.3e} B/s, "
        f"{ratio:.0f}x the naive reference loop"
    )
