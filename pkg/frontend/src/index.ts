/**
 * Bindings for the u8tok byte-level tokenizer.
 *
 * Every operation delegates to the `u8tok` command-line tool over
 * stdin/stdout; nothing is re-implemented here. Token arrays cross the
 * boundary as raw unsigned 8-bit buffers (the token IDs *are* the UTF-8
 * bytes), and the returned Uint8Arrays are views over the child process
 * output with no widening or copying on this side.
 */

import { execFileSync } from 'node:child_process';

/** One piece of message content in the chat JSON schema. */
export type Part =
  | { kind: 'plain'; text: string }
  | { kind: 'tool_call'; text: string }
  | { kind: 'thinking'; parts: Part[] };

export interface Message {
  role: string;
  parts: Part[];
  /** Overrides the role-based default for attention-block wrapping. */
  attention?: boolean;
}

export interface Conversation {
  messages: Message[];
  pad_to?: number;
}

export interface BatchEncoding {
  /** One row per input text, each padded to `width` bytes. */
  tokens: Uint8Array[];
  /** True exactly on real (unpadded) positions. */
  attentionMask: boolean[][];
  originalLengths: number[];
  width: number;
}

export interface VisualizeOptions {
  showWhitespace?: boolean;
  annotate?: boolean;
}

export interface BoundTokenizerOptions {
  /** Command vector to invoke, e.g. ["u8tok"] or ["python3", "-m", "u8tok"]. */
  command?: string[];
  /** Maximum bytes accepted from the child process (default 256 MiB). */
  maxBuffer?: number;
}

/** Error from the tokenizer core, with its kind and offset preserved. */
export class TokenizerCliError extends Error {
  readonly kind: string;
  readonly offset: number | null;
  readonly exitCode: number | null;
  readonly stderr: string;

  constructor(message: string, kind: string, offset: number | null,
              exitCode: number | null, stderr: string) {
    super(message);
    this.name = 'TokenizerCliError';
    this.kind = kind;
    this.offset = offset;
    this.exitCode = exitCode;
    this.stderr = stderr;
  }
}

const ERROR_TAIL = /\[kind=([a-z-]+)(?: offset=(\d+))?\]/;

export class BoundTokenizer {
  /** Padding token ID (the NUL byte). */
  readonly padId = 0;
  /** Beginning-of-string token ID (the STX byte). */
  readonly bosId = 2;
  /** End-of-string token ID (the ETX byte). */
  readonly eosId = 3;

  private readonly command: string[];
  private readonly maxBuffer: number;
  private ids: Record<string, number> | null = null;

  constructor(options: BoundTokenizerOptions = {}) {
    this.command = options.command
      ?? (process.env.U8TOK_BIN ? [process.env.U8TOK_BIN] : ['u8tok']);
    this.maxBuffer = options.maxBuffer ?? 256 * 1024 * 1024;
  }

  /** Text in, UTF-8 byte token IDs out: one token per byte. */
  tokenize(text: string): Uint8Array {
    return asView(this.run(['tokenize', '-', '-'], Buffer.from(text, 'utf8')));
  }

  /** Token IDs back to text; strict decoding unless 'replace' is asked for. */
  detokenize(tokens: Uint8Array, policy: 'strict' | 'replace' = 'strict'): string {
    const out = this.run(
      ['detokenize', '-', '-', '--policy', policy],
      Buffer.from(tokens.buffer, tokens.byteOffset, tokens.byteLength),
    );
    return out.toString('utf8');
  }

  /** Encode several texts as one right-padded batch with an attention mask. */
  batch(texts: string[], padTo?: number): BatchEncoding {
    const args = ['batch', '-', '-'];
    if (padTo !== undefined) args.push('--pad', String(padTo));
    const raw = this.run(args, Buffer.from(JSON.stringify(texts), 'utf8'));
    return parseBatch(raw);
  }

  /** Render a conversation to its exact byte stream. */
  applyChatTemplate(conversation: Conversation, padTo?: number): Uint8Array {
    const args = ['chat', '-', '-'];
    if (padTo !== undefined) args.push('--pad', String(padTo));
    const raw = this.run(args, Buffer.from(JSON.stringify(conversation), 'utf8'));
    return asView(raw);
  }

  /** The fixed special-token ID mapping (pad, bos, eos, span delimiters). */
  specialIds(): Record<string, number> {
    if (this.ids === null) {
      this.ids = JSON.parse(this.run(['ids']).toString('utf8'));
    }
    return { ...this.ids! };
  }

  /** Render control bytes as Unicode control pictures for display. */
  visualize(data: string | Uint8Array, options: VisualizeOptions = {}): string {
    const args = ['visualize', '-'];
    if (options.showWhitespace) args.push('--show-whitespace');
    if (options.annotate) args.push('--annotate');
    const input = typeof data === 'string'
      ? Buffer.from(data, 'utf8')
      : Buffer.from(data.buffer, data.byteOffset, data.byteLength);
    const out = this.run(args, input).toString('utf8');
    return out.endsWith('\n') ? out.slice(0, -1) : out;
  }

  private run(args: string[], input?: Buffer): Buffer {
    const [cmd, ...baseArgs] = this.command;
    try {
      return execFileSync(cmd, [...baseArgs, ...args], {
        input: input ?? Buffer.alloc(0),
        maxBuffer: this.maxBuffer,
      });
    } catch (err) {
      throw toCliError(err);
    }
  }
}

function toCliError(err: unknown): Error {
  const e = err as { status?: number | null; stderr?: Buffer | string; message?: string };
  if (e.stderr === undefined) return err as Error;
  const stderr = e.stderr.toString();
  const match = ERROR_TAIL.exec(stderr);
  const kind = match?.[1] ?? 'unknown';
  const offset = match?.[2] !== undefined ? Number(match[2]) : null;
  const firstLine = stderr.split('\n', 1)[0] || (e.message ?? 'tokenizer CLI failed');
  return new TokenizerCliError(firstLine, kind, offset, e.status ?? null, stderr);
}

function asView(buf: Buffer): Uint8Array {
  return new Uint8Array(buf.buffer, buf.byteOffset, buf.byteLength);
}

/**
 * Binary batch layout emitted by `u8tok batch`: two little-endian uint32
 * header words (rows, width), then rows*width token bytes, rows*width
 * mask bytes, and rows uint32 original lengths.
 */
function parseBatch(raw: Buffer): BatchEncoding {
  if (raw.byteLength < 8) throw new Error('batch payload shorter than its header');
  const view = new DataView(raw.buffer, raw.byteOffset, raw.byteLength);
  const rows = view.getUint32(0, true);
  const width = view.getUint32(4, true);
  const expected = 8 + 2 * rows * width + 4 * rows;
  if (raw.byteLength !== expected) {
    throw new Error(`batch payload is ${raw.byteLength} bytes, expected ${expected}`);
  }
  const body = asView(raw);
  const tokens: Uint8Array[] = [];
  const attentionMask: boolean[][] = [];
  const originalLengths: number[] = [];
  const maskBase = 8 + rows * width;
  const lengthBase = maskBase + rows * width;
  for (let i = 0; i < rows; i++) {
    tokens.push(body.subarray(8 + i * width, 8 + (i + 1) * width));
    const mask: boolean[] = [];
    for (let j = 0; j < width; j++) {
      mask.push(body[maskBase + i * width + j] === 1);
    }
    attentionMask.push(mask);
    originalLengths.push(view.getUint32(lengthBase + 4 * i, true));
  }
  return { tokens, attentionMask, originalLengths, width };
}
