"""The three ways of combining identifier splitting with BPE.

``Original``
    BPE vocabulary on the raw corpus; tokens encoded as they are.
``Simple``
    every identifier split before vocabulary construction and before encoding.
``Hybrid``
    vocabulary on the raw corpus followed by the split corpus; an identifier
    is split at input time only if BPE does not keep it as one unit.

Whatever the strategy, the units produced for one token carry ``@@`` on all
but the last unit, so a token always decodes back to its original text.
"""
from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass
from pathlib import Path
from typing import Hashable, Iterable, NamedTuple, Sequence

from . import bpe
from .bpe import Vocabulary, add_markers
from .errors import FormatError, MissingTable
from .lexer import Token, TokenKind
from .splitter import FrequencyTable, split

__all__ = [
    "Strategy",
    "PipelineConfig",
    "SubwordStream",
    "TokenSpan",
    "build_vocab_corpus",
    "train_vocabulary",
    "process_input_token",
    "tokenize_file",
    "corpus_shrinkage",
    "write_streams",
    "read_streams",
]


class Strategy(str, enum.Enum):
    ORIGINAL = "original"
    SIMPLE = "simple"
    HYBRID = "hybrid"

    def __str__(self) -> str:
        return self.value

    @property
    def label(self) -> str:
        return self.value.capitalize()


@dataclass(frozen=True)
class PipelineConfig:
    strategy: Strategy = Strategy.ORIGINAL
    vocab_size: int = bpe.DEFAULT_VOCAB_SIZE
    split_table: FrequencyTable | None = None
    # copies of the raw and of the split corpus in the Hybrid vocabulary corpus
    hybrid_weights: tuple[int, int] = (1, 1)

    def __post_init__(self):
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        if self.vocab_size < 0:
            raise ValueError("vocab_size must be >= 0")
        if min(self.hybrid_weights) < 0:
            raise ValueError("hybrid_weights must be non-negative")

    def require_table(self) -> FrequencyTable | None:
        if self.strategy is not Strategy.ORIGINAL and self.split_table is None:
            raise MissingTable(f"strategy {self.strategy} needs a split frequency table")
        return self.split_table

    def table_fingerprint(self) -> str:
        if self.split_table is None:
            return "none"
        h = hashlib.sha256(repr((self.split_table.min_count, sorted(self.split_table.counts.items()))).encode())
        return h.hexdigest()[:16]

    def config_id(self, vocab: Vocabulary) -> str:
        """Identifies the exact (strategy, vocabulary, table) used to tokenize."""
        return f"{self.strategy}:{vocab.fingerprint()}:{self.table_fingerprint()}"


class TokenSpan(NamedTuple):
    start: int
    count: int
    kind: TokenKind


@dataclass
class SubwordStream:
    """The units of one file plus a map from tokens to their units."""

    units: list[str]
    token_spans: list[TokenSpan]
    file_id: Hashable = None
    config_id: str | None = None

    def token_units(self, i: int) -> list[str]:
        span = self.token_spans[i]
        return self.units[span.start : span.start + span.count]

    def token_text(self, i: int) -> str:
        return bpe.decode(self.token_units(i))

    def __len__(self) -> int:
        return len(self.token_spans)


def _split_tokens(token: Token, table: FrequencyTable) -> list[Token]:
    pieces = split(token.text, table).pieces
    out = []
    offset = token.span[0]
    for piece in pieces:
        kind = TokenKind.IDENTIFIER if any(c.isalnum() for c in piece) else TokenKind.PUNCTUATION
        out.append(Token(piece, kind, (offset, len(piece)), token.file_id))
        offset += len(piece)
    return out


def build_vocab_corpus(tokens: Sequence[Token], config: PipelineConfig) -> list[Token]:
    """The token sequence BPE is trained on under ``config.strategy``."""
    table = config.require_table()
    if config.strategy is Strategy.ORIGINAL:
        return list(tokens)
    split_seq: list[Token] = []
    for tok in tokens:
        if tok.kind is TokenKind.IDENTIFIER:
            split_seq.extend(_split_tokens(tok, table))
        else:
            split_seq.append(tok)
    if config.strategy is Strategy.SIMPLE:
        return split_seq
    raw_w, split_w = config.hybrid_weights
    return list(tokens) * raw_w + split_seq * split_w


def train_vocabulary(tokens: Sequence[Token], config: PipelineConfig) -> Vocabulary:
    # the frequency floor applies per copy of the corpus, so a split-free
    # corpus gives the same merges under every strategy
    copies = sum(config.hybrid_weights) if config.strategy is Strategy.HYBRID else 1
    return bpe.train(build_vocab_corpus(tokens, config), config.vocab_size, bpe.MIN_FREQUENCY * max(copies, 1))


def _split_then_encode(text: str, vocab: Vocabulary, table: FrequencyTable) -> list[str]:
    units: list[str] = []
    for piece in split(text, table).pieces:
        units.extend(bpe.segment(piece, vocab))
    return add_markers(units)


def process_input_token(token: Token, vocab: Vocabulary, config: PipelineConfig) -> list[str]:
    """Turn one input token into the marked units fed to the language model."""
    table = config.require_table()
    if token.kind is not TokenKind.IDENTIFIER or config.strategy is Strategy.ORIGINAL:
        return bpe.encode(token.text, vocab)
    if config.strategy is Strategy.HYBRID:
        plain = bpe.encode(token.text, vocab)
        if plain == [token.text]:
            return plain
    return _split_then_encode(token.text, vocab, table)


def tokenize_file(tokens: Iterable[Token], vocab: Vocabulary, config: PipelineConfig, file_id: Hashable = None) -> SubwordStream:
    units: list[str] = []
    spans: list[TokenSpan] = []
    for tok in tokens:
        pieces = process_input_token(tok, vocab, config)
        spans.append(TokenSpan(len(units), len(pieces), tok.kind))
        units.extend(pieces)
        if file_id is None:
            file_id = tok.file_id
    return SubwordStream(units, spans, file_id, config.config_id(vocab))


def corpus_shrinkage(tokens: Iterable[Token], table: FrequencyTable | None) -> tuple[int, int, float]:
    """Distinct token texts before and after replacing identifiers by their pieces.

    Returns ``(unique_before, unique_after, 1 - after / before)``; the ratio
    is 0.0 for an empty corpus and may be negative on tiny ones.
    """
    before: set[str] = set()
    after: set[str] = set()
    for tok in tokens:
        before.add(tok.text)
        if tok.kind is TokenKind.IDENTIFIER:
            after.update(split(tok.text, table).pieces)
        else:
            after.add(tok.text)
    if not before:
        return 0, 0, 0.0
    return len(before), len(after), 1.0 - len(after) / len(before)


STREAM_HEADER = "# splitbpe-stream v1"


def write_streams(path, streams: Sequence[SubwordStream], header: dict[str, str] | None = None) -> None:
    """One unit per line, a blank line after each file, ``# key=value`` header on top."""
    lines = [STREAM_HEADER]
    lines.extend(f"# {k}={v}" for k, v in (header or {}).items())
    for stream in streams:
        lines.extend(stream.units)
        lines.append("")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_streams(path) -> tuple[dict[str, str], list[list[str]]]:
    lines = Path(path).read_text(encoding="utf-8").split("\n")
    if not lines or lines[0] != STREAM_HEADER:
        raise FormatError(f"{path}: missing header {STREAM_HEADER!r}")
    i = 1
    while i < len(lines) and lines[i].startswith("# "):
        i += 1
    meta = bpe.read_metadata(lines[1:i])
    files: list[list[str]] = []
    current: list[str] = []
    # the final newline leaves one empty string after the last separator
    for line in lines[i:-1]:
        if line == "":
            files.append(current)
            current = []
        else:
            current.append(line)
    if current:
        files.append(current)
    return meta, files
