"""Identifier splitting: naming conventions plus frequency-table segmentation.

Convention splitting handles camelCase, PascalCase, snake_case, acronyms
(``XMLParser`` -> ``XML``, ``Parser``) and letter/digit boundaries. Pieces
with no visible boundary (``httprequest``) are segmented by dynamic
programming against a table of word counts gathered from a training corpus.

Every split is an exact cover: joining ``SplitResult.pieces`` gives back the
identifier, underscores included.
"""
from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import FormatError

__all__ = [
    "SplitResult",
    "FrequencyTable",
    "split_convention",
    "build_frequency_table",
    "split_same_case",
    "split",
    "DEFAULT_MIN_COUNT",
    "UNKNOWN_CHAR_PENALTY",
]

DEFAULT_MIN_COUNT = 5
UNKNOWN_CHAR_PENALTY = -4.0
# Table words shorter than this never score as segmentation parts.
MIN_PART_LEN = 2
TABLE_HEADER = "splitbpe-freqtable v1"

_CONVENTION_RE = re.compile(
    r"_"
    r"|[A-Z]+(?=[A-Z][a-z])"  # acronym followed by a capitalised word
    r"|[A-Z]?[a-z]+"
    r"|[A-Z]+"
    r"|[0-9]+"
    r"|[^A-Za-z0-9_]+"  # anything else, kept so the cover stays exact
)


def _is_separator(piece: str) -> bool:
    return not any(ch.isalnum() for ch in piece)


@dataclass(frozen=True)
class SplitResult:
    pieces: tuple[str, ...]
    words: tuple[str, ...]

    @classmethod
    def from_pieces(cls, pieces: Iterable[str]) -> "SplitResult":
        pieces = tuple(pieces)
        return cls(pieces, tuple(p.lower() for p in pieces if not _is_separator(p)))


@dataclass(frozen=True)
class FrequencyTable:
    """Word counts with a pruning threshold; words below ``min_count`` are absent."""

    counts: Mapping[str, int] = field(default_factory=dict)
    min_count: int = 1

    def __post_init__(self):
        if self.min_count < 1:
            raise ValueError("min_count must be >= 1")
        kept = {w.lower(): int(c) for w, c in self.counts.items() if int(c) >= self.min_count}
        object.__setattr__(self, "counts", dict(sorted(kept.items())))

    def __len__(self) -> int:
        return len(self.counts)

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.counts

    def count(self, word: str) -> int:
        return self.counts.get(word.lower(), 0)

    @property
    def shortest_word(self) -> int:
        """Length of the shortest word eligible as a segmentation part (0 if none)."""
        lengths = [len(w) for w in self.counts if len(w) >= MIN_PART_LEN]
        return min(lengths) if lengths else 0

    def save(self, path, provenance: Mapping[str, str] | None = None) -> None:
        lines = [TABLE_HEADER, f"# min_count={self.min_count}"]
        for key, value in (provenance or {}).items():
            lines.append(f"# {key}={value}")
        lines.extend(f"{w}\t{c}" for w, c in self.counts.items())
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "FrequencyTable":
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        if not lines or lines[0].strip() != TABLE_HEADER:
            raise FormatError(f"{path}: missing header {TABLE_HEADER!r}")
        min_count = 1
        counts = {}
        for lineno, line in enumerate(lines[1:], start=2):
            if not line.strip():
                continue
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                if key == "min_count":
                    min_count = int(value)
                continue
            try:
                word, count = line.split("\t")
                counts[word] = int(count)
            except ValueError:
                raise FormatError(f"{path}:{lineno}: expected word<TAB>count") from None
        return cls(counts, min_count)


def split_convention(identifier: str) -> SplitResult:
    """Split at underscores, case transitions, acronym ends and digit runs.

    >>> split_convention("http_request").pieces
    ('http', '_', 'request')
    """
    return SplitResult.from_pieces(_CONVENTION_RE.findall(identifier))


def build_frequency_table(corpus_identifiers: Iterable[str], min_count: int = DEFAULT_MIN_COUNT) -> FrequencyTable:
    counts: Counter[str] = Counter()
    for ident in corpus_identifiers:
        counts.update(split_convention(ident).words)
    return FrequencyTable(counts, min_count)


def _part_score(part: str, table: FrequencyTable, unknown_penalty: float) -> float:
    if len(part) >= MIN_PART_LEN:
        c = table.count(part)
        if c:
            return math.log(c)
    return unknown_penalty * len(part)


def _rank_key(score: float, lengths: Sequence[int]):
    # higher is better: score, then fewer parts, then leftmost-longest parts
    return (round(score, 9), -len(lengths), tuple(lengths))


def split_same_case(
    word: str,
    table: FrequencyTable,
    baseline: float | None = None,
    unknown_penalty: float = UNKNOWN_CHAR_PENALTY,
) -> list[str]:
    """Segment a single-case word into table words by dynamic programming.

    A segmentation scores the sum of ``log(count)`` over parts found in the
    table, and ``unknown_penalty`` per character of every other part. The
    unsplit word scores ``baseline`` (default ``log(table.min_count)``) or its
    own log count, whichever is larger; a split must beat it strictly.
    Lookups ignore case; the returned parts keep the input's case.
    """
    n = len(word)
    if n < 2 or not table.counts:
        return [word]
    if baseline is None:
        baseline = math.log(table.min_count)

    def score(part: str) -> float:
        return _part_score(part, table, unknown_penalty)

    whole = max(baseline, score(word))
    # best[i]: best (score, lengths) for word[i:]
    best: list[tuple[float, tuple[int, ...]] | None] = [None] * (n + 1)
    best[n] = (0.0, ())
    for i in range(n - 1, -1, -1):
        top = None
        top_key = None
        for j in range(i + 1, n + 1):
            rest_score, rest_lengths = best[j]
            if i == 0 and j == n:
                cand = (whole, (n,))
            else:
                cand = (score(word[i:j]) + rest_score, (j - i,) + rest_lengths)
            key = _rank_key(*cand)
            if top_key is None or key > top_key:
                top, top_key = cand, key
        best[i] = top
    parts = []
    pos = 0
    for length in best[0][1]:
        parts.append(word[pos : pos + length])
        pos += length
    return parts


def _is_single_case_word(piece: str) -> bool:
    if not piece.isalpha() or not piece.isascii():
        return False
    tail = piece[1:]
    return piece.islower() or piece.isupper() or (piece[0].isupper() and tail.islower())


def split(identifier: str, table: FrequencyTable | None = None, **same_case_options) -> SplitResult:
    """Convention split, then frequency-table segmentation of long same-case pieces.

    >>> t = FrequencyTable({"http": 10, "request": 10})
    >>> split("getHttprequest", t).pieces
    ('get', 'Http', 'request')
    """
    conv = split_convention(identifier)
    if table is None or not table.counts:
        return conv
    threshold = 2 * table.shortest_word
    if threshold == 0:
        return conv
    pieces: list[str] = []
    for piece in conv.pieces:
        if len(piece) >= threshold and _is_single_case_word(piece):
            pieces.extend(split_same_case(piece, table, **same_case_options))
        else:
            pieces.append(piece)
    return SplitResult.from_pieces(pieces)
