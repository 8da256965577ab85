"""Byte-pair encoding over token-bounded character sequences.

Training merges the most frequent adjacent pair of units, never across token
boundaries, until the merge budget is spent or no pair occurs twice. Ties go
to the lexicographically smallest ``(left, right)`` pair. Encoding replays
the merges in creation order; every unit but the last of a token carries the
``@@`` continuation marker.
"""
from __future__ import annotations

import ast
import hashlib
import heapq
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence, Union

from .errors import EmptyCorpus, FormatError, MalformedStream
from .lexer import PLACEHOLDERS, Token

__all__ = [
    "MARKER",
    "UNK",
    "DEFAULT_VOCAB_SIZE",
    "Vocabulary",
    "train",
    "segment",
    "encode",
    "decode",
    "add_markers",
    "strip_marker",
    "is_single_unit",
]

MARKER = "@@"
UNK = "<unk>"
DEFAULT_VOCAB_SIZE = 10_000
MIN_FREQUENCY = 2
VOCAB_HEADER = "splitbpe-vocab v1"

TokenLike = Union[Token, str]


@dataclass(frozen=True)
class Vocabulary:
    merges: tuple[tuple[str, str], ...]
    alphabet: frozenset[str]
    size_limit: int = DEFAULT_VOCAB_SIZE
    ranks: Mapping[tuple[str, str], int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        ranks = {}
        for i, pair in enumerate(self.merges):
            if pair in ranks:
                # training never repeats a pair; a repeat would make replay ambiguous
                raise ValueError(f"duplicate merge {pair!r} at positions {ranks[pair]} and {i}")
            ranks[pair] = i
        object.__setattr__(self, "ranks", ranks)

    @property
    def units(self) -> frozenset[str]:
        return self.alphabet | {a + b for a, b in self.merges}

    def __len__(self) -> int:
        return len(self.merges)

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update("".join(sorted(self.alphabet)).encode("utf-8", "surrogateescape"))
        for a, b in self.merges:
            h.update(f"\n{a} {b}".encode("utf-8", "surrogateescape"))
        return h.hexdigest()[:16]

    def save(self, path, provenance: Mapping[str, str] | None = None) -> None:
        # Merge lines come right after the header so a merge such as "# #" can
        # never be mistaken for metadata; metadata trails the merges.
        lines = [f"{VOCAB_HEADER} {len(self.merges)}"]
        lines.extend(f"{a} {b}" for a, b in self.merges)
        lines.append(f"# size_limit={self.size_limit}")
        lines.append("# alphabet=" + repr("".join(sorted(a for a in self.alphabet if len(a) == 1))))
        specials = sorted(a for a in self.alphabet if len(a) > 1)
        if specials:
            lines.append("# specials=" + " ".join(specials))
        for key, value in (provenance or {}).items():
            lines.append(f"# {key}={value}")
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "Vocabulary":
        lines = Path(path).read_text(encoding="utf-8").split("\n")
        head = lines[0].split()
        if len(head) != 3 or " ".join(head[:2]) != VOCAB_HEADER:
            raise FormatError(f"{path}: missing header {VOCAB_HEADER!r}")
        n_merges = int(head[2])
        merges = []
        for line in lines[1 : 1 + n_merges]:
            parts = line.split(" ")
            if len(parts) != 2 or not all(parts):
                raise FormatError(f"{path}: bad merge line {line!r}")
            merges.append((parts[0], parts[1]))
        if len(merges) != n_merges:
            raise FormatError(f"{path}: header promises {n_merges} merges, found {len(merges)}")
        meta = read_metadata(lines[1 + n_merges :])
        alphabet = set(ast.literal_eval(meta.get("alphabet", "''")))
        alphabet.update(meta.get("specials", "").split())
        size_limit = int(meta.get("size_limit", DEFAULT_VOCAB_SIZE))
        try:
            return cls(tuple(merges), frozenset(alphabet), size_limit)
        except ValueError as exc:
            raise FormatError(f"{path}: {exc}") from None


def read_metadata(lines: Iterable[str]) -> dict[str, str]:
    """Parse ``# key=value`` lines; other lines are ignored."""
    meta = {}
    for line in lines:
        if line.startswith("# ") and "=" in line:
            key, _, value = line[2:].partition("=")
            meta[key.strip()] = value
    return meta


def _text(token: TokenLike) -> str:
    return token.text if isinstance(token, Token) else token


def _symbols(text: str) -> tuple[str, ...]:
    if text in PLACEHOLDERS:
        return (text,)
    return tuple(text)


def _merge_word(word: Sequence[str], left: str, right: str, joined: str) -> tuple[str, ...]:
    out = []
    i = 0
    n = len(word)
    while i < n:
        if i + 1 < n and word[i] == left and word[i + 1] == right:
            out.append(joined)
            i += 2
        else:
            out.append(word[i])
            i += 1
    return tuple(out)


def _pairs(word: Sequence[str]) -> Counter:
    return Counter(zip(word, word[1:]))


def train(token_stream: Iterable[TokenLike], size_limit: int = DEFAULT_VOCAB_SIZE, min_frequency: int = MIN_FREQUENCY) -> Vocabulary:
    """Learn an ordered merge list from a stream of tokens (or token texts)."""
    if size_limit < 0:
        raise ValueError("size_limit must be >= 0")
    freq = Counter(_text(t) for t in token_stream)
    if not freq:
        raise EmptyCorpus("cannot train BPE on an empty token stream")

    words: list[tuple[str, ...]] = []
    counts: list[int] = []
    alphabet: set[str] = set()
    for text, c in sorted(freq.items()):
        sym = _symbols(text)
        alphabet.update(sym)
        words.append(sym)
        counts.append(c)

    pair_count: dict[tuple[str, str], int] = defaultdict(int)
    where: dict[tuple[str, str], set[int]] = defaultdict(set)
    for idx, word in enumerate(words):
        for pair, n in _pairs(word).items():
            pair_count[pair] += n * counts[idx]
            where[pair].add(idx)
    heap = [(-c, pair) for pair, c in pair_count.items()]
    heapq.heapify(heap)

    merges: list[tuple[str, str]] = []
    while len(merges) < size_limit and heap:
        neg, pair = heapq.heappop(heap)
        current = pair_count.get(pair, 0)
        if -neg != current:
            continue  # stale entry; the live count was pushed separately
        if current < min_frequency:
            break
        merges.append(pair)
        left, right = pair
        joined = left + right
        changed: set[tuple[str, str]] = set()
        for idx in sorted(where.pop(pair, ())):
            old = words[idx]
            new = _merge_word(old, left, right, joined)
            if new == old:
                continue
            c = counts[idx]
            old_pairs = _pairs(old)
            new_pairs = _pairs(new)
            for p, n in old_pairs.items():
                pair_count[p] -= n * c
                changed.add(p)
                if p not in new_pairs:
                    where[p].discard(idx)
            for p, n in new_pairs.items():
                pair_count[p] += n * c
                changed.add(p)
                where[p].add(idx)
            words[idx] = new
        pair_count.pop(pair, None)
        for p in changed:
            c = pair_count.get(p, 0)
            if c <= 0:
                pair_count.pop(p, None)
                where.pop(p, None)
            elif p != pair:
                heapq.heappush(heap, (-c, p))
    return Vocabulary(tuple(merges), frozenset(alphabet), size_limit)


def segment(token_text: str, vocab: Vocabulary, unk: bool = True) -> list[str]:
    """Apply the merges in order to one token; no continuation markers added.

    Equivalent to running every merge, in rank order, left to right over the
    token: at each step only the lowest-ranked merge not yet passed that is
    applicable can change anything.
    """
    if not token_text:
        raise ValueError("cannot encode an empty token")
    word = list(_symbols(token_text))
    if unk:
        word = [s if s in vocab.alphabet else UNK for s in word]
    ranks = vocab.ranks
    passed = 0
    while len(word) > 1:
        best = None
        for pair in zip(word, word[1:]):
            r = ranks.get(pair)
            if r is not None and r >= passed and (best is None or r < best):
                best = r
        if best is None:
            break
        left, right = vocab.merges[best]
        word = list(_merge_word(word, left, right, left + right))
        passed = best + 1
    return word


def add_markers(units: Sequence[str]) -> list[str]:
    return [u + MARKER for u in units[:-1]] + list(units[-1:])


def strip_marker(unit: str) -> str:
    return unit[: -len(MARKER)] if unit.endswith(MARKER) else unit


def encode(token_text: str, vocab: Vocabulary, unk: bool = True) -> list[str]:
    """Encode one token as marked sub-word units.

    >>> v = Vocabulary((("a", "b"),), frozenset("ab"))
    >>> encode("abab", v)
    ['ab@@', 'ab']
    """
    return add_markers(segment(token_text, vocab, unk))


def decode(units: Sequence[str]) -> str:
    if not units:
        return ""
    if units[-1].endswith(MARKER):
        raise MalformedStream(f"dangling continuation marker on final unit {units[-1]!r}")
    return "".join(strip_marker(u) for u in units)


def is_single_unit(token_text: str, vocab: Vocabulary) -> bool:
    return encode(token_text, vocab) == [token_text]
