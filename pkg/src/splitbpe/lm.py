"""Sub-word language models.

:class:`LanguageModel` is the interface the completion and metric code
relies on: a closed unit inventory and a next-unit distribution for any
context. :class:`NGramModel` implements it with interpolated absolute
discounting down to a uniform floor::

    p(w | h) = max(c(h, w) - d, 0) / c(h) + d * N1+(h .) / c(h) * p(w | h')

where ``h'`` drops the oldest unit of ``h``, ``c(h)`` counts the events
that follow ``h`` and ``N1+(h .)`` is the number of distinct units that
follow it. A context never seen in training defers entirely to ``h'``.
"""
from __future__ import annotations

import abc
from collections import defaultdict
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import EmptyCorpus, FormatError

__all__ = [
    "BOS",
    "EOS",
    "UNK",
    "LanguageModel",
    "NGramModel",
    "train",
    "prob",
    "top_candidates",
]

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"
SPECIALS = (BOS, EOS, UNK)
DEFAULT_ORDER = 5
DEFAULT_DISCOUNT = 0.75
MODEL_HEADER = "splitbpe-ngram v1"


class LanguageModel(abc.ABC):
    """A next-unit distribution over a closed, ordered unit inventory."""

    #: unit strings; index i of a distribution refers to units[i]
    units: tuple[str, ...]
    #: number of units of history the model looks at, plus one
    order: int

    def _init_inventory(self, units: Iterable[str]) -> None:
        inventory = set(units) | set(SPECIALS)
        self.units = tuple(sorted(inventory))
        self.index = {u: i for i, u in enumerate(self.units)}
        self._unk = self.index[UNK]

    @property
    def vocab_size(self) -> int:
        return len(self.units)

    def unit_id(self, unit: str) -> int:
        return self.index.get(unit, self._unk)

    def truncate(self, context: Sequence[str]) -> tuple[str, ...]:
        """The part of ``context`` the model can see, with unknown units mapped to <unk>."""
        keep = self.order - 1
        tail = context[max(0, len(context) - keep) :] if keep > 0 else ()
        return tuple(u if u in self.index else UNK for u in tail)

    @abc.abstractmethod
    def distribution(self, context: Sequence[str]) -> np.ndarray:
        """Probabilities of every unit following ``context`` (sums to 1)."""

    def prob(self, context: Sequence[str], unit: str) -> float:
        return float(self.distribution(context)[self.unit_id(unit)])

    def top_candidates(self, context: Sequence[str], k: int) -> list[tuple[str, float]]:
        """The ``k`` most probable next units; equal probabilities sort by unit string."""
        if k < 1:
            raise ValueError("k must be >= 1")
        p = self.distribution(context)
        v = len(p)
        if k < v:
            threshold = np.partition(p, v - k)[v - k]
            idx = np.flatnonzero(p >= threshold)
        else:
            idx = np.arange(v)
        # units are stored sorted, so index order is lexicographic order
        idx = idx[np.lexsort((idx, -p[idx]))][:k]
        return [(self.units[i], float(p[i])) for i in idx]


class NGramModel(LanguageModel):
    """Interpolated absolute-discounting n-gram model; immutable once built."""

    def __init__(
        self,
        order: int,
        discount: float | Sequence[float],
        units: Iterable[str],
        counts: Sequence[Mapping[tuple[str, ...], Mapping[str, int]]],
        cache_size: int = 1024,
    ):
        if order < 1:
            raise ValueError("order must be >= 1")
        discounts = tuple(discount) if isinstance(discount, (list, tuple)) else (float(discount),) * order
        if len(discounts) != order or not all(0.0 < d < 1.0 for d in discounts):
            raise ValueError("need one discount in (0, 1) per order")
        if len(counts) != order:
            raise ValueError("need one count table per order")
        self.order = order
        self.discounts = discounts
        self._init_inventory(units)
        # counts[k]: context of length k -> {next unit: count}
        self.counts = tuple({ctx: dict(nxt) for ctx, nxt in table.items()} for table in counts)
        self._tables = []
        for table in self.counts:
            compiled = {}
            for ctx, nxt in table.items():
                items = sorted(nxt.items())
                ids = np.fromiter((self.index[u] for u, _ in items), dtype=np.int64, count=len(items))
                cnt = np.fromiter((c for _, c in items), dtype=np.float64, count=len(items))
                lookup = {self.index[u]: c for u, c in items}
                compiled[ctx] = (ids, cnt, float(cnt.sum()), len(items), lookup)
            self._tables.append(compiled)
        self._cached = lru_cache(maxsize=cache_size)(self._compute)

    @property
    def discount(self) -> float:
        return self.discounts[-1]

    def _compute(self, ctx: tuple[str, ...]) -> np.ndarray:
        v = len(self.units)
        p = np.full(v, 1.0 / v)
        for k in range(len(ctx) + 1):
            entry = self._tables[k].get(ctx[len(ctx) - k :])
            if entry is None:
                break  # a longer context cannot have been seen either
            ids, cnt, total, distinct, _ = entry
            d = self.discounts[k]
            p *= d * distinct / total
            p[ids] += (cnt - d) / total
        p.setflags(write=False)
        return p

    def prob(self, context: Sequence[str], unit: str) -> float:
        # scalar twin of _compute; same operation order, so bit-identical
        ctx = self.truncate(context)
        w = self.unit_id(unit)
        p = 1.0 / len(self.units)
        for k in range(len(ctx) + 1):
            entry = self._tables[k].get(ctx[len(ctx) - k :])
            if entry is None:
                break
            _, _, total, distinct, lookup = entry
            d = self.discounts[k]
            p = p * (d * distinct / total)
            c = lookup.get(w)
            if c is not None:
                p = p + (c - d) / total
        return p

    def distribution(self, context: Sequence[str]) -> np.ndarray:
        return self._cached(self.truncate(context))

    def save(self, path, provenance: Mapping[str, str] | None = None) -> None:
        disc = ",".join(repr(d) for d in self.discounts) if len(set(self.discounts)) > 1 else repr(self.discounts[0])
        lines = [f"{MODEL_HEADER} {self.order} {disc}"]
        lines.extend(f"# {k}={v}" for k, v in (provenance or {}).items())
        lines.append(f"units {len(self.units)}")
        lines.extend(self.units)
        rows = []
        for table in self.counts:
            for ctx in sorted(table):
                for nxt, c in sorted(table[ctx].items()):
                    rows.append("\t".join((str(c),) + ctx + (nxt,)))
        lines.append(f"ngrams {len(rows)}")
        lines.extend(rows)
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "NGramModel":
        lines = Path(path).read_text(encoding="utf-8").split("\n")
        head = lines[0].split(" ")
        if len(head) != 4 or " ".join(head[:2]) != MODEL_HEADER:
            raise FormatError(f"{path}: missing header {MODEL_HEADER!r}")
        order = int(head[2])
        discs = [float(x) for x in head[3].split(",")]
        i = 1
        while lines[i].startswith("# "):
            i += 1
        tag, n_units = lines[i].split(" ")
        if tag != "units":
            raise FormatError(f"{path}:{i + 1}: expected 'units <n>'")
        units = lines[i + 1 : i + 1 + int(n_units)]
        i += 1 + int(n_units)
        tag, n_rows = lines[i].split(" ")
        if tag != "ngrams":
            raise FormatError(f"{path}:{i + 1}: expected 'ngrams <n>'")
        counts: list[dict] = [defaultdict(dict) for _ in range(order)]
        for row in lines[i + 1 : i + 1 + int(n_rows)]:
            fields = row.split("\t")
            ctx = tuple(fields[1:-1])
            counts[len(ctx)][ctx][fields[-1]] = int(fields[0])
        return cls(order, discs if len(discs) > 1 else discs[0], units, counts)


def _unit_lists(streams) -> list[list[str]]:
    out = []
    for s in streams:
        out.append(list(s.units) if hasattr(s, "units") else list(s))
    return out


def train(
    streams: Iterable,
    order: int = DEFAULT_ORDER,
    discount: float | Sequence[float] = DEFAULT_DISCOUNT,
    extra_units: Iterable[str] = (),
) -> NGramModel:
    """Count k-grams (k <= order) over per-file unit sequences.

    Each sequence is wrapped as ``<s> u1 ... un </s>``. ``extra_units`` joins
    the inventory without counts, e.g. every unit a BPE vocabulary can emit.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    seqs = _unit_lists(streams)
    if not seqs:
        raise EmptyCorpus("no streams to train on")
    counts: list[dict] = [defaultdict(lambda: defaultdict(int)) for _ in range(order)]
    seen: set[str] = set()
    for units in seqs:
        seq = [BOS, *units, EOS]
        seen.update(units)
        for j in range(1, len(seq)):
            nxt = seq[j]
            for k in range(min(order, j + 1)):
                counts[k][tuple(seq[j - k : j])][nxt] += 1
    return NGramModel(order, discount, seen | set(extra_units), counts)


def prob(model: LanguageModel, context: Sequence[str], next_unit: str) -> float:
    return model.prob(context, next_unit)


def top_candidates(model: LanguageModel, context: Sequence[str], k: int) -> list[tuple[str, float]]:
    return model.top_candidates(context, k)
