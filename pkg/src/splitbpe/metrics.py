"""Per-token cross entropy, MRR and recall@k for code completion."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional, Sequence

from .bpe import Vocabulary
from .completion import DEFAULT_K, DEFAULT_MAX_UNITS, DEFAULT_WIDTH, complete, rank_of_truth
from .errors import ConfigMismatch
from .lexer import Token, TokenKind
from .lm import BOS, LanguageModel
from .strategy import PipelineConfig, Strategy, SubwordStream, tokenize_file

__all__ = [
    "EvalReport",
    "REFERENCE_RESULTS",
    "cross_entropy",
    "mrr",
    "recall_at_k",
    "evaluate",
    "CSV_COLUMNS",
]

# GRU on the full C corpus; kept as metadata, never asserted.
REFERENCE_RESULTS = {
    "Original": {"entropy": 4.46, "mrr_all": 64.61, "recall_at_10_identifiers": 37.55, "mrr_identifiers": 21.83},
    "Simple": {"entropy": 4.45, "mrr_all": 64.31, "recall_at_10_identifiers": 36.26, "mrr_identifiers": 20.59},
    "Hybrid": {"entropy": 4.37, "mrr_all": 65.24, "recall_at_10_identifiers": 38.93, "mrr_identifiers": 23.19},
}

CSV_COLUMNS = ("strategy", "entropy", "mrr_all", "recall_at_10_identifiers", "mrr_identifiers")


def cross_entropy(model: LanguageModel, streams: Iterable[SubwordStream]) -> float:
    """Average bits per token: sub-word log-probabilities summed within each token.

    History runs across token boundaries and restarts at every stream.
    """
    total = 0.0
    n_tokens = 0
    for stream in streams:
        history = [BOS]
        for span in stream.token_spans:
            for unit in stream.units[span.start : span.start + span.count]:
                total -= math.log2(model.prob(history, unit))
                history.append(unit)
            n_tokens += 1
    return total / n_tokens if n_tokens else 0.0


def mrr(ranks: Sequence[Optional[int]]) -> float:
    """Mean reciprocal rank; a missing rank counts as 0."""
    if not ranks:
        return 0.0
    return math.fsum(1.0 / r for r in ranks if r is not None) / len(ranks)


def recall_at_k(ranks: Sequence[Optional[int]], k: int = 10) -> float:
    if k < 1:
        raise ValueError("k must be >= 1")
    if not ranks:
        return 0.0
    return sum(1 for r in ranks if r is not None and r <= k) / len(ranks)


@dataclass
class EvalReport:
    strategy: str
    entropy_bits_per_token: float
    mrr_all: float
    mrr_identifiers: float
    recall_at_10_all: float
    recall_at_10_identifiers: float
    n_tokens: int
    n_identifiers: int
    k: int = DEFAULT_K
    metadata: dict = field(default_factory=dict)

    def table_row(self) -> dict:
        """Table-I-shaped row rounded to two decimals."""
        return {
            "strategy": Strategy(self.strategy).label,
            "entropy": round(self.entropy_bits_per_token, 2),
            "mrr_all": round(self.mrr_all, 2),
            "recall_at_10_identifiers": round(self.recall_at_10_identifiers, 2),
            "mrr_identifiers": round(self.mrr_identifiers, 2),
        }

    def to_dict(self) -> dict:
        out = asdict(self)
        out["counts"] = {"tokens": self.n_tokens, "identifiers": self.n_identifiers}
        out["rounded"] = self.table_row()
        out["reference_results"] = REFERENCE_RESULTS
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def reports_to_csv(reports: Iterable[EvalReport]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in reports:
        writer.writerow(r.table_row())
    return buf.getvalue()


def evaluate(
    model: LanguageModel,
    vocab: Vocabulary,
    config: PipelineConfig,
    test_corpus: Sequence[SubwordStream | Sequence[Token]],
    k: int = DEFAULT_K,
    width: int = DEFAULT_WIDTH,
    max_units: int = DEFAULT_MAX_UNITS,
) -> EvalReport:
    """Entropy over every stream and completion ranks at every token position.

    ``test_corpus`` holds either lexed files or streams already tokenized by
    :func:`tokenize_file`; the latter must carry the config id of
    ``(config, vocab)``. The ranking truth is always the original token text.
    """
    expected = config.config_id(vocab)
    streams = []
    for item in test_corpus:
        if isinstance(item, SubwordStream):
            if item.config_id is not None and item.config_id != expected:
                raise ConfigMismatch(f"stream tokenized under {item.config_id}, evaluating under {expected}")
            streams.append(item)
        else:
            streams.append(tokenize_file(item, vocab, config))

    ranks_all: list[Optional[int]] = []
    ranks_ident: list[Optional[int]] = []
    for stream in streams:
        for i, span in enumerate(stream.token_spans):
            context = [BOS] + stream.units[: span.start]
            cands = complete(model, context, k=k, width=width, max_units=max_units)
            rank = rank_of_truth(cands, stream.token_text(i))
            ranks_all.append(rank)
            if span.kind is TokenKind.IDENTIFIER:
                ranks_ident.append(rank)

    return EvalReport(
        strategy=str(config.strategy),
        entropy_bits_per_token=cross_entropy(model, streams),
        mrr_all=100.0 * mrr(ranks_all),
        mrr_identifiers=100.0 * mrr(ranks_ident),
        recall_at_10_all=100.0 * recall_at_k(ranks_all, 10),
        recall_at_10_identifiers=100.0 * recall_at_k(ranks_ident, 10),
        n_tokens=len(ranks_all),
        n_identifiers=len(ranks_ident),
        k=k,
        metadata={"config_id": expected, "width": width, "max_units": max_units},
    )
