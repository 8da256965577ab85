"""Beam search from sub-word predictions to complete-token candidates.

A hypothesis is a run of units; it is complete once its last unit has no
``@@`` marker. Completed hypotheses are decoded and pooled by text (keeping
the best score when two segmentations decode to the same token). The search
stops as soon as the k-th pooled score is strictly above every live
hypothesis, since extending a hypothesis can only lower its score.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .bpe import MARKER, decode
from .lm import BOS, EOS, LanguageModel

__all__ = ["CompletionCandidate", "complete", "rank_of_truth", "DEFAULT_K", "DEFAULT_WIDTH", "DEFAULT_MAX_UNITS"]

DEFAULT_K = 10
DEFAULT_WIDTH = 16
DEFAULT_MAX_UNITS = 8

# sequence sentinels are never part of a token
NON_TOKEN_UNITS = frozenset({BOS, EOS})


@dataclass(frozen=True)
class CompletionCandidate:
    token_text: str
    log_prob: float


def complete(
    model: LanguageModel,
    context: Sequence[str],
    k: int = DEFAULT_K,
    width: int = DEFAULT_WIDTH,
    max_units: int = DEFAULT_MAX_UNITS,
) -> list[CompletionCandidate]:
    """Top-``k`` complete tokens following ``context``, best first.

    ``log_prob`` is the natural log of the product of the unit
    probabilities. Fewer than ``k`` candidates come back only when no other
    token is reachable within ``max_units`` units.
    """
    if k < 1 or width < k or max_units < 1:
        raise ValueError("need k >= 1, width >= k and max_units >= 1")
    context = list(context)
    live: list[tuple[tuple[str, ...], float]] = [((), 0.0)]
    pool: dict[str, float] = {}
    for _ in range(max_units):
        grown = []
        for units, score in live:
            for unit, p in model.top_candidates(context + list(units), width):
                if unit in NON_TOKEN_UNITS or p <= 0.0:
                    continue
                s = score + math.log(p)
                seq = units + (unit,)
                if unit.endswith(MARKER):
                    grown.append((seq, s))
                else:
                    text = decode(seq)
                    if s > pool.get(text, -math.inf):
                        pool[text] = s
        grown.sort(key=lambda h: (-h[1], h[0]))
        live = grown[:width]
        if not live:
            break
        if len(pool) >= k and sorted(pool.values(), reverse=True)[k - 1] > live[0][1]:
            break
    ranked = sorted(pool.items(), key=lambda kv: (-kv[1], kv[0]))[:k]
    return [CompletionCandidate(text, score) for text, score in ranked]


def rank_of_truth(candidates: Sequence[CompletionCandidate | str], truth: str) -> Optional[int]:
    """1-based position of ``truth`` among ``candidates``, or None if absent."""
    for i, cand in enumerate(candidates, start=1):
        text = cand.token_text if isinstance(cand, CompletionCandidate) else cand
        if text == truth:
            return i
    return None
