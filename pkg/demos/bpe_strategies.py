"""
Three ways to combine splitting with BPE
========================================

BPE builds a vocabulary of sub-word units by repeatedly merging the most
frequent adjacent pair. Identifier splitting can happen before that, at input
time, or only where BPE would otherwise break a name apart.
"""

from splitbpe import bpe
from splitbpe.lexer import Token, TokenKind
from splitbpe.splitter import FrequencyTable
from splitbpe.strategy import PipelineConfig, Strategy, process_input_token

###############################################################################
# A hand-made merge list in which ``getC`` is created before ``Category``.

merges = [
    ("g", "e"), ("ge", "t"), ("get", "C"),
    ("a", "t"), ("at", "e"), ("ate", "g"),
    ("o", "r"), ("or", "y"), ("C", "ateg"), ("Categ", "ory"),
]
vocab = bpe.Vocabulary(tuple(merges), frozenset("getCaory"))
print(bpe.encode("getCategory", vocab))

###############################################################################
# Plain BPE replays the merges in order and ends up with awkward pieces.
# Hybrid notices that ``getCategory`` is not one unit, splits it at the
# naming-convention boundary and encodes each word.

table = FrequencyTable({"get": 10, "category": 10})
tok = Token("getCategory", TokenKind.IDENTIFIER)
for strategy in Strategy:
    units = process_input_token(tok, vocab, PipelineConfig(strategy, len(merges), table))
    print(f"{strategy.label:8s} {units}  -> {bpe.decode(units)}")

###############################################################################
# Training a vocabulary from tokens. Merges never cross token boundaries and
# ties go to the alphabetically smaller pair.

trained = bpe.train(["toString", "toString", "toString", "getString", "getName"], size_limit=20)
print(len(trained.merges), "merges; first five:", trained.merges[:5])
print(bpe.encode("toString", trained), bpe.encode("getString", trained), bpe.encode("toName", trained))
