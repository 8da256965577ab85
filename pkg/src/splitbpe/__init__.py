"""Identifier-splitting-augmented BPE for source code language models."""

from .bpe import Vocabulary, decode, encode, is_single_unit
from .completion import CompletionCandidate, complete, rank_of_truth
from .lexer import Token, TokenKind, is_identifier, lex_file
from .lm import LanguageModel, NGramModel
from .metrics import EvalReport, cross_entropy, evaluate, mrr, recall_at_k
from .splitter import FrequencyTable, SplitResult, build_frequency_table, split, split_convention, split_same_case
from .strategy import PipelineConfig, Strategy, SubwordStream, corpus_shrinkage, process_input_token

__version__ = "0.1.0"
FORMAT_VERSIONS = {
    "freqtable": "splitbpe-freqtable v1",
    "vocab": "splitbpe-vocab v1",
    "ngram": "splitbpe-ngram v1",
    "stream": "splitbpe-stream v1",
}
