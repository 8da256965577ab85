import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from splitbpe.bpe import MARKER, Vocabulary, decode, encode, train
from splitbpe.errors import FormatError, MissingTable
from splitbpe.lexer import Token, TokenKind, lex_file
from splitbpe.splitter import FrequencyTable, split
from splitbpe.strategy import (
    PipelineConfig,
    Strategy,
    SubwordStream,
    build_vocab_corpus,
    corpus_shrinkage,
    process_input_token,
    read_streams,
    tokenize_file,
    train_vocabulary,
    write_streams,
)

ID = TokenKind.IDENTIFIER
TABLE = FrequencyTable({"get": 10, "category": 10, "to": 10, "string": 10, "listener": 5})


def ident(text):
    return Token(text, ID)


def config(strategy, table=TABLE, size=50):
    return PipelineConfig(Strategy(strategy), size, table)


def test_missing_table():
    with pytest.raises(MissingTable):
        build_vocab_corpus([ident("x")], PipelineConfig(Strategy.SIMPLE, 10, None))
    with pytest.raises(MissingTable):
        process_input_token(ident("x"), Vocabulary((), frozenset("x")), PipelineConfig("hybrid", 10))
    # Original needs no table
    assert build_vocab_corpus([ident("x")], PipelineConfig()) == [ident("x")]


def test_vocab_corpus_examples():
    assert [t.text for t in build_vocab_corpus([ident("getListener")], config("simple"))] == ["get", "Listener"]
    assert [t.text for t in build_vocab_corpus([ident("x")], config("hybrid"))] == ["x", "x"]
    kw = Token("while", TokenKind.KEYWORD)
    assert build_vocab_corpus([kw], config("simple")) == [kw]


def test_separator_pieces_become_punctuation():
    out = build_vocab_corpus([ident("http_get")], config("simple"))
    assert [(t.text, t.kind) for t in out] == [("http", ID), ("_", TokenKind.PUNCTUATION), ("get", ID)]


def test_hybrid_getcategory():
    merges = (
        ("g", "e"), ("ge", "t"), ("get", "C"), ("a", "t"), ("at", "e"),
        ("ate", "g"), ("o", "r"), ("or", "y"), ("C", "ateg"), ("Categ", "ory"),
    )  # fmt: skip
    vocab = Vocabulary(merges, frozenset("getCaory"))
    tok = ident("getCategory")
    assert process_input_token(tok, vocab, config("original")) == ["getC@@", "ateg@@", "ory"]
    assert process_input_token(tok, vocab, config("hybrid")) == ["get@@", "Category"]
    assert process_input_token(tok, vocab, config("simple")) == ["get@@", "Category"]


def test_hybrid_keeps_single_unit_identifier():
    vocab = train(["toString"] * 3, 20)
    assert encode("toString", vocab) == ["toString"]
    tok = ident("toString")
    assert process_input_token(tok, vocab, config("hybrid")) == ["toString"]
    simple = process_input_token(tok, vocab, config("simple"))
    assert len(simple) > 1 and decode(simple) == "toString"


def test_non_identifier_is_just_encoded():
    vocab = train(["int", "int", "in"], 10)
    kw = Token("int", TokenKind.KEYWORD)
    for s in Strategy:
        assert process_input_token(kw, vocab, config(s)) == encode("int", vocab)


def test_shrinkage_examples():
    toks = [ident("getA"), ident("getB")]
    assert corpus_shrinkage(toks, None) == (2, 3, 1 - 3 / 2)
    toks = [ident(t) for t in ("aB", "aC", "aD", "aE")]
    assert corpus_shrinkage(toks, None) == (4, 5, 1 - 5 / 4)
    assert corpus_shrinkage([], None) == (0, 0, 0.0)


def test_shrinkage_counts_non_identifiers_as_is():
    toks = lex_file("getA(getB); getA;")
    before, after, _ = corpus_shrinkage(toks, None)
    assert (before, after) == (5, 6)


def test_tokenize_file_spans():
    src = "int getCategory = toString;"
    toks = lex_file(src, "f.c")
    vocab = train_vocabulary(toks * 3, config("hybrid"))
    stream = tokenize_file(toks, vocab, config("hybrid"))
    assert stream.file_id == "f.c"
    assert len(stream) == len(toks)
    assert [stream.token_text(i) for i in range(len(stream))] == [t.text for t in toks]
    assert [s.kind for s in stream.token_spans] == [t.kind for t in toks]
    assert stream.config_id == config("hybrid").config_id(vocab)


def test_config_id_distinguishes_strategies():
    vocab = Vocabulary((), frozenset("a"))
    ids = {config(s).config_id(vocab) for s in Strategy}
    assert len(ids) == 3


def test_stream_file_round_trip(tmp_path):
    streams = [
        SubwordStream(["int", "get@@", "x", ";"], []),
        SubwordStream([], []),
        SubwordStream(["<str>", "#"], []),
    ]
    path = tmp_path / "s.txt"
    write_streams(path, streams, {"strategy": "hybrid", "config_id": "abc"})
    meta, files = read_streams(path)
    assert meta == {"strategy": "hybrid", "config_id": "abc"}
    assert files == [s.units for s in streams]


def test_stream_file_needs_header(tmp_path):
    path = tmp_path / "s.txt"
    path.write_text("a\n\n")
    with pytest.raises(FormatError):
        read_streams(path)


# --- properties ---------------------------------------------------------

words = ["get", "set", "name", "list", "node", "size", "item", "to", "x"]
caps = st.sampled_from(words).map(str.capitalize)
compounds = st.builds(lambda a, b: a + b, st.sampled_from(words), caps) | st.sampled_from(words)
# the alphabet token keeps every probe free of unknown characters
ALPHABET_TOKEN = ident("".join(sorted(set("".join(words + [w.upper() for w in words])))))
token_lists = st.lists(compounds, min_size=1, max_size=25).map(lambda xs: [ident(x) for x in xs] + [ALPHABET_TOKEN])
word_table = FrequencyTable({w: 5 for w in words if len(w) > 1})


@settings(max_examples=100, deadline=None)
@given(st.lists(st.sampled_from(words), min_size=1, max_size=25), st.integers(0, 30))
def test_split_free_corpus_gives_identical_results(texts, size):
    toks = [ident(t) for t in texts] + [Token(";", TokenKind.PUNCTUATION)]
    vocabs = {s: train_vocabulary(toks, PipelineConfig(s, size, word_table)) for s in Strategy}
    assert vocabs[Strategy.ORIGINAL] == vocabs[Strategy.SIMPLE] == vocabs[Strategy.HYBRID]
    streams = {s: tokenize_file(toks, vocabs[s], PipelineConfig(s, size, word_table)).units for s in Strategy}
    assert streams[Strategy.ORIGINAL] == streams[Strategy.SIMPLE] == streams[Strategy.HYBRID]


@settings(max_examples=150, deadline=None)
@given(token_lists, st.integers(0, 60), compounds)
def test_hybrid_is_conservative(toks, size, probe):
    cfg = PipelineConfig(Strategy.HYBRID, size, word_table)
    vocab = train_vocabulary(toks, cfg)
    tok = ident(probe)
    if encode(probe, vocab) == [probe]:
        assert process_input_token(tok, vocab, cfg) == process_input_token(tok, vocab, config("original", word_table, size))


@settings(max_examples=150, deadline=None)
@given(token_lists, st.integers(0, 60), st.sampled_from(list(Strategy)), compounds)
def test_decoding_reproduces_tokens(toks, size, strategy, probe):
    cfg = PipelineConfig(strategy, size, word_table)
    vocab = train_vocabulary(toks, cfg)
    units = process_input_token(ident(probe), vocab, cfg)
    assert decode(units) == probe
    assert all(u.endswith(MARKER) for u in units[:-1])


@settings(max_examples=150, deadline=None)
@given(token_lists, st.integers(0, 60), compounds)
def test_simple_units_respect_split_boundaries(toks, size, probe):
    cfg = PipelineConfig(Strategy.SIMPLE, size, word_table)
    vocab = train_vocabulary(toks, cfg)
    units = process_input_token(ident(probe), vocab, cfg)
    cuts, pos = set(), 0
    for piece in split(probe, word_table).pieces:
        pos += len(piece)
        cuts.add(pos)
    start = 0
    for u in units:
        end = start + len(u.removesuffix(MARKER))
        assert not any(start < c < end for c in cuts)
        start = end
