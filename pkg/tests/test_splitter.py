import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import segment_oracle
from splitbpe.errors import FormatError
from splitbpe.splitter import (
    FrequencyTable,
    build_frequency_table,
    split,
    split_convention,
    split_same_case,
)


@pytest.mark.parametrize(
    "ident, pieces, words",
    [
        ("getListener", ("get", "Listener"), ("get", "listener")),
        ("addItemsToList", ("add", "Items", "To", "List"), ("add", "items", "to", "list")),
        ("http_request", ("http", "_", "request"), ("http", "request")),
        ("XMLParser", ("XML", "Parser"), ("xml", "parser")),
        ("MAX_LEN", ("MAX", "_", "LEN"), ("max", "len")),
        ("utf8Decode", ("utf", "8", "Decode"), ("utf", "8", "decode")),
        ("__init__", ("_", "_", "init", "_", "_"), ("init",)),
        ("x", ("x",), ("x",)),
    ],
)
def test_convention_split(ident, pieces, words):
    res = split(ident)
    assert res.pieces == pieces
    assert res.words == words


def test_same_case_with_table(http_table):
    assert split("httprequest", http_table).pieces == ("http", "request")
    assert split("getHttprequest", http_table).pieces == ("get", "Http", "request")


def test_same_case_small_examples():
    assert split_same_case("xyz", FrequencyTable({})) == ["xyz"]
    table = FrequencyTable({"size": 5, "of": 5})
    assert split_same_case("sizeof", table) == ["size", "of"]
    assert split_same_case("sizeof", table, baseline=2 * math.log(5) + 1) == ["sizeof"]


@pytest.mark.parametrize(
    "idents, min_count, expected",
    [
        (["getHttp", "httpSend"], 2, {"http": 2}),
        ([], 1, {}),
        (["aB", "aB", "aB"], 1, {"a": 3, "b": 3}),
    ],
)
def test_build_frequency_table(idents, min_count, expected):
    assert dict(build_frequency_table(idents, min_count).counts) == expected


def test_all_underscores_has_no_words():
    assert split("___").pieces == ("_", "_", "_")
    assert split("___").words == ()


def test_split_needs_to_beat_the_whole_word():
    table = FrequencyTable({"ab": 3, "cd": 3, "abcd": 100})
    assert split_same_case("abcd", table) == ["abcd"]
    table = FrequencyTable({"ab": 50, "cd": 50, "abcd": 2})
    assert split_same_case("abcd", table) == ["ab", "cd"]


def test_unknown_word_stays_whole():
    table = FrequencyTable({"http": 10})
    # every split would pay the per-character penalty
    assert split_same_case("zzzzzzzz", table) == ["zzzzzzzz"]


def test_short_pieces_are_not_resplit():
    table = FrequencyTable({"ab": 9, "cd": 9, "abcdefgh": 1})
    # shortest table word is 2 so pieces below 4 characters are left alone
    assert split("abc", table).pieces == ("abc",)
    assert split("abcd", table).pieces == ("ab", "cd")


def test_table_case_insensitive_and_pruned():
    table = build_frequency_table(["getName", "GET_NAME", "setName", "fooBar"], min_count=2)
    assert dict(table.counts) == {"get": 2, "name": 3}
    assert table.count("NAME") == 3
    assert "Name" in table
    assert table.shortest_word == 3


def test_table_round_trip(tmp_path):
    table = FrequencyTable({"http": 10, "request": 7, "a": 3}, min_count=3)
    path = tmp_path / "t.tsv"
    table.save(path, {"corpus_manifest": "abc"})
    again = FrequencyTable.load(path)
    assert again == table


def test_table_load_rejects_bad_header(tmp_path):
    path = tmp_path / "t.tsv"
    path.write_text("nonsense\n")
    with pytest.raises(FormatError):
        FrequencyTable.load(path)


identifiers = st.from_regex(r"[A-Za-z_][A-Za-z0-9_]{0,20}", fullmatch=True)
lower_words = st.sampled_from(["get", "set", "http", "request", "name", "list", "ab", "a", "xy", "node"])
tables = st.dictionaries(lower_words, st.integers(1, 200), max_size=8).map(FrequencyTable)


@settings(max_examples=400)
@given(identifiers, tables)
def test_split_is_an_exact_cover(ident, table):
    res = split(ident, table)
    assert "".join(res.pieces) == ident
    assert all(res.pieces)


@settings(max_examples=300)
@given(identifiers, tables)
def test_convention_split_is_idempotent(ident, table):
    for piece in split(ident, table).pieces:
        assert split_convention(piece).pieces == (piece,)


@settings(max_examples=300)
@given(identifiers, tables, lower_words, st.integers(1, 200))
def test_convention_bounds_survive_any_table(ident, table, word, count):
    bigger = FrequencyTable({**table.counts, word: table.count(word) + count})
    conv_bounds = _bounds(split_convention(ident).pieces)
    assert conv_bounds <= _bounds(split(ident, table).pieces)
    assert conv_bounds <= _bounds(split(ident, bigger).pieces)


@settings(max_examples=400)
@given(identifiers, tables, lower_words, st.integers(1, 200))
def test_enlarging_table_leaves_pieces_without_table_words(ident, table, word, count):
    bigger = FrequencyTable({**table.counts, word: table.count(word) + count})
    for piece in split_convention(ident).pieces:
        if any(w in piece.lower() for w in bigger.counts if len(w) >= 2):
            continue
        assert split(piece, table).pieces == (piece,)
        assert split(piece, bigger).pieces == (piece,)


def _bounds(pieces):
    out, pos = set(), 0
    for p in pieces:
        pos += len(p)
        out.add(pos)
    return out


@settings(max_examples=400)
@given(
    st.text(alphabet="abcdeghnostx", min_size=1, max_size=9),
    st.dictionaries(st.text(alphabet="abcdeghnostx", min_size=1, max_size=4), st.integers(1, 60), max_size=10),
    st.integers(1, 8),
)
def test_dp_matches_exhaustive_search(word, counts, min_count):
    table = FrequencyTable(counts)
    if not table.counts:
        return
    baseline = math.log(min_count)
    assert split_same_case(word, table, baseline=baseline) == segment_oracle(word, table.counts, baseline)
