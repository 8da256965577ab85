import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from splitbpe.lexer import KEYWORDS, PLACEHOLDERS, Token, TokenKind, is_identifier, lex_file, scan


def kinds_texts(src):
    return [(t.kind.value, t.text) for t in lex_file(src)]


def test_simple_statement_drops_comment():
    assert kinds_texts("int x = get_y; /* c */") == [
        ("Keyword", "int"),
        ("Identifier", "x"),
        ("Punctuation", "="),
        ("Identifier", "get_y"),
        ("Punctuation", ";"),
    ]


def test_long_string_becomes_placeholder():
    assert kinds_texts('"' + "a" * 16 + '"') == [("Placeholder", "<str>")]


def test_fifteen_char_string_is_kept():
    src = '"' + "a" * 15 + '"'
    assert kinds_texts(src) == [("StringLiteral", src)]


def test_non_ascii_identifier_dropped():
    assert kinds_texts("f(évariable)") == [("Identifier", "f"), ("Punctuation", "("), ("Punctuation", ")")]


def test_non_ascii_short_string_dropped():
    assert kinds_texts('x = "café";') == [("Identifier", "x"), ("Punctuation", "="), ("Punctuation", ";")]


def test_line_comment_and_preprocessor():
    src = "#include <stdio.h> // io\nint a;"
    assert kinds_texts(src) == [
        ("Punctuation", "#"),
        ("Identifier", "include"),
        ("Punctuation", "<"),
        ("Identifier", "stdio"),
        ("Punctuation", "."),
        ("Identifier", "h"),
        ("Punctuation", ">"),
        ("Keyword", "int"),
        ("Identifier", "a"),
        ("Punctuation", ";"),
    ]


@pytest.mark.parametrize(
    "src, expected",
    [
        ("a->b", ["a", "->", "b"]),
        ("x<<=2", ["x", "<<=", "2"]),
        ("i++ + ++j", ["i", "++", "+", "++", "j"]),
        ("0x1Fu 1.5e-3f .5", ["0x1Fu", "1.5e-3f", ".5"]),
        ("a...b", ["a", "...", "b"]),
        ("p@q", ["p", "@", "q"]),
    ],
)
def test_operators_and_numbers(src, expected):
    assert [t.text for t in lex_file(src)] == expected


def test_char_and_prefixed_literals():
    toks = lex_file("c = 'x'; s = L\"wide\"; u = u8\"ok\";")
    lits = [(t.kind, t.text) for t in toks if t.kind in (TokenKind.CHAR, TokenKind.STRING)]
    assert lits == [(TokenKind.CHAR, "'x'"), (TokenKind.STRING, 'L"wide"'), (TokenKind.STRING, 'u8"ok"')]


def test_whitespace_inside_short_string_is_escaped():
    (tok,) = [t for t in lex_file('s = "a b";') if t.kind is TokenKind.STRING]
    assert tok.text == '"a\\040b"'
    assert tok.span == (4, 5)


def test_unterminated_block_comment_runs_to_eof():
    assert kinds_texts("a /* never closed\n b") == [("Identifier", "a")]


def test_spans_are_byte_offsets():
    toks = lex_file("é x")  # the accent is two bytes
    assert toks == [Token("x", TokenKind.IDENTIFIER, (3, 1), None)]


def test_keywords_are_c11():
    assert len(KEYWORDS) == 44
    assert {"_Static_assert", "restrict", "inline", "while"} <= KEYWORDS


def test_is_identifier():
    assert not is_identifier(Token("while", TokenKind.KEYWORD))
    assert is_identifier(Token("getListener", TokenKind.IDENTIFIER))
    assert not is_identifier(Token("<str>", TokenKind.PLACEHOLDER))


def test_file_id_attached():
    assert all(t.file_id == "a.c" for t in lex_file("int a;", "a.c"))


source_text = st.lists(
    st.sampled_from(list("ab_Z09 \t\n\"'/*#+-<>=.;\\") + ["é", "//", "/*", "*/", "\r\n"]),
    max_size=40,
).map("".join)


@settings(max_examples=300)
@given(source_text)
def test_regions_tile_the_input(src):
    raw = src.encode("utf-8")
    regions = list(scan(raw))
    pos = 0
    for r in regions:
        assert r.start == pos and r.length > 0
        pos += r.length
    assert pos == len(raw)


@settings(max_examples=300)
@given(source_text)
def test_token_invariants(src):
    toks = lex_file(src)
    assert toks == lex_file(src)
    for t in toks:
        assert t.text and not any(c in t.text for c in " \t\n\r\v\f")
        assert t.text.isascii()
        if t.kind is TokenKind.KEYWORD:
            assert t.text in KEYWORDS
        if t.kind is TokenKind.IDENTIFIER:
            assert t.text not in KEYWORDS
            assert t.text[0].isalpha() or t.text[0] == "_"
            assert all(c.isalnum() or c == "_" for c in t.text)
        if t.kind is TokenKind.PLACEHOLDER:
            assert t.text in PLACEHOLDERS
