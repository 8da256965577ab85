"""C-family lexer with the corpus cleaning rules used for language modelling.

The lexer works on raw bytes. Text input is encoded as UTF-8 first, and
every offset in a :class:`Token` span is a byte offset into that encoding.
Comments and whitespace are removed, string literals whose content is longer
than 15 characters become the ``<str>`` placeholder, and any token that
contains a byte >= 0x80 is dropped.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Hashable, Iterator, NamedTuple, Union

__all__ = [
    "KEYWORDS",
    "PLACEHOLDERS",
    "MAX_STRING_CONTENT",
    "TokenKind",
    "Token",
    "Region",
    "scan",
    "lex_file",
    "is_identifier",
]

# C11, 6.4.1
KEYWORDS = frozenset(
    """
    auto break case char const continue default do double else enum extern
    float for goto if inline int long register restrict return short signed
    sizeof static struct switch typedef union unsigned void volatile while
    _Alignas _Alignof _Atomic _Bool _Complex _Generic _Imaginary _Noreturn
    _Static_assert _Thread_local
    """.split()
)

STR_PLACEHOLDER = "<str>"
NUM_PLACEHOLDER = "<num>"
UNK_PLACEHOLDER = "<unk>"
PLACEHOLDERS = frozenset({STR_PLACEHOLDER, NUM_PLACEHOLDER, UNK_PLACEHOLDER})

MAX_STRING_CONTENT = 15

# Longest first so that a prefix scan picks the maximal munch.
_PUNCTUATORS = sorted(
    """
    %:%: ... <<= >>= -> ++ -- << >> <= >= == != && || *= /= %= += -= &= ^= |=
    ## <: :> <% %> %: [ ] ( ) { } . & * + - ~ ! / % < > ^ | ? : ; = , #
    """.split(),
    key=len,
    reverse=True,
)

_WS = frozenset(b" \t\n\r\v\f")
_IDENT_START = frozenset(b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz_") | frozenset(range(0x80, 0x100))
_IDENT_CONT = _IDENT_START | frozenset(b"0123456789")
_DIGITS = frozenset(b"0123456789")
_PPNUM_CONT = frozenset(b"0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz_.")
_STRING_PREFIXES = (b"u8", b"L", b"u", b"U")


class TokenKind(str, enum.Enum):
    IDENTIFIER = "Identifier"
    KEYWORD = "Keyword"
    NUMBER = "NumberLiteral"
    STRING = "StringLiteral"
    CHAR = "CharLiteral"
    PUNCTUATION = "Punctuation"
    PLACEHOLDER = "Placeholder"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Token:
    text: str
    kind: TokenKind
    span: tuple[int, int] = (0, 0)
    file_id: Hashable = None

    def __repr__(self) -> str:
        return f"Token({self.kind.value} {self.text!r} @{self.span[0]}+{self.span[1]})"


class Region(NamedTuple):
    """A contiguous byte range of the input and what became of it.

    ``token`` is None for removed material; ``reason`` then says why
    ("whitespace", "comment", "non_ascii").
    """

    start: int
    length: int
    token: Token | None
    reason: str


def _escape_whitespace(text: str) -> str:
    # keeps short literals whitespace-free; octal escapes never absorb a following digit
    return "".join("\\%03o" % ord(c) if c in " \t\n\r\v\f" else c for c in text)


def _scan_quoted(buf: bytes, pos: int, quote: int) -> int:
    """Return the end offset of a quoted literal whose opening quote is at ``pos``."""
    n = len(buf)
    i = pos + 1
    while i < n:
        c = buf[i]
        if c == 0x5C:  # backslash
            i += 2
            continue
        if c == quote:
            return i + 1
        if c == 0x0A:  # unterminated: stop before the newline
            return i
        i += 1
    return n


def _line_end(buf: bytes, pos: int) -> int:
    n = len(buf)
    i = pos
    while i < n:
        if buf[i] == 0x0A and not (i > 0 and buf[i - 1] == 0x5C):
            return i
        i += 1
    return n


def _as_bytes(source: Union[str, bytes]) -> bytes:
    if isinstance(source, str):
        return source.encode("utf-8", errors="surrogateescape")
    return bytes(source)


def scan(source: Union[str, bytes], file_id: Hashable = None) -> Iterator[Region]:
    """Yield regions that exactly tile the input, in order."""
    buf = _as_bytes(source)
    text = buf.decode("latin-1")  # one char per byte, so indices are byte offsets
    n = len(buf)
    pos = 0
    while pos < n:
        c = buf[pos]

        if c in _WS or c < 0x20 or c == 0x7F:
            end = pos + 1
            while end < n and (buf[end] in _WS or buf[end] < 0x20 or buf[end] == 0x7F):
                end += 1
            yield Region(pos, end - pos, None, "whitespace")
            pos = end
            continue

        if buf.startswith(b"//", pos):
            end = _line_end(buf, pos)
            yield Region(pos, end - pos, None, "comment")
            pos = end
            continue

        if buf.startswith(b"/*", pos):
            close = buf.find(b"*/", pos + 2)
            end = n if close < 0 else close + 2
            yield Region(pos, end - pos, None, "comment")
            pos = end
            continue

        quote_at = -1
        for prefix in _STRING_PREFIXES:
            if buf.startswith(prefix, pos) and pos + len(prefix) < n and buf[pos + len(prefix)] in b"\"'":
                quote_at = pos + len(prefix)
                break
        if quote_at < 0 and c in b"\"'":
            quote_at = pos
        if quote_at >= 0:
            quote = buf[quote_at]
            end = _scan_quoted(buf, quote_at, quote)
            raw = text[pos:end]
            closed = end - quote_at >= 2 and buf[end - 1] == quote
            content = text[quote_at + 1 : end - 1 if closed else end]
            if quote == 0x22 and len(content) > MAX_STRING_CONTENT:
                tok = Token(STR_PLACEHOLDER, TokenKind.PLACEHOLDER, (pos, end - pos), file_id)
                yield Region(pos, end - pos, tok, "long_string")
            elif any(ord(ch) >= 0x80 for ch in raw):
                yield Region(pos, end - pos, None, "non_ascii")
            else:
                kind = TokenKind.STRING if quote == 0x22 else TokenKind.CHAR
                tok = Token(_escape_whitespace(raw), kind, (pos, end - pos), file_id)
                yield Region(pos, end - pos, tok, "token")
            pos = end
            continue

        if c in _IDENT_START:
            end = pos + 1
            while end < n and buf[end] in _IDENT_CONT:
                end += 1
            word = text[pos:end]
            if any(b >= 0x80 for b in buf[pos:end]):
                yield Region(pos, end - pos, None, "non_ascii")
            else:
                kind = TokenKind.KEYWORD if word in KEYWORDS else TokenKind.IDENTIFIER
                yield Region(pos, end - pos, Token(word, kind, (pos, end - pos), file_id), "token")
            pos = end
            continue

        if c in _DIGITS or (c == 0x2E and pos + 1 < n and buf[pos + 1] in _DIGITS):
            end = pos + 1
            while end < n:
                b = buf[end]
                if b in b"+-" and buf[end - 1] in b"eEpP":
                    end += 1
                elif b in _PPNUM_CONT:
                    end += 1
                else:
                    break
            tok = Token(text[pos:end], TokenKind.NUMBER, (pos, end - pos), file_id)
            yield Region(pos, end - pos, tok, "token")
            pos = end
            continue

        for punct in _PUNCTUATORS:
            if text.startswith(punct, pos):
                end = pos + len(punct)
                break
        else:
            end = pos + 1  # stray ASCII such as '@', '$', '`', '\\'
        tok = Token(text[pos:end], TokenKind.PUNCTUATION, (pos, end - pos), file_id)
        yield Region(pos, end - pos, tok, "token")
        pos = end


def lex_file(source_text: Union[str, bytes], file_id: Hashable = None) -> list[Token]:
    """Lex one source file into cleaned tokens, in source order.

    >>> [t.text for t in lex_file("int x = get_y; /* c */")]
    ['int', 'x', '=', 'get_y', ';']
    """
    return [r.token for r in scan(source_text, file_id) if r.token is not None]


def is_identifier(token: Token) -> bool:
    return token.kind is TokenKind.IDENTIFIER
