"""
Lexing C code and splitting identifiers
=======================================

Source text becomes a flat list of tokens, then each identifier is cut into
the words a programmer would read in it.
"""

from splitbpe import lexer, splitter

source = b"""
#include <stdio.h>
/* a comment disappears */
static int getNodeSize(struct node *n) { return n->byteCount + MAX_LEN; }
const char *msg = "this string is much too long to keep";
"""

tokens = lexer.lex_file(source, file_id="demo.c")
for tok in tokens[:12]:
    print(f"{tok.kind.value:12s} {tok.text!r:18s} at byte {tok.span[0]}")

###############################################################################
# Long string literals are replaced by a placeholder, so the vocabulary is not
# flooded with one-off strings.

print([t.text for t in tokens if t.kind is lexer.TokenKind.PLACEHOLDER])

###############################################################################
# Naming conventions alone give most of the split points.

for name in ("getNodeSize", "byteCount", "MAX_LEN", "XMLHttpRequest", "utf8Decode"):
    print(name, "->", splitter.split(name).pieces)

###############################################################################
# Lower-case run-together names need word statistics. The frequency table is
# counted from the convention-split identifiers of a corpus.

corpus_identifiers = ["getNode", "nodeSize", "setSize", "readBuffer", "bufferSize", "getBuffer"] * 3
table = splitter.build_frequency_table(corpus_identifiers, min_count=2)
print(dict(table.counts))
for name in ("nodesize", "getbuffersize", "readbuf"):
    print(name, "->", splitter.split(name, table).pieces)
