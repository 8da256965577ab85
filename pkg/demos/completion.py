"""
Completing the next token with an n-gram model
==============================================

The language model predicts sub-word units. Beam search stitches them back
into whole tokens and ranks the candidates.
"""

from splitbpe import lm
from splitbpe.completion import complete
from splitbpe.lexer import lex_file
from splitbpe.splitter import build_frequency_table
from splitbpe.strategy import PipelineConfig, Strategy, tokenize_file, train_vocabulary

files = [
    b"int getSize(struct node *n) { return n->size; }",
    b"int getName(struct node *n) { return n->name; }",
    b"void setSize(struct node *n, int size) { n->size = size; }",
    b"void setName(struct node *n, int name) { n->name = name; }",
]
tokens = [lex_file(src, file_id=f"f{i}.c") for i, src in enumerate(files)]
flat = [t for f in tokens for t in f]

table = build_frequency_table((t.text for t in flat if t.kind.value == "Identifier"), min_count=1)
config = PipelineConfig(Strategy.HYBRID, vocab_size=40, split_table=table)
vocab = train_vocabulary(flat, config)
streams = [tokenize_file(f, vocab, config) for f in tokens]
print(streams[0].units)

###############################################################################
# A 4-gram model with absolute discounting. Each file is one sequence.

model = lm.train(streams, order=4, discount=0.75)
print("units in the model:", model.vocab_size)

###############################################################################
# In this corpus ``void`` starts setters and ``int`` starts getters. The
# candidates are whole tokens put together from sub-word units.

for prefix in (b"void", b"int"):
    context = tokenize_file(lex_file(prefix), vocab, config).units
    print(prefix.decode(), "->")
    for cand in complete(model, [lm.BOS, *context], k=4, width=8, max_units=4):
        print(f"    {cand.token_text:10s} {cand.log_prob:8.3f}")
