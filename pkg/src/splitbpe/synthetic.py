"""Synthetic C corpora built from a small inventory of words.

Identifiers are compounds of base words, e.g. ``getBuffer`` or
``buffer_size``, and the code around them follows the regularities real
code has (``getBuffer(buffer)``). Every file sticks to one naming
convention. :func:`write_split_corpus` holds some word combinations out of
training, so the test split is full of identifiers made of known words that
never occur whole in training.
"""
from __future__ import annotations

import random
from pathlib import Path
from typing import Sequence

__all__ = [
    "VERBS",
    "NOUNS",
    "BASE_WORDS",
    "compound",
    "make_identifiers",
    "render_file",
    "write_corpus",
    "write_split_corpus",
]

VERBS = "get set add remove read write open close init free alloc push pop find update reset".split()
NOUNS = (
    "list item value node count buffer size index name type data file path string "
    "table entry key hash map queue stack head tail offset flag mode state error result config user length block event"
).split()
BASE_WORDS = VERBS + NOUNS
assert len(BASE_WORDS) == 50

STYLES = ("camel", "pascal", "snake", "lower")


def compound(words: Sequence[str], style: str) -> str:
    if style == "camel":
        return words[0] + "".join(w.capitalize() for w in words[1:])
    if style == "pascal":
        return "".join(w.capitalize() for w in words)
    if style == "snake":
        return "_".join(words)
    if style == "lower":
        return "".join(words)
    raise ValueError(f"unknown style {style!r}")


def make_identifiers(
    n: int,
    rng: random.Random,
    words: Sequence[str] = BASE_WORDS,
    parts: tuple[int, int] = (2, 3),
    styles: Sequence[str] = ("camel", "pascal", "snake"),
    exclude: frozenset[str] = frozenset(),
) -> list[str]:
    """``n`` distinct compounds of ``parts`` words each, none of them in ``exclude``."""
    seen: set[str] = set()
    out: list[str] = []
    attempts = 0
    while len(out) < n:
        attempts += 1
        if attempts > 200 * n:
            raise ValueError("word inventory too small for that many distinct compounds")
        k = rng.randint(*parts)
        ident = compound(rng.sample(list(words), k), rng.choice(styles))
        if ident in seen or ident in exclude:
            continue
        seen.add(ident)
        out.append(ident)
    return out


class _Namer:
    def __init__(self, style: str):
        self.style = style

    def var(self, *words: str) -> str:
        return compound(words, self.style)

    def type(self, *words: str) -> str:
        return compound(words, "pascal" if self.style == "camel" else self.style)


def _function(rng: random.Random, n: _Namer, verb_noun, noun_noun) -> str:
    v1, a = rng.choice(verb_noun)
    v2, b = rng.choice([p for p in verb_noun if p[1] == a] or verb_noun)
    a2, b2 = rng.choice([p for p in noun_noun if p[0] == a] or noun_noun)
    v3 = rng.choice(VERBS)
    if (v3, a) not in verb_noun:
        v3 = v2
    lim = rng.randint(1, 64)
    # rare three-word calls make up the long tail a capped vocabulary cannot hold
    call = n.var(v2, b, b2) if rng.random() < 0.5 else n.var(v2, b)
    shape = rng.randrange(3)
    if shape == 0:
        return (
            f"int {n.var(v1, a)}(struct {n.type(a)} *{n.var(a)}, int {n.var(b2)})\n{{\n"
            f"    int {n.var(a2, b2)} = {call}({n.var(a)});\n"
            f"    if ({n.var(a2, b2)} > {lim}) {{\n"
            f"        {n.var(v3, a)}({n.var(a)}, {n.var(b2)});\n    }}\n"
            f"    return {n.var(a2, b2)};\n}}\n"
        )
    if shape == 1:
        return (
            f"void {n.var(v1, a)}(struct {n.type(a)} *{n.var(a)})\n{{\n"
            f"    {n.var(a)}->{n.var(b2)} = {lim};\n"
            f"    {n.var(a)}->{n.var(a2, b2)} = {call}({n.var(a)});\n"
            f"    {n.var(v3, a)}({n.var(a)});\n}}\n"
        )
    return (
        f"static int {n.var(v1, a)}(struct {n.type(a)} *{n.var(a)}, int {n.var(b2)})\n{{\n"
        f"    int i;\n"
        f"    for (i = 0; i < {n.var(b2)}; i++) {{\n"
        f"        {n.var(a2, b2)}[i] = {call}({n.var(a)}, i);\n    }}\n"
        f"    return {n.var(v3, a)}({n.var(a)});\n}}\n"
    )


def render_file(rng: random.Random, verb_noun, noun_noun, style: str, n_functions: int = 5) -> str:
    namer = _Namer(style)
    chunks = ["#include <stdio.h>\n", '/* generated */\nstatic const char *tag = "demo";\n']
    chunks.extend(_function(rng, namer, verb_noun, noun_noun) for _ in range(n_functions))
    return "\n".join(chunks)


def write_corpus(root, n_files: int, verb_noun, noun_noun, seed: int = 0, styles=("camel", "snake"), n_functions: int = 5) -> list[Path]:
    rng = random.Random(seed)
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    paths = []
    for i in range(n_files):
        path = root / f"file{i:04d}.c"
        path.write_text(render_file(rng, verb_noun, noun_noun, rng.choice(styles), n_functions), encoding="utf-8")
        paths.append(path)
    return paths


def write_split_corpus(
    root,
    seed: int = 0,
    n_train_files: int = 80,
    n_valid_files: int = 10,
    n_test_files: int = 20,
    heldout: float = 0.3,
) -> dict[str, Path]:
    """Write ``train``/``valid``/``test`` trees under ``root``.

    A fraction ``heldout`` of the verb-noun and noun-noun combinations is
    used only by the test files; every base word still occurs in training.
    """
    rng = random.Random(seed)
    verb_noun = [(v, n) for v in VERBS for n in NOUNS]
    noun_noun = [(a, b) for a in NOUNS for b in NOUNS if a != b]
    rng.shuffle(verb_noun)
    rng.shuffle(noun_noun)
    cut_vn = int(len(verb_noun) * heldout)
    cut_nn = int(len(noun_noun) * heldout)
    test_vn, train_vn = sorted(verb_noun[:cut_vn]), sorted(verb_noun[cut_vn:])
    test_nn, train_nn = sorted(noun_noun[:cut_nn]), sorted(noun_noun[cut_nn:])
    root = Path(root)
    dirs = {name: root / name for name in ("train", "valid", "test")}
    write_corpus(dirs["train"], n_train_files, train_vn, train_nn, seed=seed + 1)
    write_corpus(dirs["valid"], n_valid_files, train_vn, train_nn, seed=seed + 2)
    write_corpus(dirs["test"], n_test_files, test_vn, test_nn, seed=seed + 3)
    return dirs
