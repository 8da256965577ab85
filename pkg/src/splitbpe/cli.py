"""Command line entry point: ``splitbpe <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import FORMAT_VERSIONS, __version__, bpe, lm
from .bpe import Vocabulary, read_metadata
from .completion import DEFAULT_K, DEFAULT_MAX_UNITS, DEFAULT_WIDTH, complete
from .errors import ConfigMismatch, MissingTable, SplitBPEError
from .harness import DEFAULT_EXTENSIONS, _lm_inventory, ingest, lex_corpus, load_config, run_experiment
from .lexer import TokenKind, lex_file
from .metrics import evaluate
from .splitter import DEFAULT_MIN_COUNT, FrequencyTable, build_frequency_table, split
from .strategy import PipelineConfig, Strategy, read_streams, tokenize_file, write_streams


def _extensions(value: str) -> tuple[str, ...]:
    return tuple(e if e.startswith(".") else "." + e for e in value.split(",") if e)


def _corpus_files(path, extensions):
    manifest = ingest(path, extensions)
    return manifest, lex_corpus(manifest)


def _pipeline(args) -> PipelineConfig:
    table = FrequencyTable.load(args.table) if getattr(args, "table", None) else None
    pipe = PipelineConfig(Strategy(args.strategy), getattr(args, "size", bpe.DEFAULT_VOCAB_SIZE), table)
    pipe.require_table()
    return pipe


def cmd_lex(args):
    manifest, files = _corpus_files(args.path, args.ext)
    tokens = [t for f in files for t in f]
    if args.json:
        json.dump([{"kind": t.kind.value, "text": t.text, "span": list(t.span), "file": t.file_id} for t in tokens], sys.stdout, indent=1)
        sys.stdout.write("\n")
    else:
        for t in tokens:
            print(f"{t.kind.value}\t{t.text}")


def cmd_split(args):
    table = FrequencyTable.load(args.table) if args.table else None
    for ident in args.identifiers:
        print(ident + "\t" + " ".join(split(ident, table).pieces))


def cmd_table_build(args):
    manifest, files = _corpus_files(args.corpus, args.ext)
    idents = (t.text for f in files for t in f if t.kind is TokenKind.IDENTIFIER)
    build_frequency_table(idents, args.min_count).save(args.out, {"corpus_manifest": manifest.hash})


def cmd_bpe_train(args):
    manifest, files = _corpus_files(args.corpus, args.ext)
    vocab = bpe.train([t for f in files for t in f], args.size)
    vocab.save(args.out, {"corpus_manifest": manifest.hash, "strategy": "original"})


def cmd_vocab_build(args):
    pipe = _pipeline(args)
    manifest, files = _corpus_files(args.corpus, args.ext)
    from .strategy import train_vocabulary

    vocab = train_vocabulary([t for f in files for t in f], pipe)
    vocab.save(args.out, {"corpus_manifest": manifest.hash, "strategy": str(pipe.strategy), "table": pipe.table_fingerprint()})


def cmd_encode(args):
    vocab = Vocabulary.load(args.vocab)
    tokens = args.tokens or sys.stdin.read().split()
    for tok in tokens:
        print(" ".join(bpe.encode(tok, vocab)))


def cmd_tokenize(args):
    pipe = _pipeline(args)
    vocab = Vocabulary.load(args.vocab)
    manifest, files = _corpus_files(args.corpus, args.ext)
    streams = [tokenize_file(f, vocab, pipe, file_id=e.path) for f, e in zip(files, manifest.entries)]
    write_streams(args.out, streams, {"strategy": str(pipe.strategy), "config_id": pipe.config_id(vocab), "corpus_manifest": manifest.hash})


def cmd_lm_train(args):
    meta, seqs = read_streams(args.stream)
    extra = _lm_inventory(Vocabulary.load(args.vocab)) if args.vocab else ()
    model = lm.train(seqs, args.order, args.discount, extra)
    model.save(args.out, {k: meta[k] for k in ("strategy", "config_id", "corpus_manifest") if k in meta})


def cmd_lm_prob(args):
    model = lm.NGramModel.load(args.model)
    context = args.context.split()
    print(repr(model.prob(context, args.next)))


def _model_meta(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        head = []
        fh.readline()
        for line in fh:
            if not line.startswith("# "):
                break
            head.append(line.rstrip("\n"))
    return read_metadata(head)


def _check_model_config(model_path, pipe: PipelineConfig, vocab: Vocabulary):
    recorded = _model_meta(model_path).get("config_id")
    expected = pipe.config_id(vocab)
    if recorded and recorded != expected:
        raise ConfigMismatch(f"model was trained on streams from {recorded}, not {expected}")


def cmd_complete(args):
    pipe = _pipeline(args)
    vocab = Vocabulary.load(args.vocab)
    _check_model_config(args.model, pipe, vocab)
    model = lm.NGramModel.load(args.model)
    tokens = lex_file(Path(args.context_file).read_bytes())
    stream = tokenize_file(tokens, vocab, pipe)
    cands = complete(model, [lm.BOS] + stream.units, k=args.k, width=args.width, max_units=args.max_units)
    for rank, c in enumerate(cands, start=1):
        print(f"{rank}\t{c.token_text}\t{c.log_prob!r}")


def cmd_eval(args):
    pipe = _pipeline(args)
    vocab = Vocabulary.load(args.vocab)
    _check_model_config(args.model, pipe, vocab)
    model = lm.NGramModel.load(args.model)
    manifest, files = _corpus_files(args.corpus, args.ext)
    report = evaluate(model, vocab, pipe, files, k=args.k, width=args.width, max_units=args.max_units)
    report.metadata["test_manifest"] = manifest.hash
    Path(args.out).write_text(report.to_json() + "\n", encoding="utf-8")
    print(json.dumps(report.table_row()))


def cmd_run(args):
    overrides = dict(kv.split("=", 1) for kv in args.set)
    config = load_config(args.config, {k.strip(): v.strip() for k, v in overrides.items()})
    reports = run_experiment(config)
    for r in reports.values():
        print(json.dumps(r.table_row()))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="splitbpe", description=__doc__)
    versions = " ".join(f"{k}={v!r}" for k, v in FORMAT_VERSIONS.items())
    parser.add_argument("--version", action="version", version=f"splitbpe {__version__} ({versions})")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def corpus_opts(p):
        p.add_argument("--ext", type=_extensions, default=DEFAULT_EXTENSIONS, help="comma-separated extensions (default .c,.h)")

    def strategy_opts(p):
        p.add_argument("--strategy", choices=[s.value for s in Strategy], default="original")
        p.add_argument("--table", help="frequency table file (needed unless --strategy original)")

    def search_opts(p):
        p.add_argument("--k", type=int, default=DEFAULT_K)
        p.add_argument("--width", type=int, default=DEFAULT_WIDTH)
        p.add_argument("--max-units", type=int, default=DEFAULT_MAX_UNITS)

    p = sub.add_parser("lex", help="print tokens of a file or directory")
    p.add_argument("path")
    p.add_argument("--json", action="store_true")
    corpus_opts(p)
    p.set_defaults(func=cmd_lex)

    p = sub.add_parser("split", help="split identifiers")
    p.add_argument("identifiers", nargs="+")
    p.add_argument("--table")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("table-build", help="build a split frequency table from a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--min-count", type=int, default=DEFAULT_MIN_COUNT)
    p.add_argument("--out", required=True)
    corpus_opts(p)
    p.set_defaults(func=cmd_table_build)

    p = sub.add_parser("bpe-train", help="plain BPE vocabulary on a corpus")
    p.add_argument("corpus")
    p.add_argument("--size", type=int, default=bpe.DEFAULT_VOCAB_SIZE)
    p.add_argument("--out", required=True)
    corpus_opts(p)
    p.set_defaults(func=cmd_bpe_train)

    p = sub.add_parser("encode", help="encode tokens with a vocabulary")
    p.add_argument("vocab")
    p.add_argument("tokens", nargs="*")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("vocab-build", help="BPE vocabulary under a strategy")
    strategy_opts(p)
    p.add_argument("--corpus", required=True)
    p.add_argument("--size", type=int, default=bpe.DEFAULT_VOCAB_SIZE)
    p.add_argument("--out", required=True)
    corpus_opts(p)
    p.set_defaults(func=cmd_vocab_build)

    p = sub.add_parser("tokenize", help="write the unit stream of a corpus")
    strategy_opts(p)
    p.add_argument("--vocab", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    corpus_opts(p)
    p.set_defaults(func=cmd_tokenize)

    p = sub.add_parser("lm-train", help="train the n-gram model on a stream file")
    p.add_argument("--stream", required=True)
    p.add_argument("--order", type=int, default=lm.DEFAULT_ORDER)
    p.add_argument("--discount", type=float, default=lm.DEFAULT_DISCOUNT)
    p.add_argument("--vocab", help="add every unit of this vocabulary to the model inventory")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_lm_train)

    p = sub.add_parser("lm-prob", help="probability of one unit after a context")
    p.add_argument("--model", required=True)
    p.add_argument("--context", default="", help="space-separated units")
    p.add_argument("--next", required=True)
    p.set_defaults(func=cmd_lm_prob)

    p = sub.add_parser("complete", help="complete the token following a code snippet")
    strategy_opts(p)
    p.add_argument("--model", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--context-file", required=True)
    search_opts(p)
    p.set_defaults(func=cmd_complete)

    p = sub.add_parser("eval", help="evaluate a model on a test corpus")
    strategy_opts(p)
    p.add_argument("--model", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    search_opts(p)
    corpus_opts(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("run", help="run a full experiment from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config value")
    p.set_defaults(func=cmd_run)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except SplitBPEError as exc:
        json.dump({"error": exc.code, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    except (OSError, ValueError) as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
