"""Corpus ingestion, experiment configuration and the end-to-end runner."""
from __future__ import annotations

import configparser
import dataclasses
import hashlib
import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from . import bpe, lm
from .bpe import MARKER
from .completion import DEFAULT_K, DEFAULT_MAX_UNITS, DEFAULT_WIDTH
from .errors import ConfigError, EmptyCorpus, SplitBPEError
from .lexer import Token, TokenKind, lex_file
from .metrics import REFERENCE_RESULTS, EvalReport, cross_entropy, evaluate, reports_to_csv
from .splitter import DEFAULT_MIN_COUNT, FrequencyTable, build_frequency_table
from .strategy import PipelineConfig, Strategy, corpus_shrinkage, tokenize_file, train_vocabulary

__all__ = [
    "DEFAULT_EXTENSIONS",
    "ManifestEntry",
    "Manifest",
    "ingest",
    "lex_corpus",
    "ExperimentConfig",
    "load_config",
    "run_experiment",
    "StrategyError",
]

log = logging.getLogger(__name__)

DEFAULT_EXTENSIONS = (".c", ".h")


class StrategyError(SplitBPEError):
    """A module error raised while running one strategy."""

    def __init__(self, strategy: str, cause: Exception):
        super().__init__(f"[{strategy}] {cause}")
        self.strategy = strategy
        self.cause = cause
        self.code = getattr(cause, "code", "error")


@dataclass(frozen=True)
class ManifestEntry:
    path: str  # relative to the manifest root, '/'-separated
    sha256: str


@dataclass(frozen=True)
class Manifest:
    root: Path
    entries: tuple[ManifestEntry, ...]

    @property
    def hash(self) -> str:
        h = hashlib.sha256()
        for e in self.entries:
            h.update(f"{e.path}\t{e.sha256}\n".encode("utf-8", "surrogateescape"))
        return h.hexdigest()

    def __len__(self) -> int:
        return len(self.entries)

    def paths(self) -> list[Path]:
        return [self.root / e.path for e in self.entries]

    def to_tsv(self) -> str:
        return "".join(f"{e.path}\t{e.sha256}\n" for e in self.entries)


def _walk(directory: Path, extensions: tuple[str, ...]) -> Iterable[Path]:
    # depth first; files and subdirectories interleaved in name order
    try:
        children = sorted(os.scandir(directory), key=lambda d: d.name)
    except OSError as exc:
        log.warning("skipping unreadable directory %s: %s", directory, exc)
        return
    for child in children:
        if child.is_dir(follow_symlinks=False):
            yield from _walk(Path(child.path), extensions)
        elif child.is_file() and child.name.endswith(extensions):
            yield Path(child.path)


def ingest(root, extensions: Sequence[str] = DEFAULT_EXTENSIONS) -> Manifest:
    """List source files under ``root`` in a fixed order and hash their contents.

    Unreadable files are logged and left out.
    """
    root = Path(root)
    if not root.exists():
        raise FileNotFoundError(root)
    extensions = tuple(extensions)
    entries = []
    files = [root] if root.is_file() else _walk(root, extensions)
    for path in files:
        try:
            digest = hashlib.sha256(path.read_bytes()).hexdigest()
        except OSError as exc:
            log.warning("skipping unreadable file %s: %s", path, exc)
            continue
        rel = path.name if path == root else path.relative_to(root).as_posix()
        entries.append(ManifestEntry(rel, digest))
    base = root.parent if root.is_file() else root
    return Manifest(base, tuple(entries))


def lex_corpus(manifest: Manifest) -> list[list[Token]]:
    files = []
    for entry, path in zip(manifest.entries, manifest.paths()):
        files.append(lex_file(path.read_bytes(), file_id=entry.path))
    return files


def _parse_list(value: str) -> tuple[str, ...]:
    return tuple(v.strip() for v in value.replace(";", ",").split(",") if v.strip())


@dataclass
class ExperimentConfig:
    """One experiment: corpora, model settings and where artifacts go.

    Stored as a flat ``key = value`` text file (``#`` starts a comment);
    keys are the field names below.
    """

    train_dir: str = ""
    test_dir: str = ""
    valid_dir: str = ""
    output_dir: str = "splitbpe-out"
    extensions: tuple[str, ...] = DEFAULT_EXTENSIONS
    vocab_size: int = bpe.DEFAULT_VOCAB_SIZE
    min_count: int = DEFAULT_MIN_COUNT
    order: int = lm.DEFAULT_ORDER
    discount: float = lm.DEFAULT_DISCOUNT
    select_discount: bool = False
    discount_grid: tuple[float, ...] = (0.5, 0.6, 0.7, 0.75, 0.8, 0.9)
    k: int = DEFAULT_K
    width: int = DEFAULT_WIDTH
    max_units: int = DEFAULT_MAX_UNITS
    strategies: tuple[str, ...] = ("original", "simple", "hybrid")
    hybrid_weights: tuple[int, int] = (1, 1)
    seed: int = 0  # reserved; nothing in the pipeline is random

    def validate(self) -> "ExperimentConfig":
        if not self.train_dir or not self.test_dir:
            raise ConfigError("train_dir and test_dir are required")
        dirs = [Path(d).resolve() for d in (self.train_dir, self.valid_dir, self.test_dir) if d]
        for i, a in enumerate(dirs):
            for b in dirs[i + 1 :]:
                if a == b or a in b.parents or b in a.parents:
                    raise ConfigError(f"corpus splits overlap: {a} and {b}")
        for s in self.strategies:
            try:
                Strategy(s)
            except ValueError:
                raise ConfigError(f"unknown strategy {s!r}") from None
        checks = [
            (self.vocab_size >= 0, "vocab_size >= 0"),
            (self.min_count >= 1, "min_count >= 1"),
            (self.order >= 1, "order >= 1"),
            (0.0 < self.discount < 1.0, "0 < discount < 1"),
            (all(0.0 < d < 1.0 for d in self.discount_grid), "discount_grid values in (0, 1)"),
            (self.k >= 1 and self.width >= self.k, "k >= 1 and width >= k"),
            (self.max_units >= 1, "max_units >= 1"),
            (len(self.hybrid_weights) == 2 and min(self.hybrid_weights) >= 0, "two non-negative hybrid_weights"),
        ]
        for ok, what in checks:
            if not ok:
                raise ConfigError(f"invalid config: need {what}")
        if self.select_discount and not self.valid_dir:
            raise ConfigError("select_discount needs valid_dir")
        return self

    def canonical(self) -> dict:
        """Settings that determine the artifacts; paths are pinned by manifests instead."""
        d = dataclasses.asdict(self)
        for key in ("train_dir", "test_dir", "valid_dir", "output_dir"):
            d.pop(key)
        return d

    @property
    def hash(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, default=list)
        return hashlib.sha256(blob.encode()).hexdigest()

    def with_overrides(self, overrides: Mapping[str, str]) -> "ExperimentConfig":
        changes = {}
        types = {f.name: f for f in dataclasses.fields(self)}
        for key, raw in overrides.items():
            if key not in types:
                raise ConfigError(f"unknown config key {key!r}")
            changes[key] = _coerce(getattr(self, key), raw, key)
        return dataclasses.replace(self, **changes)

    def to_text(self) -> str:
        lines = []
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if isinstance(value, tuple):
                value = ", ".join(str(v) for v in value)
            elif isinstance(value, bool):
                value = "true" if value else "false"
            lines.append(f"{f.name} = {value}")
        return "\n".join(lines) + "\n"


def _coerce(default, raw: str, key: str):
    raw = raw.strip()
    try:
        if isinstance(default, bool):
            if raw.lower() in ("1", "true", "yes", "on"):
                return True
            if raw.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        if isinstance(default, tuple):
            items = _parse_list(raw)
            if default and isinstance(default[0], int):
                return tuple(int(x) for x in items)
            if default and isinstance(default[0], float):
                return tuple(float(x) for x in items)
            return items
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r}") from None
    return raw.strip("\"'")


def load_config(path, overrides: Mapping[str, str] | None = None) -> ExperimentConfig:
    parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#",), inline_comment_prefixes=("#",))
    parser.optionxform = str
    text = Path(path).read_text(encoding="utf-8")
    try:
        parser.read_string("[experiment]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    values = dict(parser["experiment"])
    values.update(overrides or {})
    cfg = ExperimentConfig().with_overrides(values)
    # relative corpus paths are relative to the config file
    base = Path(path).resolve().parent
    fixed = {}
    for key in ("train_dir", "test_dir", "valid_dir", "output_dir"):
        value = getattr(cfg, key)
        if value and not Path(value).is_absolute() and key not in (overrides or {}):
            fixed[key] = str(base / value)
    return dataclasses.replace(cfg, **fixed).validate()


def _lm_inventory(vocab: bpe.Vocabulary) -> set[str]:
    units = set(vocab.units) | {bpe.UNK}
    return units | {u + MARKER for u in units}


def _select_discount(streams, valid_streams, config: ExperimentConfig, extra) -> float:
    best = None
    for d in config.discount_grid:
        model = lm.train(streams, config.order, d, extra)
        h = cross_entropy(model, valid_streams)
        log.info("discount %.3f: validation entropy %.4f", d, h)
        if best is None or h < best[0]:
            best = (h, d)
    return best[1]


def _write(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8")


def run_experiment(config: ExperimentConfig, write: bool = True) -> dict[str, EvalReport]:
    """Train and evaluate every requested strategy; returns reports by strategy.

    With ``write`` set, artifacts go to ``config.output_dir``: the frequency
    table, one vocabulary, model and report per strategy, the corpus
    manifests and a Table-I-shaped summary (JSON and CSV).
    """
    config.validate()
    train_m = ingest(config.train_dir, config.extensions)
    test_m = ingest(config.test_dir, config.extensions)
    valid_m = ingest(config.valid_dir, config.extensions) if config.valid_dir else None
    if not len(train_m):
        raise EmptyCorpus(f"no source files under {config.train_dir}")
    if not len(test_m):
        raise EmptyCorpus(f"no source files under {config.test_dir}")

    train_files = lex_corpus(train_m)
    test_files = lex_corpus(test_m)
    valid_files = lex_corpus(valid_m) if valid_m is not None and config.select_discount else []
    train_tokens = [t for f in train_files for t in f]

    provenance = {"config": config.hash, "train_manifest": train_m.hash}
    table = build_frequency_table((t.text for t in train_tokens if t.kind is TokenKind.IDENTIFIER), config.min_count)
    before, after, ratio = corpus_shrinkage(train_tokens, table)

    out = Path(config.output_dir)
    if write:
        out.mkdir(parents=True, exist_ok=True)
        _write(out / "config.txt", f"# config_hash={config.hash}\n" + config.to_text())
        _write(out / "train_manifest.tsv", train_m.to_tsv())
        _write(out / "test_manifest.tsv", test_m.to_tsv())
        table.save(out / "freqtable.tsv", provenance)

    reports: dict[str, EvalReport] = {}
    for name in config.strategies:
        strategy = Strategy(name)
        try:
            pipe = PipelineConfig(strategy, config.vocab_size, table, tuple(config.hybrid_weights))
            vocab = train_vocabulary(train_tokens, pipe)
            streams = [tokenize_file(f, vocab, pipe) for f in train_files]
            extra = _lm_inventory(vocab)
            discount = config.discount
            if config.select_discount:
                valid_streams = [tokenize_file(f, vocab, pipe) for f in valid_files]
                discount = _select_discount(streams, valid_streams, config, extra)
            model = lm.train(streams, config.order, discount, extra)
            report = evaluate(model, vocab, pipe, test_files, k=config.k, width=config.width, max_units=config.max_units)
        except SplitBPEError as exc:
            raise StrategyError(str(strategy), exc) from exc
        report.metadata.update(
            {
                "config_hash": config.hash,
                "train_manifest": train_m.hash,
                "test_manifest": test_m.hash,
                "vocab_merges": len(vocab),
                "lm_order": config.order,
                "lm_discount": discount,
                "lm_units": model.vocab_size,
            }
        )
        reports[str(strategy)] = report
        if write:
            vocab.save(out / f"vocab_{strategy}.txt", {**provenance, "strategy": str(strategy)})
            model.save(out / f"model_{strategy}.txt", {**provenance, "strategy": str(strategy)})
            _write(out / f"report_{strategy}.json", report.to_json() + "\n")

    summary = {
        "config_hash": config.hash,
        "train_manifest": train_m.hash,
        "test_manifest": test_m.hash,
        "shrinkage": {"unique_before": before, "unique_after": after, "ratio": ratio},
        "table": [r.table_row() for r in reports.values()],
        "comparison": _comparison(reports),
        "reference_results": REFERENCE_RESULTS,
    }
    if write:
        _write(out / "summary.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
        _write(out / "summary.csv", reports_to_csv(reports.values()))
    return reports


def _comparison(reports: Mapping[str, EvalReport]) -> dict:
    """Relative change of each strategy against Original, in percent."""
    base = reports.get("original")
    if base is None:
        return {}
    out = {}
    for name, r in reports.items():
        if name == "original":
            continue
        row = {}
        for key in ("entropy_bits_per_token", "mrr_all", "recall_at_10_identifiers", "mrr_identifiers"):
            b, v = getattr(base, key), getattr(r, key)
            row[key] = {"original": b, name: v, "relative_change_pct": (100.0 * (v - b) / b) if b else None}
        row["identifier_mrr_at_least_original"] = r.mrr_identifiers >= base.mrr_identifiers
        out[name] = row
    return out
