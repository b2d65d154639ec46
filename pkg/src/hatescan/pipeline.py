"""End-to-end batch pipeline: corpus -> scan -> counts -> report files.

One streaming pass per scan: each document is tokenized, MWE-merged,
scanned for mentions and window hits, and folded into the running stats
while its hits are appended to ``hits.jsonl``. With ``workers > 1`` the
corpus is split into line chunks processed by worker processes and merged
back in chunk order, so outputs are byte-identical to a sequential run.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import IO, Iterator

from .corpus import (
    Corpus,
    CorpusStats,
    MweTrie,
    RawDocument,
    TokenizerConfig,
    corpus_stats,
    ingest_jsonl,
    load_mwe_file,
    tokenize_document,
)
from .embeddings import EmbeddingParams, VectorStore, save_vectors, train_cbow
from .errors import InvalidInputError
from .lexicon import CATEGORIES, Category, Lexicon, Matcher, load_lexicon
from .scanner import (
    CountsTable,
    MentionHit,
    TargetIndex,
    aggregate,
    load_targets_file,
    scan_document,
)
from .stats import (
    Report,
    ReportConfig,
    build_report,
    report_to_json,
    write_category_csv,
    write_figure_counts_csv,
    write_figure_proportions_csv,
    write_report_csv,
)

REPORT_JSON = "report.json"
REPORT_CSV = "report.csv"
CATEGORIES_CSV = "categories.csv"
FIGURE_COUNTS_CSV = "figure_counts.csv"
FIGURE_PROPORTIONS_CSV = "figure_proportions.csv"
HITS_JSONL = "hits.jsonl"

_CHUNK_LINES = 2000


@dataclass(frozen=True)
class RunConfig:
    """Everything a batch command needs; flags and config files map onto this."""

    corpus_path: str
    lexicon_path: str
    targets_path: str = ""
    output_dir: str = "hatescan-out"
    window: int = 1
    tokenizer: TokenizerConfig = TokenizerConfig()
    mwes_path: str | None = None
    vectors_path: str | None = None
    embedding: EmbeddingParams = EmbeddingParams()
    seed: int = 1
    workers: int = 1

    def __post_init__(self) -> None:
        if self.window < 0:
            raise InvalidInputError("window must be >= 0")
        if self.workers < 1:
            raise InvalidInputError("workers must be >= 1")


@dataclass
class ScanResult:
    report: Report
    counts: CountsTable
    stats: CorpusStats
    output_files: dict[str, str] = field(default_factory=dict)


def build_mwe_trie(lexicon: Lexicon, mwes_path: str | None = None) -> MweTrie:
    """MWE set for merging: the lexicon's multiword terms plus an optional file."""
    trie = load_mwe_file(mwes_path) if mwes_path else MweTrie()
    for phrase in lexicon.mwe_phrases():
        trie.add(phrase)
    return trie


def hit_to_record(mh: MentionHit) -> dict:
    """JSONL record for one mention hit, fixed key order."""
    return {
        "doc_id": mh.mention.doc_id,
        "target_id": mh.mention.target_id,
        "start": mh.mention.start,
        "end": mh.mention.end,
        "window": mh.window,
        "lexicon_version": mh.lexicon_version,
        "hits": {
            cat.value: [[i, t] for i, t in mh.hits[cat]]
            for cat in CATEGORIES if cat in mh.hits
        },
        "kwic_start": mh.kwic_start,
        "kwic_tokens": mh.kwic_tokens,
    }


def _write_hit(out: IO[str], record: dict) -> None:
    out.write(json.dumps(record, ensure_ascii=False, separators=(",", ":")))
    out.write("\n")


def run_scan(config: RunConfig) -> ScanResult:
    """Scan a corpus and write all report files into ``config.output_dir``."""
    lexicon = load_lexicon(config.lexicon_path)
    targets = load_targets_file(config.targets_path, config.tokenizer)
    corpus = ingest_jsonl(config.corpus_path)
    matcher = Matcher(lexicon)
    trie = build_mwe_trie(lexicon, config.mwes_path)
    index = TargetIndex(targets)

    os.makedirs(config.output_dir, exist_ok=True)
    hits_path = os.path.join(config.output_dir, HITS_JSONL)

    stats = CorpusStats()
    category_counts = {c: 0 for c in CATEGORIES}
    with open(hits_path, "w", encoding="utf-8") as hits_out:
        if config.workers == 1:
            hit_lists = _scan_stream(corpus, config, matcher, trie, index,
                                     stats, category_counts, hits_out)
            counts = aggregate(hit_lists, stats, matcher,
                               category_counts=category_counts, targets=index,
                               window=config.window)
        else:
            counts = _scan_parallel(corpus, config, matcher, index,
                                    stats, category_counts, hits_out)

    report_config = ReportConfig(
        window=config.window,
        lexicon_version=lexicon.version,
        tokenizer=config.tokenizer,
        target_ids=tuple(t.id for t in targets),
    )
    report = build_report(counts, stats, report_config,
                          display_names={t.id: t.display_name for t in targets})
    files = write_report_files(report, config.output_dir)
    files[HITS_JSONL] = hits_path
    return ScanResult(report=report, counts=counts, stats=stats, output_files=files)


def _scan_stream(
    corpus: Corpus,
    config: RunConfig,
    matcher: Matcher,
    trie: MweTrie,
    index: TargetIndex,
    stats: CorpusStats,
    category_counts: dict[Category, int],
    hits_out: IO[str],
) -> Iterator[list[MentionHit]]:
    """Single-pass generator: yields each document's hits while folding
    token counts into ``stats``/``category_counts`` and logging hits."""
    table = matcher.table
    for raw in corpus:
        doc = tokenize_document(raw, config.tokenizer, trie)
        tokens = doc.tokens
        stats.add_document(raw.site, len(tokens))
        for token in tokens:
            cats = table.get(token)
            if cats:
                for cat in cats:
                    category_counts[cat] += 1
        hits = scan_document(doc, matcher, index, config.window)
        for mh in hits:
            _write_hit(hits_out, hit_to_record(mh))
        yield hits


# Per-process state for parallel scanning, set up once per worker.
_WORKER: dict = {}


def _init_scan_worker(config: RunConfig) -> None:
    lexicon = load_lexicon(config.lexicon_path)
    _WORKER["config"] = config
    _WORKER["matcher"] = Matcher(lexicon)
    _WORKER["trie"] = build_mwe_trie(lexicon, config.mwes_path)
    _WORKER["index"] = TargetIndex(
        load_targets_file(config.targets_path, config.tokenizer))


def _scan_chunk(lines: list[str]) -> tuple:
    config: RunConfig = _WORKER["config"]
    matcher: Matcher = _WORKER["matcher"]
    trie: MweTrie = _WORKER["trie"]
    index: TargetIndex = _WORKER["index"]
    table = matcher.table

    stats = CorpusStats()
    category_counts = {c: 0 for c in CATEGORIES}
    mentions: dict[str, int] = {}
    co_counts: dict[str, dict[Category, int]] = {}
    hit_lines: list[str] = []
    for line in lines:
        obj = json.loads(line)
        raw = RawDocument(id=obj["id"], site=obj["site"],
                          timestamp=obj["timestamp"], text=obj["text"])
        doc = tokenize_document(raw, config.tokenizer, trie)
        stats.add_document(raw.site, len(doc.tokens))
        for token in doc.tokens:
            cats = table.get(token)
            if cats:
                for cat in cats:
                    category_counts[cat] += 1
        for mh in scan_document(doc, matcher, index, config.window):
            tid = mh.mention.target_id
            mentions[tid] = mentions.get(tid, 0) + 1
            per_cat = co_counts.setdefault(tid, {c: 0 for c in CATEGORIES})
            for cat in mh.hits:
                per_cat[cat] += 1
            hit_lines.append(json.dumps(hit_to_record(mh), ensure_ascii=False,
                                        separators=(",", ":")))
    return stats, category_counts, mentions, co_counts, hit_lines


def _valid_line_chunks(corpus: Corpus) -> Iterator[list[str]]:
    bad = set(corpus.malformed_line_numbers)
    chunk: list[str] = []
    with open(corpus.path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if lineno in bad:
                continue
            chunk.append(line)
            if len(chunk) >= _CHUNK_LINES:
                yield chunk
                chunk = []
    if chunk:
        yield chunk


def _scan_parallel(
    corpus: Corpus,
    config: RunConfig,
    matcher: Matcher,
    index: TargetIndex,
    stats: CorpusStats,
    category_counts: dict[Category, int],
    hits_out: IO[str],
) -> CountsTable:
    """Chunked multiprocess scan; results merge in chunk order, so the
    outputs are identical to a sequential run."""
    counts = CountsTable(
        mentions={t.id: 0 for t in index.targets},
        co_counts={t.id: {c: 0 for c in CATEGORIES} for t in index.targets},
        lexicon_version=matcher.version,
        window=config.window,
    )
    with ProcessPoolExecutor(max_workers=config.workers,
                             initializer=_init_scan_worker,
                             initargs=(config,)) as pool:
        for chunk_stats, chunk_cats, mentions, co, hit_lines in pool.map(
                _scan_chunk, _valid_line_chunks(corpus)):
            stats.absorb(chunk_stats)
            for cat, v in chunk_cats.items():
                category_counts[cat] += v
            for tid, m in mentions.items():
                counts.mentions[tid] = counts.mentions.get(tid, 0) + m
            for tid, per_cat in co.items():
                dst = counts.co_counts.setdefault(tid, {c: 0 for c in CATEGORIES})
                for cat, v in per_cat.items():
                    dst[cat] += v
            for line in hit_lines:
                hits_out.write(line)
                hits_out.write("\n")
    counts.category_counts = dict(category_counts)
    counts.total_tokens = stats.total_tokens
    return counts


def write_report_files(report: Report, output_dir: str) -> dict[str, str]:
    """Write report.json plus the display-rounded and figure-data CSVs."""
    os.makedirs(output_dir, exist_ok=True)
    files: dict[str, str] = {}

    path = os.path.join(output_dir, REPORT_JSON)
    with open(path, "w", encoding="utf-8") as f:
        f.write(report_to_json(report))
    files[REPORT_JSON] = path

    for name, writer in ((REPORT_CSV, write_report_csv),
                         (CATEGORIES_CSV, write_category_csv),
                         (FIGURE_COUNTS_CSV, write_figure_counts_csv),
                         (FIGURE_PROPORTIONS_CSV, write_figure_proportions_csv)):
        path = os.path.join(output_dir, name)
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer(report, f)
        files[name] = path
    return files


def _optional_trie(config: RunConfig) -> MweTrie:
    """The lexicon is optional for stats/training; without one only an
    explicit MWE file contributes phrases."""
    lexicon = load_lexicon(config.lexicon_path) if config.lexicon_path else Lexicon()
    return build_mwe_trie(lexicon, config.mwes_path)


def compute_corpus_stats(config: RunConfig) -> CorpusStats:
    """Tokenize and merge the whole corpus, returning its stats."""
    trie = _optional_trie(config)
    corpus = ingest_jsonl(config.corpus_path)
    return corpus_stats(corpus, config.tokenizer, trie)


def tokenized_sentences(config: RunConfig) -> list[list[str]]:
    """All documents as merged token lists (training input)."""
    trie = _optional_trie(config)
    corpus = ingest_jsonl(config.corpus_path)
    return [tokenize_document(doc, config.tokenizer, trie).tokens for doc in corpus]


def train_vectors(config: RunConfig, out_path: str) -> VectorStore:
    """Train CBOW vectors on the merged corpus and write them to ``out_path``."""
    params = replace(config.embedding, seed=config.seed, workers=config.workers)
    store = train_cbow(tokenized_sentences(config), params)
    save_vectors(store, out_path)
    return store
