"""Regenerate the CLI fixture corpus and its golden report files.

The golden counts come from the naive oracle, not from the scanner: the
byte-for-byte CLI test therefore checks the whole pipeline against an
independent recount. Run from the tests/ directory:

    python make_golden.py
"""

import os

import numpy as np

from hatescan.corpus import CorpusStats, TokenizerConfig
from hatescan.lexicon import Category, save_lexicon
from hatescan.scanner import CountsTable
from hatescan.stats import (
    ReportConfig,
    build_report,
    report_to_json,
    write_category_csv,
    write_figure_counts_csv,
    write_figure_proportions_csv,
    write_report_csv,
)

import synth
from oracle import oracle_scan

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")
GOLDEN_DIR = os.path.join(DATA_DIR, "golden")

PLAN = {
    "lofven": (50, {Category.SWEARWORD: 7, Category.ANGER: 3,
                    Category.DEATH_THREAT: 2}),
    "johansson": (20, {Category.NAUGHTINESS: 5, Category.GENERAL_THREAT: 1}),
    "linde": (5, {}),
}


def main():
    os.makedirs(GOLDEN_DIR, exist_ok=True)
    rng = np.random.default_rng(20180901)
    targets = synth.make_targets()
    lexicon = synth.make_lexicon()
    docs, _ = synth.planted_corpus(rng, targets, PLAN, stray_terms=30)

    synth.write_jsonl(os.path.join(DATA_DIR, "fixture_corpus.jsonl"), docs)
    save_lexicon(lexicon, os.path.join(DATA_DIR, "fixture_lexicon.tsv"))
    with open(os.path.join(DATA_DIR, "fixture_targets.tsv"), "w",
              encoding="utf-8") as f:
        for t in targets:
            f.write(f"{t.id}\t{' '.join(t.full_name)}\t{t.display_name}\n")

    mentions, co, cat_counts, total, _hits = oracle_scan(
        docs, lexicon.entries, targets, window=1)

    stats = CorpusStats()
    for _doc_id, tokens in docs:
        stats.add_document("siteA", len(tokens))
    assert stats.total_tokens == total

    counts = CountsTable(mentions=mentions, co_counts=co,
                         category_counts=cat_counts, total_tokens=total,
                         lexicon_version=lexicon.version, window=1)
    config = ReportConfig(window=1, lexicon_version=lexicon.version,
                          tokenizer=TokenizerConfig(),
                          target_ids=tuple(t.id for t in targets))
    report = build_report(counts, stats, config,
                          display_names={t.id: t.display_name for t in targets})

    with open(os.path.join(GOLDEN_DIR, "report.json"), "w", encoding="utf-8") as f:
        f.write(report_to_json(report))
    for name, writer in (("report.csv", write_report_csv),
                         ("categories.csv", write_category_csv),
                         ("figure_counts.csv", write_figure_counts_csv),
                         ("figure_proportions.csv", write_figure_proportions_csv)):
        with open(os.path.join(GOLDEN_DIR, name), "w", encoding="utf-8",
                  newline="") as f:
            writer(report, f)
    n_mentions = sum(mentions.values())
    print(f"wrote fixtures: {len(docs)} docs, {total} tokens, "
          f"{n_mentions} mentions")


if __name__ == "__main__":
    main()
