"""Report statistics: normalized category frequency, per-target hit
proportions, and deviation from expected counts.

All three statistics are kept at full float precision internally; rounding
happens only at serialization time (relative frequencies to 5 decimals,
expected counts and deviations to 2, proportions to 4). The deviation of a
target/category pair is

    actual - (corpus_frequency / total_tokens) * mentions

i.e. how far the observed co-occurrence count sits above or below the
corpus-wide base rate for that category.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass
from typing import IO, Mapping

from .corpus import CorpusStats, TokenizerConfig
from .errors import ConsistencyError, InvalidInputError
from .lexicon import CATEGORIES, Category
from .scanner import CountsTable

REL_FREQ_DECIMALS = 5
PROPORTION_DECIMALS = 4
EXPECTED_DECIMALS = 2
DEVIATION_DECIMALS = 2


def normalized_frequency(corpus_count: int, total_tokens: int) -> float:
    """Relative frequency of a category: corpus_count / total_tokens."""
    if total_tokens == 0:
        raise InvalidInputError("normalized_frequency undefined for total_tokens=0")
    if corpus_count < 0 or total_tokens < 0:
        raise InvalidInputError("counts must be non-negative")
    if corpus_count > total_tokens:
        raise InvalidInputError(
            f"corpus_count {corpus_count} exceeds total_tokens {total_tokens}")
    return corpus_count / total_tokens


def proportion(co_count: int, mention_count: int) -> float | None:
    """Fraction of mentions containing a category hit; None when unmentioned."""
    if co_count < 0 or mention_count < 0:
        raise InvalidInputError("counts must be non-negative")
    if co_count > mention_count:
        raise InvalidInputError(
            f"co-occurrence count {co_count} exceeds mention count {mention_count}")
    if mention_count == 0:
        return None
    return co_count / mention_count


def expected_count(relative_frequency: float, mention_count: int) -> float:
    """Expected co-occurrence count under the corpus-wide base rate."""
    if relative_frequency < 0 or mention_count < 0:
        raise InvalidInputError("inputs must be non-negative")
    return relative_frequency * mention_count


def deviation(actual: int, expected: float) -> float:
    """Signed difference between actual and expected co-occurrence counts."""
    if actual < 0 or expected < 0:
        raise InvalidInputError("inputs must be non-negative")
    return actual - expected


@dataclass(frozen=True)
class CategoryStats:
    """Corpus-wide count and relative frequency of one category."""

    category: Category
    corpus_count: int
    relative_frequency: float


@dataclass(frozen=True)
class CategoryCell:
    """The per-(target, category) quadruple of the report."""

    actual: int
    proportion: float | None
    expected: float
    deviation: float


@dataclass(frozen=True)
class TargetReport:
    """All category statistics for one target."""

    target_id: str
    display_name: str
    mentions: int
    cells: dict[Category, CategoryCell]


@dataclass(frozen=True)
class ReportConfig:
    """The inputs a report was computed from; hashed into a fingerprint."""

    window: int
    lexicon_version: int
    tokenizer: TokenizerConfig = TokenizerConfig()
    target_ids: tuple[str, ...] = ()

    def fingerprint(self) -> str:
        payload = json.dumps({
            "window": self.window,
            "lexicon_version": self.lexicon_version,
            "tokenizer": {
                "lowercase": self.tokenizer.lowercase,
                "strip_punctuation": self.tokenizer.strip_punctuation,
                "keep_punctuation_tokens": self.tokenizer.keep_punctuation_tokens,
            },
            "targets": sorted(self.target_ids),
        }, sort_keys=True, separators=(",", ":"))
        return "sha256:" + hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class Report:
    """The assembled report: corpus stats, category stats, target table."""

    corpus: CorpusStats
    categories: list[CategoryStats]
    targets: list[TargetReport]
    config: ReportConfig


def build_report(
    counts: CountsTable,
    corpus_stats: CorpusStats,
    config: ReportConfig,
    display_names: Mapping[str, str] | None = None,
) -> Report:
    """Compute every statistic for every (target, category) pair.

    Pure function of its inputs: target rows are sorted by mentions
    descending with ties broken by target id, and categories appear in
    canonical order. Raises ConsistencyError when the counts were produced
    under a different lexicon version than the config declares.
    """
    if counts.lexicon_version != config.lexicon_version:
        raise ConsistencyError(
            f"counts at lexicon version {counts.lexicon_version}, "
            f"config says {config.lexicon_version}")
    total = corpus_stats.total_tokens
    names = display_names or {}

    cat_stats: list[CategoryStats] = []
    rel_freq: dict[Category, float] = {}
    for cat in CATEGORIES:
        count = counts.category_counts.get(cat, 0)
        freq = normalized_frequency(count, total) if total > 0 else 0.0
        rel_freq[cat] = freq
        cat_stats.append(CategoryStats(cat, count, freq))

    target_rows: list[TargetReport] = []
    for target_id, m in counts.mentions.items():
        per_cat = counts.co_counts.get(target_id, {})
        cells: dict[Category, CategoryCell] = {}
        for cat in CATEGORIES:
            actual = per_cat.get(cat, 0)
            expected = expected_count(rel_freq[cat], m)
            cells[cat] = CategoryCell(
                actual=actual,
                proportion=proportion(actual, m),
                expected=expected,
                deviation=deviation(actual, expected),
            )
        target_rows.append(TargetReport(
            target_id=target_id,
            display_name=names.get(target_id, target_id),
            mentions=m,
            cells=cells,
        ))
    target_rows.sort(key=lambda t: (-t.mentions, t.target_id))
    return Report(corpus=corpus_stats, categories=cat_stats,
                  targets=target_rows, config=config)


def report_to_dict(report: Report) -> dict:
    """Report as a JSON-ready dict with fixed key order, full precision."""
    cfg = report.config
    return {
        "config": {
            "window": cfg.window,
            "lexicon_version": cfg.lexicon_version,
            "tokenizer": {
                "lowercase": cfg.tokenizer.lowercase,
                "strip_punctuation": cfg.tokenizer.strip_punctuation,
                "keep_punctuation_tokens": cfg.tokenizer.keep_punctuation_tokens,
            },
            "targets": list(cfg.target_ids),
            "fingerprint": cfg.fingerprint(),
        },
        "corpus": {
            "doc_count": report.corpus.doc_count,
            "total_tokens": report.corpus.total_tokens,
            "per_site": {
                site: {"docs": sc.docs, "tokens": sc.tokens}
                for site, sc in sorted(report.corpus.per_site.items())
            },
        },
        "categories": [
            {
                "category": cs.category.value,
                "corpus_count": cs.corpus_count,
                "relative_frequency": cs.relative_frequency,
            }
            for cs in report.categories
        ],
        "targets": [
            {
                "target_id": tr.target_id,
                "display_name": tr.display_name,
                "mentions": tr.mentions,
                "categories": {
                    cat.value: {
                        "actual": cell.actual,
                        "proportion": cell.proportion,
                        "expected": cell.expected,
                        "deviation": cell.deviation,
                    }
                    for cat in CATEGORIES
                    for cell in (tr.cells[cat],)
                },
            }
            for tr in report.targets
        ],
    }


def report_to_json(report: Report) -> str:
    """Deterministic JSON serialization (fixed key order, repr floats)."""
    return json.dumps(report_to_dict(report), ensure_ascii=False, indent=2) + "\n"


def _fmt(value: float | None, decimals: int) -> str:
    return "" if value is None else f"{value:.{decimals}f}"


def write_report_csv(report: Report, out: IO[str]) -> None:
    """Display-rounded target table: per category actual/proportion/expected/deviation."""
    writer = csv.writer(out, lineterminator="\n")
    header = ["target", "display_name", "mentions"]
    for cat in CATEGORIES:
        header += [f"{cat.value}_actual", f"{cat.value}_proportion",
                   f"{cat.value}_expected", f"{cat.value}_deviation"]
    writer.writerow(header)
    for tr in report.targets:
        row: list[str] = [tr.target_id, tr.display_name, str(tr.mentions)]
        for cat in CATEGORIES:
            cell = tr.cells[cat]
            row += [str(cell.actual),
                    _fmt(cell.proportion, PROPORTION_DECIMALS),
                    _fmt(cell.expected, EXPECTED_DECIMALS),
                    _fmt(cell.deviation, DEVIATION_DECIMALS)]
        writer.writerow(row)


def write_category_csv(report: Report, out: IO[str]) -> None:
    """Category table: corpus counts and display-rounded relative frequency."""
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["category", "corpus_count", "relative_frequency"])
    for cs in report.categories:
        writer.writerow([cs.category.value, str(cs.corpus_count),
                         _fmt(cs.relative_frequency, REL_FREQ_DECIMALS)])


def write_figure_counts_csv(report: Report, out: IO[str]) -> None:
    """Plot data, counts panel: raw per-category hit counts per target."""
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["target", "display_name"] + [c.value for c in CATEGORIES])
    for tr in report.targets:
        writer.writerow([tr.target_id, tr.display_name]
                        + [str(tr.cells[c].actual) for c in CATEGORIES])


def write_figure_proportions_csv(report: Report, out: IO[str]) -> None:
    """Plot data, proportions panel: counts divided by mention totals."""
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["target", "display_name"] + [c.value for c in CATEGORIES])
    for tr in report.targets:
        writer.writerow([tr.target_id, tr.display_name]
                        + [_fmt(tr.cells[c].proportion, PROPORTION_DECIMALS)
                           for c in CATEGORIES])
