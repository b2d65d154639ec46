"""Mention scanning: locate target-name token sequences and count
category-lexicon hits inside a narrow window around each mention.

The window is measured in tokens after MWE merging and excludes the name
tokens themselves. Counting is mention-level and binary per category: a
mention with three anger terms next to it still adds 1 to the anger
co-occurrence count, while the individual term hits stay available on the
MentionHit for manual triage.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .corpus import CorpusStats, TokenizedDocument, TokenizerConfig, tokenize
from .errors import ConsistencyError, FormatError, InvalidInputError
from .lexicon import CATEGORIES, Category, Matcher

KWIC_RADIUS = 10  # tokens kept on each side of a mention for triage


@dataclass(frozen=True)
class Target:
    """A monitored individual, matched by full-name token sequence."""

    id: str
    full_name: tuple[str, ...]
    display_name: str
    aliases: tuple[tuple[str, ...], ...] = ()

    def __post_init__(self) -> None:
        if len(self.full_name) < 1:
            raise InvalidInputError(f"target {self.id!r}: empty full name")
        for alias in self.aliases:
            if len(alias) < 1:
                raise InvalidInputError(f"target {self.id!r}: empty alias")

    def name_sequences(self) -> tuple[tuple[str, ...], ...]:
        return (self.full_name,) + self.aliases


@dataclass(frozen=True)
class Mention:
    """One occurrence of a target's name; span is [start, end) in tokens."""

    doc_id: str
    target_id: str
    start: int
    end: int


@dataclass(frozen=True)
class MentionHit:
    """A mention plus the lexicon terms found in its context window.

    ``hits`` maps each category to the (token index, term) pairs that
    triggered it, sorted by index. ``kwic_tokens`` is the +-10 token
    snippet around the name span and ``kwic_start`` its offset into the
    document, so snippet-relative positions are ``index - kwic_start``.
    """

    mention: Mention
    hits: dict[Category, list[tuple[int, str]]]
    kwic_start: int
    kwic_tokens: list[str]
    lexicon_version: int
    window: int


def load_targets_file(path: str, config: TokenizerConfig = TokenizerConfig()) -> list[Target]:
    """Load targets from TSV "id<TAB>full name<TAB>display name[<TAB>alias;...]".

    Names are tokenized with the same config as the corpus so that mention
    matching compares like with like.
    """
    targets: list[Target] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) < 3:
                raise FormatError(f"{path}:{lineno}: expected at least 3 tab-separated fields")
            target_id, name, display = parts[0], parts[1], parts[2]
            if not target_id or target_id in seen:
                raise FormatError(f"{path}:{lineno}: missing or duplicate target id")
            seen.add(target_id)
            name_tokens = tuple(tokenize(name, config))
            if not name_tokens:
                raise FormatError(f"{path}:{lineno}: name tokenizes to nothing")
            aliases = []
            if len(parts) > 3 and parts[3].strip():
                for alias in parts[3].split(";"):
                    alias_tokens = tuple(tokenize(alias, config))
                    if alias_tokens:
                        aliases.append(alias_tokens)
            targets.append(Target(id=target_id, full_name=name_tokens,
                                  display_name=display, aliases=tuple(aliases)))
    return targets


class TargetIndex:
    """First-token index over target name sequences for linear scanning.

    Candidate sequences sharing a first token are tried longest-first;
    equal-length ties go to the lexicographically smallest target id, so
    matching is deterministic for any target set.
    """

    __slots__ = ("targets", "_by_first")

    def __init__(self, targets: Iterable[Target]) -> None:
        self.targets = list(targets)
        by_first: dict[str, list[tuple[tuple[str, ...], str]]] = {}
        for target in self.targets:
            for seq in target.name_sequences():
                by_first.setdefault(seq[0], []).append((seq, target.id))
        for candidates in by_first.values():
            candidates.sort(key=lambda c: (-len(c[0]), c[1]))
        self._by_first = by_first

    def find(self, tokens: Sequence[str], doc_id: str = "") -> list[Mention]:
        """All non-overlapping leftmost-longest name matches, left to right."""
        by_first = self._by_first
        mentions: list[Mention] = []
        n = len(tokens)
        i = 0
        while i < n:
            candidates = by_first.get(tokens[i])
            if candidates is not None:
                for seq, target_id in candidates:
                    j = i + len(seq)
                    if j <= n and tuple(tokens[i:j]) == seq:
                        mentions.append(Mention(doc_id, target_id, i, j))
                        i = j
                        break
                else:
                    i += 1
            else:
                i += 1
        return mentions


def find_mentions(
    tokens: Sequence[str],
    targets: Iterable[Target] | TargetIndex,
    doc_id: str = "",
) -> list[Mention]:
    """Locate every target-name occurrence in a token sequence."""
    index = targets if isinstance(targets, TargetIndex) else TargetIndex(targets)
    return index.find(tokens, doc_id)


def scan_document(
    doc: TokenizedDocument,
    matcher: Matcher,
    targets: Iterable[Target] | TargetIndex,
    window: int = 1,
) -> list[MentionHit]:
    """Produce one MentionHit per mention found in ``doc``.

    The ``window`` tokens before and after the name span (clipped to the
    document) are checked against the lexicon; mentions with no hits still
    yield a MentionHit with an empty hits map so that mention totals and
    KWIC browsing cover every occurrence.
    """
    if window < 0:
        raise InvalidInputError("window must be >= 0")
    index = targets if isinstance(targets, TargetIndex) else TargetIndex(targets)
    tokens = doc.tokens
    table = matcher.table
    n = len(tokens)
    out: list[MentionHit] = []
    for mention in index.find(tokens, doc.id):
        hits: dict[Category, list[tuple[int, str]]] = {}
        lo = mention.start - window
        if lo < 0:
            lo = 0
        hi = mention.end + window
        if hi > n:
            hi = n
        for i in list(range(lo, mention.start)) + list(range(mention.end, hi)):
            token = tokens[i]
            cats = table.get(token)
            if cats:
                for cat in cats:
                    hits.setdefault(cat, []).append((i, token))
        for pairs in hits.values():
            pairs.sort()
        kwic_start = mention.start - KWIC_RADIUS
        if kwic_start < 0:
            kwic_start = 0
        kwic_end = mention.end + KWIC_RADIUS
        if kwic_end > n:
            kwic_end = n
        out.append(MentionHit(
            mention=mention,
            hits=hits,
            kwic_start=kwic_start,
            kwic_tokens=list(tokens[kwic_start:kwic_end]),
            lexicon_version=matcher.version,
            window=window,
        ))
    return out


def category_corpus_counts(
    corpus: Iterable[Sequence[str] | TokenizedDocument],
    matcher: Matcher,
) -> dict[Category, int]:
    """Corpus-wide term-occurrence counts per category.

    Counts every token (not only tokens near mentions); a token belonging
    to two categories increments both.
    """
    counts = {c: 0 for c in CATEGORIES}
    table = matcher.table
    for item in corpus:
        tokens = item.tokens if isinstance(item, TokenizedDocument) else item
        for token in tokens:
            cats = table.get(token)
            if cats:
                for cat in cats:
                    counts[cat] += 1
    return counts


@dataclass
class CountsTable:
    """Aggregated scan counts: #(m), #(m,c), #(c) and T.

    ``co_counts`` is mention-level and binary per category. The table is a
    commutative monoid under :meth:`merge`, so per-shard tables sum to the
    whole-corpus table.
    """

    mentions: dict[str, int] = field(default_factory=dict)
    co_counts: dict[str, dict[Category, int]] = field(default_factory=dict)
    category_counts: dict[Category, int] = field(
        default_factory=lambda: {c: 0 for c in CATEGORIES})
    total_tokens: int = 0
    lexicon_version: int = 1
    window: int = 1

    def merge(self, other: "CountsTable") -> "CountsTable":
        if self.lexicon_version != other.lexicon_version:
            raise ConsistencyError(
                f"cannot merge counts from lexicon versions "
                f"{self.lexicon_version} and {other.lexicon_version}")
        if self.window != other.window:
            raise ConsistencyError(
                f"cannot merge counts from windows {self.window} and {other.window}")
        out = CountsTable(lexicon_version=self.lexicon_version, window=self.window)
        out.total_tokens = self.total_tokens + other.total_tokens
        for src in (self, other):
            for tid, m in src.mentions.items():
                out.mentions[tid] = out.mentions.get(tid, 0) + m
            for tid, per_cat in src.co_counts.items():
                dst = out.co_counts.setdefault(tid, {c: 0 for c in CATEGORIES})
                for cat, v in per_cat.items():
                    dst[cat] += v
            for cat, v in src.category_counts.items():
                out.category_counts[cat] += v
        return out


def aggregate(
    hit_lists: Iterable[Iterable[MentionHit]],
    corpus_stats: CorpusStats,
    matcher: Matcher,
    *,
    category_counts: dict[Category, int],
    targets: Iterable[Target] | TargetIndex,
    window: int | None = None,
) -> CountsTable:
    """Fold per-document hit lists into one CountsTable.

    Every configured target appears in the table, including those with zero
    mentions. All hits must have been produced under the matcher's lexicon
    version and one window, otherwise a ConsistencyError is raised.

    ``corpus_stats`` and ``category_counts`` are read only after the hit
    lists are exhausted, so ``hit_lists`` may be a generator whose side
    effects fill them (single-pass streaming scans rely on this).
    """
    target_list = targets.targets if isinstance(targets, TargetIndex) else list(targets)
    table = CountsTable(
        mentions={t.id: 0 for t in target_list},
        co_counts={t.id: {c: 0 for c in CATEGORIES} for t in target_list},
        lexicon_version=matcher.version,
    )
    seen_window = window
    for hit_list in hit_lists:
        for mh in hit_list:
            if mh.lexicon_version != matcher.version:
                raise ConsistencyError(
                    f"hit produced under lexicon version {mh.lexicon_version}, "
                    f"aggregating under {matcher.version}")
            if seen_window is None:
                seen_window = mh.window
            elif mh.window != seen_window:
                raise ConsistencyError(
                    f"hits mix windows {seen_window} and {mh.window}")
            tid = mh.mention.target_id
            table.mentions[tid] = table.mentions.get(tid, 0) + 1
            per_cat = table.co_counts.get(tid)
            if per_cat is None:
                per_cat = table.co_counts[tid] = {c: 0 for c in CATEGORIES}
            for cat in mh.hits:
                per_cat[cat] += 1
    table.window = seen_window if seen_window is not None else 1
    table.category_counts = {c: category_counts.get(c, 0) for c in CATEGORIES}
    table.total_tokens = corpus_stats.total_tokens
    return table
