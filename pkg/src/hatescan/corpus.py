"""Corpus ingestion, tokenization and multiword-expression merging.

Input corpora are UTF-8 JSONL files, one comment/post per line with the
fields ``id``, ``site``, ``timestamp`` and ``text`` (unknown fields are
ignored). Tokenization is Unicode-aware and deterministic; multiword
expressions (MWEs) are merged into single underscore-joined tokens as a
preprocessing step so that downstream matching and embedding training can
treat them as ordinary vocabulary items.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import FormatError, InvalidInputError

# Word tokens are runs of Unicode letters/digits. Underscore is excluded so
# that a literal "_" in source text can never collide with the joiner used
# for merged MWE tokens.
_WORD_RE = re.compile(r"[^\W_]+")
# Punctuation tokens are runs of non-word, non-space characters.
_WORD_OR_PUNCT_RE = re.compile(r"[^\W_]+|[^\w\s]+")

REQUIRED_FIELDS = ("id", "site", "timestamp", "text")

# A malformed-line ratio above this fraction makes ingestion fail outright
# (only once there are enough offenders for the ratio to be meaningful).
MALFORMED_RATIO_LIMIT = 0.10
MALFORMED_MIN_COUNT = 10


@dataclass(frozen=True)
class RawDocument:
    """One comment/post as read from a corpus file."""

    id: str
    site: str
    timestamp: str
    text: str


@dataclass(frozen=True)
class TokenizedDocument:
    """A document after tokenization and MWE merging.

    ``char_spans`` holds per-token (start, end) offsets into the original
    text; a merged MWE token spans from the start of its first word to the
    end of its last.
    """

    id: str
    tokens: list[str]
    char_spans: list[tuple[int, int]]


@dataclass(frozen=True)
class TokenizerConfig:
    """Tokenizer behavior switches.

    The default is the "aggressive" mode: lowercase everything and drop
    punctuation entirely. ``keep_punctuation_tokens`` instead emits
    punctuation runs as standalone tokens (useful when quote/punctuation
    cues must stay visible to the scanner); it cannot be combined with
    ``strip_punctuation``.
    """

    lowercase: bool = True
    strip_punctuation: bool = True
    keep_punctuation_tokens: bool = False

    def __post_init__(self) -> None:
        if self.strip_punctuation and self.keep_punctuation_tokens:
            raise InvalidInputError(
                "strip_punctuation and keep_punctuation_tokens are mutually exclusive"
            )


def tokenize(text: str, config: TokenizerConfig = TokenizerConfig()) -> list[str]:
    """Tokenize ``text`` into normalized word tokens.

    Returns only the token sequence; use :func:`tokenize_with_spans` when
    character offsets are needed.
    """
    pattern = _WORD_OR_PUNCT_RE if config.keep_punctuation_tokens else _WORD_RE
    if config.lowercase:
        return [m.group().lower() for m in pattern.finditer(text)]
    return [m.group() for m in pattern.finditer(text)]


def tokenize_with_spans(
    text: str, config: TokenizerConfig = TokenizerConfig()
) -> tuple[list[str], list[tuple[int, int]]]:
    """Tokenize and keep per-token (start, end) offsets into ``text``."""
    pattern = _WORD_OR_PUNCT_RE if config.keep_punctuation_tokens else _WORD_RE
    tokens: list[str] = []
    spans: list[tuple[int, int]] = []
    lower = config.lowercase
    for m in pattern.finditer(text):
        tok = m.group()
        tokens.append(tok.lower() if lower else tok)
        spans.append(m.span())
    return tokens, spans


class MweTrie:
    """Token-level trie over multiword phrases for leftmost-longest merging.

    Every phrase must have at least two tokens. Phrase tokens are expected
    to be normalized the same way as the corpus (the loader does not
    re-tokenize them beyond splitting on single spaces).
    """

    __slots__ = ("root", "phrase_count")

    _TERMINAL = ""  # key marking a complete phrase inside a trie node

    def __init__(self, phrases: Iterable[str] = ()) -> None:
        self.root: dict = {}
        self.phrase_count = 0
        for phrase in phrases:
            self.add(phrase)

    def add(self, phrase: str) -> None:
        parts = phrase.split()
        if len(parts) < 2:
            raise InvalidInputError(f"MWE phrase needs >=2 tokens: {phrase!r}")
        node = self.root
        for part in parts:
            node = node.setdefault(part, {})
        if self._TERMINAL not in node:
            node[self._TERMINAL] = True
            self.phrase_count += 1

    def __len__(self) -> int:
        return self.phrase_count

    def merge(self, tokens: list[str]) -> list[str]:
        """Replace every leftmost-longest phrase match by one joined token."""
        merged, _ = self.merge_with_spans(tokens, None)
        return merged

    def merge_with_spans(
        self,
        tokens: list[str],
        spans: list[tuple[int, int]] | None,
    ) -> tuple[list[str], list[tuple[int, int]] | None]:
        """Like :meth:`merge` but also folds per-token character spans."""
        if not self.root:
            return list(tokens), list(spans) if spans is not None else None
        root = self.root
        terminal = self._TERMINAL
        n = len(tokens)
        out: list[str] = []
        out_spans: list[tuple[int, int]] | None = [] if spans is not None else None
        i = 0
        while i < n:
            node = root.get(tokens[i])
            best = 0
            if node is not None:
                j = i + 1
                if terminal in node:
                    best = j - i
                while j < n:
                    node = node.get(tokens[j])
                    if node is None:
                        break
                    j += 1
                    if terminal in node:
                        best = j - i
            if best >= 2:
                out.append("_".join(tokens[i : i + best]))
                if out_spans is not None:
                    out_spans.append((spans[i][0], spans[i + best - 1][1]))
                i += best
            else:
                out.append(tokens[i])
                if out_spans is not None:
                    out_spans.append(spans[i])
                i += 1
        return out, out_spans


def merge_mwes(tokens: list[str], mwe_set: Iterable[str] | MweTrie) -> list[str]:
    """Merge every leftmost-longest MWE match into one underscore-joined token.

    ``mwe_set`` may be an iterable of space-separated phrases or a prebuilt
    :class:`MweTrie`. Non-matching tokens pass through unchanged; merging is
    idempotent because joined tokens contain underscores and phrase tokens
    never do.
    """
    trie = mwe_set if isinstance(mwe_set, MweTrie) else MweTrie(mwe_set)
    return trie.merge(tokens)


def tokenize_document(
    doc: RawDocument,
    config: TokenizerConfig,
    mwes: MweTrie | None = None,
) -> TokenizedDocument:
    """Tokenize one document and merge MWEs, keeping character spans."""
    tokens, spans = tokenize_with_spans(doc.text, config)
    if mwes is not None and len(mwes):
        tokens, spans = mwes.merge_with_spans(tokens, spans)
    return TokenizedDocument(id=doc.id, tokens=tokens, char_spans=spans)


def load_mwe_file(path: str) -> MweTrie:
    """Load an MWE set file: UTF-8 plain text, one phrase per line."""
    trie = MweTrie()
    with open(path, encoding="utf-8") as f:
        for line in f:
            phrase = line.strip()
            if phrase:
                trie.add(phrase)
    return trie


class Corpus:
    """Handle over a validated JSONL corpus file.

    Construction (via :func:`ingest_jsonl`) runs one validation pass over
    the file; iteration re-reads it, so the handle stays O(1) in memory for
    arbitrarily large corpora. Malformed lines are skipped on every pass.
    """

    def __init__(self, path: str, doc_count: int, skipped_lines: int,
                 malformed_line_numbers: list[int]) -> None:
        self.path = path
        self.doc_count = doc_count
        self.skipped_lines = skipped_lines
        self.malformed_line_numbers = malformed_line_numbers

    def __len__(self) -> int:
        return self.doc_count

    def __iter__(self) -> Iterator[RawDocument]:
        seen: set[str] = set()
        with open(self.path, encoding="utf-8") as f:
            for line in f:
                doc = _parse_line(line, seen)
                if doc is not None:
                    yield doc

    def __repr__(self) -> str:  # pragma: no cover
        return (f"Corpus(path={self.path!r}, docs={self.doc_count}, "
                f"skipped={self.skipped_lines})")


def _parse_line(line: str, seen_ids: set[str]) -> RawDocument | None:
    """Parse one JSONL line; return None if it is malformed.

    Malformed means: not a JSON object, a required field missing or of the
    wrong type, or a duplicate document id.
    """
    try:
        obj = json.loads(line)
    except ValueError:
        return None
    if not isinstance(obj, dict):
        return None
    for name in REQUIRED_FIELDS:
        if not isinstance(obj.get(name), str):
            return None
    doc_id = obj["id"]
    if doc_id in seen_ids:
        return None
    seen_ids.add(doc_id)
    return RawDocument(id=doc_id, site=obj["site"],
                       timestamp=obj["timestamp"], text=obj["text"])


def ingest_jsonl(path: str) -> Corpus:
    """Validate a JSONL corpus file and return a streaming handle over it.

    Raises OSError when the file cannot be read, and FormatError when more
    than 10% of lines (and at least 10 lines overall) are malformed.
    """
    doc_count = 0
    offenders: list[int] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if _parse_line(line, seen) is None:
                offenders.append(lineno)
            else:
                doc_count += 1
    skipped = len(offenders)
    total = doc_count + skipped
    if (skipped >= MALFORMED_MIN_COUNT
            and skipped > MALFORMED_RATIO_LIMIT * total):
        raise FormatError(
            f"{path}: {skipped}/{total} malformed lines; "
            f"first offenders at lines {offenders[:10]}"
        )
    return Corpus(path, doc_count, skipped, offenders)


@dataclass
class SiteCount:
    """Per-site document and token tallies."""

    docs: int = 0
    tokens: int = 0


@dataclass
class CorpusStats:
    """Corpus-level totals; ``total_tokens`` is counted after MWE merging."""

    total_tokens: int = 0
    doc_count: int = 0
    per_site: dict[str, SiteCount] = field(default_factory=dict)

    def add_document(self, site: str, token_count: int) -> None:
        self.total_tokens += token_count
        self.doc_count += 1
        sc = self.per_site.get(site)
        if sc is None:
            sc = self.per_site[site] = SiteCount()
        sc.docs += 1
        sc.tokens += token_count

    def absorb(self, other: "CorpusStats") -> None:
        """In-place shard merge (associative and commutative)."""
        self.total_tokens += other.total_tokens
        self.doc_count += other.doc_count
        for site, sc in other.per_site.items():
            cur = self.per_site.get(site)
            if cur is None:
                self.per_site[site] = SiteCount(sc.docs, sc.tokens)
            else:
                cur.docs += sc.docs
                cur.tokens += sc.tokens

    def merge(self, other: "CorpusStats") -> "CorpusStats":
        """Pure shard merge returning a new CorpusStats."""
        out = CorpusStats(0, 0, {})
        out.absorb(self)
        out.absorb(other)
        return out


def corpus_stats(
    corpus: Iterable[RawDocument],
    config: TokenizerConfig = TokenizerConfig(),
    mwes: MweTrie | None = None,
) -> CorpusStats:
    """Count documents and post-merge tokens, broken down per site."""
    stats = CorpusStats()
    merge = mwes is not None and len(mwes) > 0
    for doc in corpus:
        tokens = tokenize(doc.text, config)
        if merge:
            tokens = mwes.merge(tokens)
        stats.add_document(doc.site, len(tokens))
    return stats
