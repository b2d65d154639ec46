"""Hate-category lexicons: the six categories, their term dictionaries,
fast token-to-category matching, and TSV persistence.

Terms are stored normalized: lowercase, no internal whitespace. Multiword
expressions are kept underscore-joined in memory (matching the merged
corpus tokens) and re-spaced when written to disk so the TSV files stay
human-editable.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Iterable

from .errors import FormatError

SEED_LEXICON_PATH = os.path.join(os.path.dirname(__file__), "data", "seed_lexicon.tsv")


class Category(str, Enum):
    """The six monitored hate categories, in canonical display order."""

    SWEARWORD = "swearword"
    ANGER = "anger"
    NAUGHTINESS = "naughtiness"
    GENERAL_THREAT = "general_threat"
    DEATH_THREAT = "death_threat"
    SEXISM = "sexism"


CATEGORIES: tuple[Category, ...] = tuple(Category)


@dataclass(frozen=True)
class TermRecord:
    """Provenance of one lexicon term."""

    origin: str  # "seed" | "suggested"
    decided_by: str = ""
    decided_at: str = ""  # ISO-8601, empty for seed terms


@dataclass
class Lexicon:
    """Category term dictionaries with provenance and a version counter.

    A term may belong to several categories. ``version`` increments once
    per mutating operation (a single add or a whole session commit counts
    as one mutation).
    """

    entries: dict[Category, set[str]] = field(
        default_factory=lambda: {c: set() for c in CATEGORIES})
    provenance: dict[tuple[Category, str], TermRecord] = field(default_factory=dict)
    version: int = 1

    def terms(self, category: Category) -> frozenset[str]:
        return frozenset(self.entries[category])

    def __contains__(self, pair: tuple[Category, str]) -> bool:
        category, term = pair
        return term in self.entries[category]

    def term_count(self) -> int:
        return sum(len(s) for s in self.entries.values())

    def apply_additions(
        self,
        category: Category,
        additions: Iterable[tuple[str, TermRecord]],
    ) -> int:
        """Add terms with per-term provenance as ONE mutation (one version bump).

        Terms already present keep their existing provenance. The version
        increments even for an empty batch, so every logical edit (e.g. an
        expansion-session commit) is visible to version checks.
        """
        for term, record in additions:
            term = normalize_term(term)
            if term not in self.entries[category]:
                self.entries[category].add(term)
                self.provenance[(category, term)] = record
        self.version += 1
        return self.version

    def add_terms(
        self,
        category: Category,
        terms: Iterable[str],
        origin: str = "seed",
        decided_by: str = "",
        decided_at: str | None = None,
    ) -> int:
        """Add a batch of terms sharing one provenance record; one version bump."""
        when = decided_at if decided_at is not None else _now_iso()
        record = TermRecord(origin=origin, decided_by=decided_by, decided_at=when)
        return self.apply_additions(category, ((t, record) for t in terms))

    def entries_equal(self, other: "Lexicon") -> bool:
        return self.entries == other.entries

    def mwe_phrases(self) -> list[str]:
        """All multiword terms across categories, re-spaced for merging."""
        phrases = {t.replace("_", " ")
                   for terms in self.entries.values()
                   for t in terms if "_" in t}
        return sorted(phrases)


def normalize_term(term: str) -> str:
    """Lowercase a term and join internal whitespace with underscores."""
    return "_".join(term.lower().split())


def _now_iso() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _version_sidecar(path: str) -> str:
    return path + ".version"


def load_lexicon(path: str) -> Lexicon:
    """Load a lexicon from TSV lines "category<TAB>term".

    Terms may contain spaces in the file; they are underscore-joined on
    load. Duplicate (category, term) pairs collapse silently. A version
    sidecar file written by :func:`save_lexicon` is honored when present.
    """
    lexicon = Lexicon()
    labels = {c.value: c for c in CATEGORIES}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            label, sep, raw_term = line.partition("\t")
            if not sep:
                raise FormatError(f"{path}:{lineno}: expected 'category<TAB>term'")
            category = labels.get(label)
            if category is None:
                raise FormatError(f"{path}:{lineno}: unknown category {label!r}")
            term = normalize_term(raw_term)
            if not term:
                raise FormatError(f"{path}:{lineno}: empty term")
            if term not in lexicon.entries[category]:
                lexicon.entries[category].add(term)
                lexicon.provenance[(category, term)] = TermRecord(origin="seed")
    sidecar = _version_sidecar(path)
    if os.path.exists(sidecar):
        with open(sidecar, encoding="utf-8") as f:
            try:
                lexicon.version = int(f.read().strip())
            except ValueError:
                raise FormatError(f"{sidecar}: not an integer version")
    return lexicon


def save_lexicon(lexicon: Lexicon, path: str) -> None:
    """Write TSV sorted by (category, term), underscores re-spaced.

    The current version is persisted in a small sidecar file so that
    curation sessions survive process restarts.
    """
    rows = sorted(
        (category.value, term)
        for category, terms in lexicon.entries.items()
        for term in terms
    )
    with open(path, "w", encoding="utf-8") as f:
        for label, term in rows:
            f.write(f"{label}\t{term.replace('_', ' ')}\n")
    with open(_version_sidecar(path), "w", encoding="utf-8") as f:
        f.write(f"{lexicon.version}\n")


def load_seed_lexicon() -> Lexicon:
    """Load the lexicon of sample terms shipped with the package."""
    return load_lexicon(SEED_LEXICON_PATH)


class Matcher:
    """Immutable token -> categories lookup built from one lexicon version.

    Matchers are plain snapshots: rebuilding from the same lexicon version
    yields identical match results, and a matcher never observes later
    lexicon mutations. Lookup is a single dict access, which keeps corpus
    scanning matcher-bound rather than lexicon-bound.
    """

    __slots__ = ("_table", "version")

    def __init__(self, lexicon: Lexicon) -> None:
        table: dict[str, frozenset[Category]] = {}
        staging: dict[str, set[Category]] = {}
        for category, terms in lexicon.entries.items():
            for term in terms:
                staging.setdefault(term, set()).add(category)
        for term, cats in staging.items():
            table[term] = frozenset(cats)
        self._table = table
        self.version = lexicon.version

    def match_token(self, token: str) -> frozenset[Category]:
        """All categories whose dictionary contains ``token`` (exact match)."""
        return self._table.get(token, _NO_CATEGORIES)

    def __contains__(self, token: str) -> bool:
        return token in self._table

    def __len__(self) -> int:
        return len(self._table)

    @property
    def table(self) -> dict[str, frozenset[Category]]:
        """Read-only view used by hot scanning loops."""
        return self._table


_NO_CATEGORIES: frozenset[Category] = frozenset()


def match_token(matcher: Matcher, token: str) -> frozenset[Category]:
    """Module-level alias of :meth:`Matcher.match_token`."""
    return matcher.match_token(token)
