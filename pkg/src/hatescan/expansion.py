"""Human-in-the-loop lexicon expansion sessions.

A session proposes the k nearest embedding neighbors of every seed term in
one category, the expert accepts or rejects each suggestion, and a commit
writes the accepted terms back to the lexicon in a single version bump.
Rejected terms go to a persistent per-category reject memory so later
rounds stay productive. The decision ledger is append-only: replaying it
against the lexicon as it was at session open reproduces the committed
lexicon exactly.
"""

from __future__ import annotations

import csv
import json
import os
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import IO, Iterable

from .embeddings import VectorStore, nearest_neighbors
from .errors import (
    DuplicateDecisionError,
    InvalidInputError,
    NotInQueueError,
    OovError,
    SessionStateError,
    StaleSessionError,
)
from .lexicon import Category, Lexicon, TermRecord

DEFAULT_K = 15

ACCEPT = "accept"
REJECT = "reject"

OPEN = "open"
COMMITTED = "committed"
ABANDONED = "abandoned"


@dataclass(frozen=True)
class Suggestion:
    """A candidate term with the seed term and cosine score that produced it."""

    term: str
    source_term: str
    score: float
    category: Category


@dataclass(frozen=True)
class Decision:
    term: str
    verdict: str
    decided_at: str
    decider: str


@dataclass
class Session:
    """One expansion round for one category.

    ``queue`` holds the still-undecided suggestions in rank order;
    ``decisions`` is the append-only ledger. A term appears at most once
    across the two.
    """

    id: str
    category: Category
    lexicon_version_at_open: int
    queue: list[Suggestion] = field(default_factory=list)
    decisions: list[Decision] = field(default_factory=list)
    status: str = OPEN
    oov_seeds: list[str] = field(default_factory=list)

    def decided_terms(self) -> set[str]:
        return {d.term for d in self.decisions}

    def accepted_terms(self) -> list[str]:
        return [d.term for d in self.decisions if d.verdict == ACCEPT]

    def rejected_terms(self) -> list[str]:
        return [d.term for d in self.decisions if d.verdict == REJECT]


class RejectMemory:
    """Per-category set of terms an expert has already rejected.

    Rejections are category-scoped: a term rejected for anger may still be
    suggested for naughtiness.
    """

    def __init__(self, data: dict[Category, set[str]] | None = None) -> None:
        self._data: dict[Category, set[str]] = data or {}

    def rejected(self, category: Category) -> frozenset[str]:
        return frozenset(self._data.get(category, ()))

    def add(self, category: Category, terms: Iterable[str]) -> None:
        self._data.setdefault(category, set()).update(terms)

    def to_dict(self) -> dict[str, list[str]]:
        return {c.value: sorted(terms) for c, terms in sorted(
            self._data.items(), key=lambda kv: kv[0].value) if terms}

    @classmethod
    def from_dict(cls, data: dict[str, list[str]]) -> "RejectMemory":
        return cls({Category(label): set(terms) for label, terms in data.items()})


def _now_iso() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def open_session(
    lexicon: Lexicon,
    category: Category,
    store: VectorStore,
    k: int = DEFAULT_K,
    reject_memory: RejectMemory | None = None,
    session_id: str | None = None,
) -> Session:
    """Build a suggestion queue from the k nearest neighbors of every seed.

    Suggestions exclude terms already in the category and terms previously
    rejected for it; duplicates across seeds keep their best score. Seeds
    missing from the vector store are recorded on the session (an error is
    raised only when every seed is out of vocabulary).
    """
    seeds = sorted(lexicon.entries[category])
    if not seeds:
        raise InvalidInputError(f"category {category.value!r} has no seed terms")
    existing = lexicon.entries[category]
    rejected = reject_memory.rejected(category) if reject_memory else frozenset()

    best: dict[str, Suggestion] = {}
    oov: list[str] = []
    for seed in seeds:
        if seed not in store:
            oov.append(seed)
            continue
        for term, score in nearest_neighbors(store, seed, k):
            if term in existing or term in rejected:
                continue
            cur = best.get(term)
            if cur is None or score > cur.score or (
                    score == cur.score and seed < cur.source_term):
                best[term] = Suggestion(term=term, source_term=seed,
                                        score=score, category=category)
    if len(oov) == len(seeds):
        raise OovError(
            f"all seed terms of {category.value!r} are out of vocabulary: {oov}")

    queue = sorted(best.values(), key=lambda s: (-s.score, s.term))
    return Session(
        id=session_id if session_id is not None else uuid.uuid4().hex,
        category=category,
        lexicon_version_at_open=lexicon.version,
        queue=queue,
        oov_seeds=oov,
    )


def next_suggestions(session: Session, n: int) -> list[Suggestion]:
    """The first n undecided suggestions in rank order; pure read."""
    if session.status != OPEN:
        raise SessionStateError(f"session {session.id} is {session.status}")
    if n < 0:
        raise InvalidInputError("n must be >= 0")
    return list(session.queue[:n])


def decide(
    session: Session,
    term: str,
    verdict: str,
    decider: str = "analyst",
    decided_at: str | None = None,
) -> Session:
    """Record one accept/reject decision and drop the term from the queue."""
    if session.status != OPEN:
        raise SessionStateError(f"session {session.id} is {session.status}")
    if verdict not in (ACCEPT, REJECT):
        raise InvalidInputError(f"verdict must be {ACCEPT!r} or {REJECT!r}")
    if term in session.decided_terms():
        raise DuplicateDecisionError(f"term already decided: {term!r}")
    position = next((i for i, s in enumerate(session.queue) if s.term == term), None)
    if position is None:
        raise NotInQueueError(f"term was never suggested: {term!r}")
    session.queue.pop(position)
    session.decisions.append(Decision(
        term=term, verdict=verdict,
        decided_at=decided_at if decided_at is not None else _now_iso(),
        decider=decider,
    ))
    return session


def commit(
    session: Session,
    lexicon: Lexicon,
    reject_memory: RejectMemory | None = None,
) -> int:
    """Write accepted terms into the lexicon; returns the new version.

    Fails with StaleSessionError when the lexicon has moved past the
    version the session was opened against (the session must be reopened).
    The version bumps exactly once, even for empty-accept sessions, so a
    commit is always visible to concurrent readers.
    """
    if session.status != OPEN:
        raise SessionStateError(f"session {session.id} is {session.status}")
    if lexicon.version != session.lexicon_version_at_open:
        raise StaleSessionError(
            f"lexicon is at version {lexicon.version}, session opened at "
            f"{session.lexicon_version_at_open}")
    additions = [
        (d.term, TermRecord(origin="suggested", decided_by=d.decider,
                            decided_at=d.decided_at))
        for d in session.decisions if d.verdict == ACCEPT
    ]
    lexicon.apply_additions(session.category, additions)
    if reject_memory is not None:
        reject_memory.add(session.category, session.rejected_terms())
    session.status = COMMITTED
    return lexicon.version


def replay_ledger(opening_lexicon: Lexicon, session: Session) -> Lexicon:
    """Apply a session's ledger to a copy of the lexicon it was opened on.

    Event-sourcing check: the result has exactly the entries a commit of
    this session produced.
    """
    replayed = Lexicon(
        entries={c: set(terms) for c, terms in opening_lexicon.entries.items()},
        provenance=dict(opening_lexicon.provenance),
        version=opening_lexicon.version,
    )
    additions = [
        (d.term, TermRecord(origin="suggested", decided_by=d.decider,
                            decided_at=d.decided_at))
        for d in session.decisions if d.verdict == ACCEPT
    ]
    replayed.apply_additions(session.category, additions)
    return replayed


def export_ledger_csv(session: Session, out: IO[str]) -> None:
    """Audit export: one row per decision, in ledger order."""
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["session_id", "category", "term", "verdict",
                     "decided_at", "decider"])
    for d in session.decisions:
        writer.writerow([session.id, session.category.value, d.term,
                         d.verdict, d.decided_at, d.decider])


def session_to_dict(session: Session) -> dict:
    return {
        "id": session.id,
        "category": session.category.value,
        "lexicon_version_at_open": session.lexicon_version_at_open,
        "status": session.status,
        "oov_seeds": list(session.oov_seeds),
        "queue": [
            {"term": s.term, "source_term": s.source_term, "score": s.score}
            for s in session.queue
        ],
        "decisions": [
            {"term": d.term, "verdict": d.verdict,
             "decided_at": d.decided_at, "decider": d.decider}
            for d in session.decisions
        ],
    }


def session_from_dict(data: dict) -> Session:
    category = Category(data["category"])
    return Session(
        id=data["id"],
        category=category,
        lexicon_version_at_open=data["lexicon_version_at_open"],
        status=data["status"],
        oov_seeds=list(data.get("oov_seeds", [])),
        queue=[
            Suggestion(term=s["term"], source_term=s["source_term"],
                       score=s["score"], category=category)
            for s in data.get("queue", [])
        ],
        decisions=[
            Decision(term=d["term"], verdict=d["verdict"],
                     decided_at=d["decided_at"], decider=d["decider"])
            for d in data.get("decisions", [])
        ],
    )


class SessionStore:
    """Directory-backed persistence for sessions and the reject memory."""

    def __init__(self, directory: str) -> None:
        self.directory = directory
        self.sessions_dir = os.path.join(directory, "sessions")
        self.rejects_path = os.path.join(directory, "rejects.json")
        os.makedirs(self.sessions_dir, exist_ok=True)

    def save_session(self, session: Session) -> str:
        path = os.path.join(self.sessions_dir, f"{session.id}.json")
        with open(path, "w", encoding="utf-8") as f:
            json.dump(session_to_dict(session), f, ensure_ascii=False, indent=2)
            f.write("\n")
        return path

    def load_session(self, session_id: str) -> Session:
        path = os.path.join(self.sessions_dir, f"{session_id}.json")
        if not os.path.exists(path):
            raise SessionStateError(f"unknown session: {session_id}")
        with open(path, encoding="utf-8") as f:
            return session_from_dict(json.load(f))

    def list_session_ids(self) -> list[str]:
        return sorted(
            name[: -len(".json")]
            for name in os.listdir(self.sessions_dir)
            if name.endswith(".json")
        )

    def load_reject_memory(self) -> RejectMemory:
        if not os.path.exists(self.rejects_path):
            return RejectMemory()
        with open(self.rejects_path, encoding="utf-8") as f:
            return RejectMemory.from_dict(json.load(f))

    def save_reject_memory(self, memory: RejectMemory) -> None:
        with open(self.rejects_path, "w", encoding="utf-8") as f:
            json.dump(memory.to_dict(), f, ensure_ascii=False, indent=2)
            f.write("\n")
