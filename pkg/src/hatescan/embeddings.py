"""CBOW word embeddings with negative sampling, plus cosine k-NN queries.

The trainer predicts a center word from the mean of its context vectors
and optimizes the negative-sampling objective, so trained dot products
track the log likelihood of observing word/context pairs. Updates are
applied one sentence at a time with plain numpy, which keeps single-worker
runs bit-reproducible for a fixed seed. Multi-worker training updates the
shared weight matrices without locks and is therefore not deterministic.

Vector files use the common text exchange format: a "vocab_size dimension"
header line followed by one "token c1 ... cD" line per word.
"""

from __future__ import annotations

import hashlib
import json
import math
import threading
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import FormatError, InvalidInputError, OovError, TrainingError

MIN_LEARNING_RATE = 1e-4
MAX_EXP = 30.0  # sigmoid argument clip; keeps exp() finite in float32


@dataclass(frozen=True)
class EmbeddingParams:
    """Training hyperparameters; defaults mirror common CBOW toolkit defaults."""

    dimension: int = 100
    window: int = 5
    min_count: int = 5
    negative_samples: int = 5
    epochs: int = 5
    initial_learning_rate: float = 0.025
    subsample_threshold: float = 1e-3
    seed: int = 1
    workers: int = 1

    def __post_init__(self) -> None:
        if self.dimension <= 0 or self.window <= 0 or self.min_count <= 0:
            raise InvalidInputError("dimension, window and min_count must be positive")
        if self.negative_samples < 0:
            raise InvalidInputError("negative_samples must be >= 0")
        if self.epochs <= 0 or self.initial_learning_rate <= 0:
            raise InvalidInputError("epochs and initial_learning_rate must be positive")
        if self.workers < 1:
            raise InvalidInputError("workers must be >= 1")

    def fingerprint(self) -> str:
        payload = json.dumps(self.__dict__, sort_keys=True)
        return "sha256:" + hashlib.sha256(payload.encode()).hexdigest()[:16]


class VectorStore:
    """Vocabulary plus one dense vector per token, with cosine k-NN.

    The store is read-only after construction; normalized vectors for
    similarity queries are computed once and cached.
    """

    def __init__(self, vocab: Sequence[str], vectors: np.ndarray,
                 params_fingerprint: str = "") -> None:
        if len(vocab) != len(vectors):
            raise InvalidInputError("vocabulary and vector count differ")
        if len(set(vocab)) != len(vocab):
            raise InvalidInputError("vocabulary tokens must be unique")
        self.vocab: list[str] = list(vocab)
        self.vectors: np.ndarray = np.asarray(vectors, dtype=np.float32)
        self.params_fingerprint = params_fingerprint
        self.index: dict[str, int] = {t: i for i, t in enumerate(self.vocab)}
        self.epoch_losses: list[float] = []
        self._unit: np.ndarray | None = None
        self._vocab_arr: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.vocab)

    def __contains__(self, token: str) -> bool:
        return token in self.index

    @property
    def dimension(self) -> int:
        return int(self.vectors.shape[1])

    def vector(self, token: str) -> np.ndarray:
        i = self.index.get(token)
        if i is None:
            raise OovError(f"token not in vocabulary: {token!r}")
        return self.vectors[i]

    def _unit_vectors(self) -> np.ndarray:
        if self._unit is None:
            norms = np.linalg.norm(self.vectors, axis=1, keepdims=True)
            if np.any(norms == 0.0):
                raise InvalidInputError("store contains zero-norm vectors")
            self._unit = self.vectors / norms
        return self._unit

    def _vocab_array(self) -> np.ndarray:
        if self._vocab_arr is None:
            self._vocab_arr = np.array(self.vocab)
        return self._vocab_arr


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity of two nonzero vectors of equal dimension."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise InvalidInputError(f"dimension mismatch: {a.shape} vs {b.shape}")
    na = math.sqrt(float(np.dot(a, a)))
    nb = math.sqrt(float(np.dot(b, b)))
    if na == 0.0 or nb == 0.0:
        raise InvalidInputError("cosine undefined for zero-norm vectors")
    value = float(np.dot(a, b)) / (na * nb)
    return max(-1.0, min(1.0, value))


def nearest_neighbors(store: VectorStore, query_token: str, k: int) -> list[tuple[str, float]]:
    """Top-k vocabulary tokens by cosine to the query, query excluded.

    Ranking is exhaustive over the whole vocabulary (no approximate index);
    score ties break lexicographically. Returns fewer than k entries when
    the vocabulary is small.
    """
    if k < 1:
        raise InvalidInputError("k must be >= 1")
    qi = store.index.get(query_token)
    if qi is None:
        raise OovError(f"query token not in vocabulary: {query_token!r}")
    unit = store._unit_vectors()
    sims = unit @ unit[qi]
    np.clip(sims, -1.0, 1.0, out=sims)
    sims[qi] = -np.inf  # exclude the query itself
    order = np.lexsort((store._vocab_array(), -sims))
    out: list[tuple[str, float]] = []
    for i in order[: min(k, len(store.vocab) - 1)]:
        out.append((store.vocab[int(i)], float(sims[int(i)])))
    return out


def save_vectors(store: VectorStore, path: str) -> None:
    """Write the store in the text exchange format (9 significant digits,
    enough to round-trip float32 exactly)."""
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{len(store.vocab)} {store.dimension}\n")
        for token, row in zip(store.vocab, store.vectors):
            f.write(token + " " + " ".join(f"{x:.9g}" for x in row) + "\n")


def load_vectors(path: str) -> VectorStore:
    """Load a text-format vector file; strict about dimensions per line."""
    with open(path, encoding="utf-8") as f:
        header = f.readline().split()
        if len(header) != 2:
            raise FormatError(f"{path}:1: expected header 'vocab_size dimension'")
        try:
            vocab_size, dimension = int(header[0]), int(header[1])
        except ValueError:
            raise FormatError(f"{path}:1: non-integer header fields")
        if vocab_size < 0 or dimension <= 0:
            raise FormatError(f"{path}:1: invalid header values")
        vocab: list[str] = []
        rows = np.empty((vocab_size, dimension), dtype=np.float32)
        lineno = 1
        for line in f:
            lineno += 1
            parts = line.rstrip("\n").split(" ")
            if len(parts) != dimension + 1:
                raise FormatError(
                    f"{path}:{lineno}: expected token + {dimension} components, "
                    f"got {len(parts) - 1}")
            if len(vocab) >= vocab_size:
                raise FormatError(f"{path}:{lineno}: more lines than header declares")
            try:
                rows[len(vocab)] = [float(x) for x in parts[1:]]
            except ValueError:
                raise FormatError(f"{path}:{lineno}: non-numeric component")
            vocab.append(parts[0])
        if len(vocab) != vocab_size:
            raise FormatError(
                f"{path}: header declares {vocab_size} entries, file has {len(vocab)}")
    return VectorStore(vocab, rows)


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(x, -MAX_EXP, MAX_EXP)))


def _neg_log_sigmoid(x: np.ndarray) -> np.ndarray:
    # -log(sigmoid(x)) computed stably for large |x|
    return np.log1p(np.exp(-np.abs(x))) + np.maximum(-x, 0.0)


class _CbowModel:
    """Mutable training state shared by the epoch loop (and worker threads)."""

    def __init__(self, vocab: list[str], counts: np.ndarray, params: EmbeddingParams):
        self.params = params
        self.vocab = vocab
        self.index = {t: i for i, t in enumerate(vocab)}
        rng = np.random.default_rng(params.seed)
        dim = params.dimension
        self.syn0 = ((rng.random((len(vocab), dim)) - 0.5) / dim).astype(np.float32)
        self.syn1 = np.zeros((len(vocab), dim), dtype=np.float32)
        # Noise distribution: unigram counts raised to 3/4.
        noise = counts.astype(np.float64) ** 0.75
        self.noise_cum = np.cumsum(noise)
        self.noise_total = float(self.noise_cum[-1])
        # Subsampling keep-probability per vocabulary word.
        total = float(counts.sum())
        self.total_words = int(counts.sum())
        t = params.subsample_threshold
        if t > 0:
            threshold_count = t * total
            keep = (np.sqrt(counts / threshold_count) + 1.0) * (threshold_count / counts)
            self.keep_prob = np.minimum(keep, 1.0)
        else:
            self.keep_prob = np.ones(len(vocab))
        self.words_processed = 0
        self._progress_lock = threading.Lock()

    def alpha(self) -> float:
        progress = self.words_processed / max(1, self.params.epochs * self.total_words)
        return max(MIN_LEARNING_RATE,
                   self.params.initial_learning_rate * (1.0 - progress))

    def advance(self, words: int) -> None:
        with self._progress_lock:
            self.words_processed += words

    def train_sentence(self, ids: np.ndarray, rng: np.random.Generator) -> tuple[float, int]:
        """One sentence-batch update; returns (summed loss, center count)."""
        params = self.params
        self.advance(len(ids))
        keep = rng.random(len(ids)) < self.keep_prob[ids]
        ids = ids[keep]
        n = len(ids)
        if n < 2:
            return 0.0, 0
        alpha = self.alpha()
        # Per-center uniformly shrunk window, as in the original CBOW trainer.
        win = params.window - rng.integers(0, params.window, size=n)
        ctx_parts: list[np.ndarray] = []
        counts = np.empty(n, dtype=np.int64)
        for pos in range(n):
            w = int(win[pos])
            lo = pos - w
            if lo < 0:
                lo = 0
            hi = pos + w + 1
            if hi > n:
                hi = n
            counts[pos] = hi - lo - 1
            ctx_parts.append(ids[lo:pos])
            ctx_parts.append(ids[pos + 1:hi])
        ctx = np.concatenate(ctx_parts)
        offsets = np.zeros(n, dtype=np.int64)
        np.cumsum(counts[:-1], out=offsets[1:])
        empty = counts == 0  # possible only for 1-token windows at the edges
        safe_offsets = np.minimum(offsets, len(ctx) - 1)
        neu1 = np.add.reduceat(self.syn0[ctx], safe_offsets, axis=0)
        neu1[empty] = 0.0
        denom = np.maximum(counts, 1).astype(np.float32)
        neu1 /= denom[:, None]

        k = params.negative_samples
        rows = np.empty((n, k + 1), dtype=np.int64)
        rows[:, 0] = ids
        if k > 0:
            neg = self.noise_cum.searchsorted(rng.random((n, k)) * self.noise_total)
            collision = neg == ids[:, None]
            while collision.any():
                redraw = self.noise_cum.searchsorted(
                    rng.random(int(collision.sum())) * self.noise_total)
                neg[collision] = redraw
                collision = neg == ids[:, None]
            rows[:, 1:] = neg

        l2 = self.syn1[rows]  # (n, k+1, dim)
        prod = np.einsum("nd,nkd->nk", neu1, l2)
        grad = -_sigmoid(prod)
        grad[:, 0] += 1.0
        grad *= alpha
        loss = float(_neg_log_sigmoid(prod[:, 0]).sum()
                     + _neg_log_sigmoid(-prod[:, 1:]).sum())
        # hidden->output updates, then input updates from the pre-update l2
        np.add.at(self.syn1, rows.reshape(-1),
                  (grad[:, :, None] * neu1[:, None, :]).reshape(-1, params.dimension))
        neu1e = np.einsum("nk,nkd->nd", grad, l2)
        np.add.at(self.syn0, ctx, np.repeat(neu1e, counts, axis=0))
        return loss, n


def _build_vocab(sentences: list[list[str]], min_count: int) -> tuple[list[str], np.ndarray]:
    freq: dict[str, int] = {}
    for sent in sentences:
        for tok in sent:
            freq[tok] = freq.get(tok, 0) + 1
    kept = [(t, c) for t, c in freq.items() if c >= min_count]
    if len(kept) < 2:
        raise TrainingError(
            f"vocabulary has {len(kept)} token(s) after min_count={min_count} "
            f"filtering; need at least 2")
    kept.sort(key=lambda tc: (-tc[1], tc[0]))
    vocab = [t for t, _ in kept]
    counts = np.array([c for _, c in kept], dtype=np.int64)
    return vocab, counts


def train_cbow(corpus: Iterable[Sequence[str]], params: EmbeddingParams) -> VectorStore:
    """Train CBOW vectors on an iterable of token sequences.

    Returns the input-side (embedding) vectors. With ``workers=1`` the run
    is deterministic for a fixed seed; the returned store carries the mean
    per-center loss of each epoch in ``epoch_losses``.
    """
    sentences = [list(s) for s in corpus]
    vocab, counts = _build_vocab(sentences, params.min_count)
    model = _CbowModel(vocab, counts, params)
    index = model.index
    id_sentences = []
    for sent in sentences:
        ids = np.array([index[t] for t in sent if t in index], dtype=np.int64)
        if len(ids):
            id_sentences.append(ids)
    if not id_sentences:
        raise TrainingError("no in-vocabulary tokens to train on")

    losses: list[float] = []
    if params.workers == 1:
        rng = np.random.default_rng(params.seed + 1)
        for _ in range(params.epochs):
            total_loss = 0.0
            total_centers = 0
            for ids in id_sentences:
                loss, n = model.train_sentence(ids, rng)
                total_loss += loss
                total_centers += n
            losses.append(total_loss / max(1, total_centers))
    else:
        for epoch in range(params.epochs):
            chunks = [id_sentences[i::params.workers] for i in range(params.workers)]
            results = [0.0] * params.workers
            centers = [0] * params.workers
            def run(worker: int) -> None:
                rng = np.random.default_rng(params.seed + 1 + worker + epoch * params.workers)
                for ids in chunks[worker]:
                    loss, n = model.train_sentence(ids, rng)
                    results[worker] += loss
                    centers[worker] += n
            threads = [threading.Thread(target=run, args=(w,)) for w in range(params.workers)]
            for t in threads:
                t.start()
            for t in threads:
                t.join()
            losses.append(sum(results) / max(1, sum(centers)))

    store = VectorStore(vocab, model.syn0, params_fingerprint=params.fingerprint())
    store.epoch_losses = losses
    return store
