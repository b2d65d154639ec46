"""hatescan: monitor targeted hate in text corpora.

Counts category-lexicon terms in a narrow token window around target-name
mentions, computes per-target statistics (proportions and deviation from
expected counts), and supports human-in-the-loop lexicon expansion via
embedding nearest neighbors.
"""

from .corpus import (
    Corpus,
    CorpusStats,
    MweTrie,
    RawDocument,
    TokenizedDocument,
    TokenizerConfig,
    corpus_stats,
    ingest_jsonl,
    merge_mwes,
    tokenize,
    tokenize_document,
)
from .embeddings import (
    EmbeddingParams,
    VectorStore,
    cosine,
    load_vectors,
    nearest_neighbors,
    save_vectors,
    train_cbow,
)
from .errors import (
    ConsistencyError,
    DuplicateDecisionError,
    FormatError,
    HatescanError,
    InvalidInputError,
    NotInQueueError,
    OovError,
    SessionStateError,
    StaleSessionError,
    TrainingError,
)
from .expansion import (
    RejectMemory,
    Session,
    SessionStore,
    Suggestion,
    commit,
    decide,
    next_suggestions,
    open_session,
    replay_ledger,
)
from .lexicon import (
    CATEGORIES,
    Category,
    Lexicon,
    Matcher,
    load_lexicon,
    load_seed_lexicon,
    match_token,
    save_lexicon,
)
from .pipeline import RunConfig, run_scan, train_vectors
from .scanner import (
    CountsTable,
    Mention,
    MentionHit,
    Target,
    TargetIndex,
    aggregate,
    category_corpus_counts,
    find_mentions,
    load_targets_file,
    scan_document,
)
from .stats import (
    CategoryStats,
    Report,
    ReportConfig,
    TargetReport,
    build_report,
    deviation,
    expected_count,
    normalized_frequency,
    proportion,
    report_to_json,
)

__version__ = "0.1.0"
