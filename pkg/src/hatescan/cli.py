"""Command-line entry points: ingest-stats, train, suggest, scan, serve.

Flags mirror RunConfig field names in kebab-case. A JSON config file can
preload any of them (flag values win); its default path comes from the
HATESCAN_CONFIG environment variable. Exit codes: 0 success, 1 internal
error, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .corpus import TokenizerConfig
from .embeddings import EmbeddingParams, load_vectors
from .errors import HatescanError
from .expansion import (
    ACCEPT,
    REJECT,
    SessionStore,
    commit,
    decide,
    open_session,
)
from .lexicon import Category, load_lexicon, save_lexicon
from .pipeline import RunConfig, compute_corpus_stats, run_scan, train_vectors

CONFIG_ENV_VAR = "HATESCAN_CONFIG"

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INPUT = 2


def _load_config_file(path: str | None) -> dict:
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR)
    if not path:
        return {}
    with open(path, encoding="utf-8") as f:
        data = json.load(f)
    if not isinstance(data, dict):
        raise HatescanError(f"{path}: config file must hold a JSON object")
    return data


def _tokenizer_from(args: argparse.Namespace, filecfg: dict) -> TokenizerConfig:
    tok = filecfg.get("tokenizer", {})
    lowercase = tok.get("lowercase", True)
    keep = tok.get("keep_punctuation_tokens", False)
    if getattr(args, "no_lowercase", False):
        lowercase = False
    if getattr(args, "keep_punctuation", False):
        keep = True
    return TokenizerConfig(lowercase=lowercase,
                           strip_punctuation=not keep,
                           keep_punctuation_tokens=keep)


def _pick(args: argparse.Namespace, filecfg: dict, name: str, default):
    value = getattr(args, name, None)
    if value is not None:
        return value
    if name in filecfg:
        return filecfg[name]
    return default


def _embedding_from(args: argparse.Namespace, filecfg: dict) -> EmbeddingParams:
    emb = dict(filecfg.get("embedding", {}))
    # "window" is spelled embedding_window on the CLI side to keep it apart
    # from the scanner's context window
    names = (("dimension", "dimension"), ("window", "embedding_window"),
             ("min_count", "min_count"), ("negative_samples", "negative_samples"),
             ("epochs", "epochs"), ("initial_learning_rate", "initial_learning_rate"),
             ("subsample_threshold", "subsample_threshold"))
    for param, attr in names:
        value = getattr(args, attr, None)
        if value is not None:
            emb[param] = value
    return EmbeddingParams(**emb)


def _run_config(args: argparse.Namespace, filecfg: dict,
                need_targets: bool = False) -> RunConfig:
    corpus = _pick(args, filecfg, "corpus", None)
    lexicon = _pick(args, filecfg, "lexicon", "")
    targets = _pick(args, filecfg, "targets", "")
    if corpus is None:
        raise HatescanError("no corpus file given (--corpus or config file)")
    if need_targets and not targets:
        raise HatescanError("no targets file given (--targets or config file)")
    return RunConfig(
        corpus_path=corpus,
        lexicon_path=lexicon,
        targets_path=targets,
        output_dir=_pick(args, filecfg, "output_dir", "hatescan-out"),
        window=int(_pick(args, filecfg, "window", 1)),
        tokenizer=_tokenizer_from(args, filecfg),
        mwes_path=_pick(args, filecfg, "mwes", None),
        vectors_path=_pick(args, filecfg, "vectors", None),
        embedding=_embedding_from(args, filecfg),
        seed=int(_pick(args, filecfg, "seed", 1)),
        workers=int(_pick(args, filecfg, "workers", 1)),
    )


def _require_file(path: str, what: str) -> None:
    if not os.path.exists(path):
        raise HatescanError(f"{what} file not found: {path}")


def cmd_ingest_stats(args: argparse.Namespace) -> int:
    filecfg = _load_config_file(args.config)
    config = _run_config(args, filecfg)
    _require_file(config.corpus_path, "corpus")
    stats = compute_corpus_stats(config)
    payload = {
        "doc_count": stats.doc_count,
        "total_tokens": stats.total_tokens,
        "per_site": {site: {"docs": sc.docs, "tokens": sc.tokens}
                     for site, sc in sorted(stats.per_site.items())},
    }
    print(json.dumps(payload, ensure_ascii=False, indent=2))
    return EXIT_OK


def cmd_train(args: argparse.Namespace) -> int:
    filecfg = _load_config_file(args.config)
    config = _run_config(args, filecfg)
    _require_file(config.corpus_path, "corpus")
    store = train_vectors(config, args.out)
    print(f"trained {len(store)} vectors of dimension {store.dimension} "
          f"-> {args.out}")
    return EXIT_OK


def cmd_scan(args: argparse.Namespace) -> int:
    filecfg = _load_config_file(args.config)
    config = _run_config(args, filecfg, need_targets=True)
    if not config.lexicon_path:
        raise HatescanError("no lexicon file given (--lexicon or config file)")
    _require_file(config.corpus_path, "corpus")
    _require_file(config.lexicon_path, "lexicon")
    _require_file(config.targets_path, "targets")
    result = run_scan(config)
    total_mentions = sum(result.counts.mentions.values())
    print(f"scanned {result.stats.doc_count} documents, "
          f"{result.stats.total_tokens} tokens, {total_mentions} mentions; "
          f"reports in {config.output_dir}")
    return EXIT_OK


def cmd_suggest(args: argparse.Namespace) -> int:
    filecfg = _load_config_file(args.config)
    lexicon_path = _pick(args, filecfg, "lexicon", "")
    vectors_path = _pick(args, filecfg, "vectors", None)
    if not lexicon_path:
        raise HatescanError("no lexicon file given (--lexicon or config file)")
    if not vectors_path:
        raise HatescanError("no vectors file given (--vectors or config file)")
    _require_file(lexicon_path, "lexicon")
    _require_file(vectors_path, "vectors")
    try:
        category = Category(args.category)
    except ValueError:
        raise HatescanError(
            f"unknown category {args.category!r}; expected one of "
            + ", ".join(c.value for c in Category))

    lexicon = load_lexicon(lexicon_path)
    store = load_vectors(vectors_path)
    state = SessionStore(_pick(args, filecfg, "state_dir", "hatescan-sessions"))
    memory = state.load_reject_memory()
    session = open_session(lexicon, category, store, k=args.k,
                           reject_memory=memory)
    for seed in session.oov_seeds:
        print(f"seed not in vocabulary: {seed}", file=sys.stderr)

    if not args.interactive:
        for s in session.queue:
            print(f"{s.term}\t{s.score:.6f}")
        return EXIT_OK

    for suggestion in list(session.queue):
        answer = ""
        while answer not in ("a", "r", "q"):
            print(f"{suggestion.term}\t{suggestion.score:.6f}"
                  f"\t(neighbor of {suggestion.source_term})")
            try:
                answer = input("[a]ccept / [r]eject / [q]uit and commit: ").strip().lower()
            except EOFError:
                answer = "q"
        if answer == "q":
            break
        decide(session, suggestion.term,
               ACCEPT if answer == "a" else REJECT, decider=args.decider)
    new_version = commit(session, lexicon, memory)
    save_lexicon(lexicon, lexicon_path)
    state.save_session(session)
    state.save_reject_memory(memory)
    accepted = len(session.accepted_terms())
    print(f"committed session {session.id}: {accepted} term(s) added, "
          f"lexicon now at version {new_version}")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import ServiceState, create_app

    filecfg = _load_config_file(args.config)
    config = _run_config(args, filecfg) if (
        _pick(args, filecfg, "corpus", None)) else None
    lexicon_path = _pick(args, filecfg, "lexicon", "")
    if not lexicon_path:
        raise HatescanError("no lexicon file given (--lexicon or config file)")
    _require_file(lexicon_path, "lexicon")

    host = args.host
    if host not in ("127.0.0.1", "localhost", "::1") and not args.allow_remote:
        raise HatescanError(
            f"refusing to bind {host} without --allow-remote "
            "(the data domain is sensitive; the default bind is loopback)")

    state = ServiceState(
        lexicon_path=lexicon_path,
        output_dir=_pick(args, filecfg, "output_dir", "hatescan-out"),
        vectors_path=_pick(args, filecfg, "vectors", None),
        state_dir=_pick(args, filecfg, "state_dir", "hatescan-sessions"),
        scan_config=config,
    )
    app = create_app(state)
    uvicorn.run(app, host=host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hatescan",
        description="Monitor targeted hate in text corpora by counting "
                    "category-lexicon terms around target-name mentions.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", default=None,
                       help=f"JSON config file (default ${CONFIG_ENV_VAR})")
        p.add_argument("--corpus", default=None, help="JSONL corpus file")
        p.add_argument("--lexicon", default=None, help="lexicon TSV file")
        p.add_argument("--mwes", default=None, help="extra MWE phrases file")
        p.add_argument("--no-lowercase", action="store_true",
                       help="keep original casing")
        p.add_argument("--keep-punctuation", action="store_true",
                       help="emit punctuation runs as tokens")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser("ingest-stats", help="tokenize a corpus and print its stats")
    add_common(p)
    p.set_defaults(func=cmd_ingest_stats)

    p = sub.add_parser("train", help="train CBOW vectors on a corpus")
    add_common(p)
    p.add_argument("--out", required=True, help="output vectors file")
    p.add_argument("--dimension", type=int, default=None)
    p.add_argument("--window", dest="embedding_window", type=int, default=None,
                   help="embedding context window")
    p.add_argument("--min-count", dest="min_count", type=int, default=None)
    p.add_argument("--negative-samples", dest="negative_samples",
                   type=int, default=None)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--initial-learning-rate", dest="initial_learning_rate",
                   type=float, default=None)
    p.add_argument("--subsample-threshold", dest="subsample_threshold",
                   type=float, default=None)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("suggest", help="propose nearest-neighbor lexicon terms")
    p.add_argument("--config", default=None)
    p.add_argument("--lexicon", default=None)
    p.add_argument("--vectors", default=None, help="vectors file")
    p.add_argument("--category", required=True)
    p.add_argument("--k", type=int, default=15, help="neighbors per seed term")
    p.add_argument("--interactive", action="store_true",
                   help="prompt accept/reject per suggestion and commit")
    p.add_argument("--decider", default="analyst",
                   help="name recorded on decisions")
    p.add_argument("--state-dir", dest="state_dir", default=None,
                   help="session and reject-memory directory")
    p.set_defaults(func=cmd_suggest)

    p = sub.add_parser("scan", help="scan a corpus and write report files")
    add_common(p)
    p.add_argument("--targets", default=None, help="targets TSV file")
    p.add_argument("--window", type=int, default=None,
                   help="context tokens on each side of a mention")
    p.add_argument("--output-dir", dest="output_dir", default=None)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("serve", help="serve reports and curation over HTTP")
    add_common(p)
    p.add_argument("--targets", default=None)
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--output-dir", dest="output_dir", default=None)
    p.add_argument("--vectors", default=None)
    p.add_argument("--state-dir", dest="state_dir", default=None)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--allow-remote", action="store_true",
                   help="permit binding a non-loopback address")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (HatescanError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except KeyboardInterrupt:
        return EXIT_INTERNAL
    except Exception as exc:  # anything else is a bug, not an input problem
        print(f"internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
