import numpy as np
import pytest

from hatescan.corpus import CorpusStats, TokenizedDocument
from hatescan.errors import ConsistencyError, FormatError
from hatescan.lexicon import CATEGORIES, Category, Lexicon, Matcher
from hatescan.scanner import (
    CountsTable,
    Target,
    TargetIndex,
    aggregate,
    category_corpus_counts,
    find_mentions,
    load_targets_file,
    scan_document,
)

import synth
from oracle import oracle_scan


def tdoc(doc_id, tokens):
    return TokenizedDocument(id=doc_id, tokens=list(tokens),
                             char_spans=[(i, i + 1) for i in range(len(tokens))])


@pytest.fixture
def lofven():
    return Target(id="lofven", full_name=("stefan", "löfven"),
                  display_name="Stefan Löfven")


@pytest.fixture
def synth_lexicon():
    return synth.make_lexicon()


class TestFindMentions:
    def test_single_match(self, lofven):
        mentions = find_mentions(["igår", "sa", "stefan", "löfven", "att"], [lofven])
        assert len(mentions) == 1
        assert (mentions[0].start, mentions[0].end) == (2, 4)
        assert mentions[0].target_id == "lofven"

    def test_repeated_match(self, lofven):
        tokens = ["stefan", "löfven", "och", "stefan", "löfven"]
        assert len(find_mentions(tokens, [lofven])) == 2

    def test_misspelling_no_match(self, lofven):
        assert find_mentions(["stefan", "lofven"], [lofven]) == []

    def test_longer_name_wins_overlap(self):
        short = Target(id="short", full_name=("anna", "lind"), display_name="x")
        long = Target(id="long", full_name=("anna", "lind", "berg"), display_name="y")
        mentions = find_mentions(["anna", "lind", "berg"], [short, long])
        assert [m.target_id for m in mentions] == ["long"]

    def test_alias_matching(self):
        t = Target(id="t", full_name=("stefan", "löfven"), display_name="SL",
                   aliases=(("löfven",),))
        mentions = find_mentions(["bara", "löfven", "här"], [t])
        assert len(mentions) == 1

    def test_non_overlapping_left_to_right(self, lofven):
        # after a match the scan continues past its end
        tokens = ["stefan", "löfven", "stefan", "stefan", "löfven"]
        mentions = find_mentions(tokens, [lofven])
        assert [(m.start, m.end) for m in mentions] == [(0, 2), (3, 5)]


class TestScanDocument:
    def test_adjacent_term_hits(self, lofven, synth_lexicon):
        synth_lexicon.entries[Category.ANGER].add("idiot")
        matcher = Matcher(synth_lexicon)
        doc = tdoc("d1", ["idiot", "stefan", "löfven", "talar"])
        hits = scan_document(doc, matcher, [lofven], window=1)
        assert len(hits) == 1
        assert hits[0].hits == {Category.ANGER: [(0, "idiot")]}

    def test_unmerged_phrase_outside_window(self, lofven, seed_lexicon):
        # "är galen" unmerged: adjacent token "är" alone is not a term
        matcher = Matcher(seed_lexicon)
        doc = tdoc("d1", ["jag", "tror", "inte", "stefan", "löfven", "är", "galen"])
        hits = scan_document(doc, matcher, [lofven], window=1)
        assert hits[0].hits == {}

    def test_merged_phrase_hits_in_window(self, lofven, seed_lexicon):
        matcher = Matcher(seed_lexicon)
        doc = tdoc("d1", ["jag", "tror", "inte", "stefan", "löfven", "är_galen"])
        hits = scan_document(doc, matcher, [lofven], window=3)
        assert hits[0].hits == {Category.ANGER: [(5, "är_galen")]}

    def test_window_zero_no_hits(self, lofven, synth_lexicon):
        matcher = Matcher(synth_lexicon)
        doc = tdoc("d1", ["zan1", "stefan", "löfven", "zan2"])
        hits = scan_document(doc, matcher, [lofven], window=0)
        assert hits[0].hits == {}

    def test_window_clipped_at_document_edges(self, lofven, synth_lexicon):
        matcher = Matcher(synth_lexicon)
        doc = tdoc("d1", ["stefan", "löfven"])
        assert scan_document(doc, matcher, [lofven], window=5)[0].hits == {}

    def test_name_tokens_not_inspected(self, synth_lexicon):
        synth_lexicon.entries[Category.ANGER].add("stefan")
        matcher = Matcher(synth_lexicon)
        t = Target(id="t", full_name=("stefan", "löfven"), display_name="x")
        doc = tdoc("d1", ["w001", "stefan", "löfven", "w002"])
        assert scan_document(doc, matcher, [t], window=1)[0].hits == {}

    def test_multi_category_token_hits_both(self, lofven, synth_lexicon):
        matcher = Matcher(synth_lexicon)
        doc = tdoc("d1", ["zshared", "stefan", "löfven"])
        hits = scan_document(doc, matcher, [lofven], window=1)[0].hits
        assert set(hits) == {Category.ANGER, Category.NAUGHTINESS}

    def test_kwic_radius_and_offset(self, lofven, synth_lexicon):
        matcher = Matcher(synth_lexicon)
        tokens = [f"w{i:03d}" for i in range(30)]
        tokens[14:14] = ["stefan", "löfven"]
        mh = scan_document(tdoc("d1", tokens), matcher, [lofven], window=1)[0]
        assert mh.kwic_start == 4
        assert len(mh.kwic_tokens) == 10 + 2 + 10
        assert mh.kwic_tokens[10:12] == ["stefan", "löfven"]

    def test_every_mention_reported_even_without_hits(self, lofven, synth_lexicon):
        matcher = Matcher(synth_lexicon)
        doc = tdoc("d1", ["w001", "stefan", "löfven", "w002"])
        hits = scan_document(doc, matcher, [lofven], window=1)
        assert len(hits) == 1
        assert hits[0].hits == {}


class TestCategoryCorpusCounts:
    def test_counts_all_occurrences(self, synth_lexicon):
        matcher = Matcher(synth_lexicon)
        docs = [["zan1", "w001", "zan1"], ["zan2", "w002"]]
        counts = category_corpus_counts(docs, matcher)
        assert counts[Category.ANGER] == 3

    def test_empty_lexicon_all_zero(self):
        matcher = Matcher(Lexicon())
        counts = category_corpus_counts([["a", "b"]], matcher)
        assert all(v == 0 for v in counts.values())

    def test_shared_token_counts_both_categories(self, synth_lexicon):
        matcher = Matcher(synth_lexicon)
        counts = category_corpus_counts([["zshared"]], matcher)
        assert counts[Category.ANGER] == 1
        assert counts[Category.NAUGHTINESS] == 1

    def test_against_oracle_on_random_corpus(self, synth_lexicon):
        docs = synth.random_corpus(seed=11, n_docs=50)
        matcher = Matcher(synth_lexicon)
        got = category_corpus_counts([tokens for _, tokens in docs], matcher)
        from oracle import oracle_category_counts
        assert got == oracle_category_counts(
            [tokens for _, tokens in docs], synth_lexicon.entries)


class TestAggregate:
    def run_scan(self, docs, lexicon, targets, window):
        matcher = Matcher(lexicon)
        index = TargetIndex(targets)
        stats = CorpusStats()
        hit_lists = []
        for doc_id, tokens in docs:
            stats.add_document("s", len(tokens))
            hit_lists.append(scan_document(tdoc(doc_id, tokens), matcher,
                                           index, window))
        cat_counts = category_corpus_counts([t for _, t in docs], matcher)
        return aggregate(hit_lists, stats, matcher,
                         category_counts=cat_counts, targets=index,
                         window=window)

    def test_binary_per_mention(self, lofven, synth_lexicon):
        docs = [("d1", ["zan1", "stefan", "löfven", "zan2"])]
        counts = self.run_scan(docs, synth_lexicon, [lofven], 1)
        assert counts.mentions["lofven"] == 1
        assert counts.co_counts["lofven"][Category.ANGER] == 1  # not 2

    def test_zero_mention_target_present(self, lofven, synth_lexicon):
        other = Target(id="zzz", full_name=("okänd", "person"), display_name="x")
        docs = [("d1", ["stefan", "löfven"])]
        counts = self.run_scan(docs, synth_lexicon, [lofven, other], 1)
        assert counts.mentions["zzz"] == 0
        assert all(v == 0 for v in counts.co_counts["zzz"].values())

    def test_planted_counts_recovered(self, synth_lexicon):
        rng = np.random.default_rng(5)
        targets = synth.make_targets()
        plan = {
            "lofven": (50, {Category.SWEARWORD: 7, Category.ANGER: 3}),
            "johansson": (20, {Category.DEATH_THREAT: 4}),
            "linde": (5, {}),
        }
        docs, expected = synth.planted_corpus(rng, targets, plan)
        counts = self.run_scan(docs, synth_lexicon, targets, 1)
        assert counts.mentions == expected["mentions"]
        for tid, per_cat in expected["co"].items():
            assert counts.co_counts[tid] == per_cat

    def test_mixed_versions_rejected(self, lofven, synth_lexicon):
        matcher_v1 = Matcher(synth_lexicon)
        doc = tdoc("d1", ["stefan", "löfven"])
        hits_v1 = scan_document(doc, matcher_v1, [lofven], 1)
        synth_lexicon.add_terms(Category.ANGER, ["nyare"])
        matcher_v2 = Matcher(synth_lexicon)
        with pytest.raises(ConsistencyError):
            aggregate([hits_v1], CorpusStats(), matcher_v2,
                      category_counts={}, targets=[lofven])

    def test_mixed_windows_rejected(self, lofven, synth_lexicon):
        matcher = Matcher(synth_lexicon)
        doc = tdoc("d1", ["stefan", "löfven"])
        h1 = scan_document(doc, matcher, [lofven], 1)
        h2 = scan_document(doc, matcher, [lofven], 2)
        with pytest.raises(ConsistencyError):
            aggregate([h1, h2], CorpusStats(), matcher,
                      category_counts={}, targets=[lofven])

    def test_counts_invariants(self, synth_lexicon):
        docs = synth.random_corpus(seed=3, n_docs=80)
        targets = synth.make_targets()
        counts = self.run_scan(docs, synth_lexicon, targets, 2)
        for tid in counts.mentions:
            for cat in CATEGORIES:
                assert counts.co_counts[tid][cat] <= counts.mentions[tid]


class TestOracleEquivalence:
    @pytest.mark.parametrize("window", [0, 1, 2, 5])
    def test_matches_oracle(self, synth_lexicon, window):
        docs = synth.random_corpus(seed=100 + window, n_docs=120)
        targets = synth.make_targets()
        matcher = Matcher(synth_lexicon)
        index = TargetIndex(targets)
        stats = CorpusStats()
        hit_lists = []
        for doc_id, tokens in docs:
            stats.add_document("s", len(tokens))
            hit_lists.append(scan_document(tdoc(doc_id, tokens), matcher, index, window))
        cat_counts = category_corpus_counts([t for _, t in docs], matcher)
        counts = aggregate(hit_lists, stats, matcher,
                           category_counts=cat_counts, targets=index, window=window)

        o_mentions, o_co, o_cats, o_total, o_hits = oracle_scan(
            docs, synth_lexicon.entries, targets, window)
        assert counts.mentions == o_mentions
        assert counts.co_counts == o_co
        assert counts.category_counts == o_cats
        assert counts.total_tokens == o_total
        # per-hit term lists agree too
        flat = [mh for hl in hit_lists for mh in hl]
        assert len(flat) == len(o_hits)
        for mh, (doc_id, tid, start, end, per_cat) in zip(flat, o_hits):
            assert (mh.mention.doc_id, mh.mention.target_id,
                    mh.mention.start, mh.mention.end) == (doc_id, tid, start, end)
            assert {c: v for c, v in mh.hits.items()} == per_cat


class TestWindowMonotonicity:
    def test_hits_grow_with_window(self, synth_lexicon):
        docs = synth.random_corpus(seed=9, n_docs=60)
        targets = synth.make_targets()
        matcher = Matcher(synth_lexicon)
        index = TargetIndex(targets)

        def co_at(window):
            agg = TestAggregate()
            return agg.run_scan(docs, synth_lexicon, targets, window).co_counts

        co1, co2 = co_at(1), co_at(3)
        for tid in co1:
            for cat in CATEGORIES:
                assert co1[tid][cat] <= co2[tid][cat]


class TestShardMerge:
    def test_split_scan_equals_whole(self, synth_lexicon):
        docs = synth.random_corpus(seed=21, n_docs=60)
        targets = synth.make_targets()
        agg = TestAggregate()
        whole = agg.run_scan(docs, synth_lexicon, targets, 1)
        left = agg.run_scan(docs[:30], synth_lexicon, targets, 1)
        right = agg.run_scan(docs[30:], synth_lexicon, targets, 1)
        merged = left.merge(right)
        assert merged.mentions == whole.mentions
        assert merged.co_counts == whole.co_counts
        assert merged.category_counts == whole.category_counts
        assert merged.total_tokens == whole.total_tokens

    def test_merge_rejects_version_mismatch(self):
        a = CountsTable(lexicon_version=1)
        b = CountsTable(lexicon_version=2)
        with pytest.raises(ConsistencyError):
            a.merge(b)


class TestTargetsFile:
    def test_load_with_aliases(self, tmp_path):
        path = tmp_path / "targets.tsv"
        path.write_text(
            "lofven\tStefan Löfven\tStefan Löfven\tlöfven;svetsarn\n"
            "linde\tAnn Linde\tAnn Linde\n",
            encoding="utf-8")
        targets = load_targets_file(str(path))
        assert targets[0].full_name == ("stefan", "löfven")
        assert targets[0].aliases == (("löfven",), ("svetsarn",))
        assert targets[1].aliases == ()

    def test_duplicate_id_rejected(self, tmp_path):
        path = tmp_path / "targets.tsv"
        path.write_text("a\tX Y\tX\na\tZ W\tZ\n", encoding="utf-8")
        with pytest.raises(FormatError):
            load_targets_file(str(path))

    def test_too_few_fields_rejected(self, tmp_path):
        path = tmp_path / "targets.tsv"
        path.write_text("a\tX Y\n", encoding="utf-8")
        with pytest.raises(FormatError):
            load_targets_file(str(path))
