import io
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hatescan.corpus import CorpusStats, TokenizerConfig
from hatescan.errors import ConsistencyError, InvalidInputError
from hatescan.lexicon import CATEGORIES, Category
from hatescan.scanner import CountsTable
from hatescan.stats import (
    Report,
    ReportConfig,
    build_report,
    deviation,
    expected_count,
    normalized_frequency,
    proportion,
    report_to_dict,
    report_to_json,
    write_figure_counts_csv,
    write_figure_proportions_csv,
    write_report_csv,
)


class TestNormalizedFrequency:
    def test_basic(self):
        assert normalized_frequency(5, 1000) == 0.005

    def test_zero_count(self):
        assert normalized_frequency(0, 12345) == 0.0

    def test_swearword_row_consistency(self):
        # the published rounded frequency is consistent with the published
        # total word count for a plausible raw count
        assert round(normalized_frequency(140_833, 102_797_970), 5) == 0.00137

    def test_zero_total_rejected(self):
        with pytest.raises(InvalidInputError):
            normalized_frequency(1, 0)

    def test_count_exceeding_total_rejected(self):
        with pytest.raises(InvalidInputError):
            normalized_frequency(11, 10)

    @given(st.integers(0, 10**8), st.integers(1, 10**9))
    def test_frequency_times_total_recovers_count(self, count, total):
        if count > total:
            count, total = total, count or 1
        freq = normalized_frequency(count, total)
        assert 0.0 <= freq <= 1.0
        assert abs(freq * total - count) <= 1e-9 * max(1, count)


class TestProportion:
    def test_damberg_case(self):
        # 2 hits out of 169 mentions is 1.18%
        assert proportion(2, 169) == pytest.approx(0.0118, abs=5e-5)

    def test_linde_case(self):
        assert proportion(1, 128) == pytest.approx(0.0078, abs=5e-5)

    def test_zero_hits(self):
        assert proportion(0, 50) == 0.0

    def test_zero_mentions_is_null(self):
        assert proportion(0, 0) is None

    def test_hits_exceeding_mentions_rejected(self):
        with pytest.raises(InvalidInputError):
            proportion(3, 2)


class TestExpectedCount:
    @pytest.mark.parametrize("freq,mentions,rounded", [
        (0.00137, 3142, 4),
        (0.00106, 3142, 3),
        (0.00076, 3142, 2),
        (0.00068, 3142, 2),
    ])
    def test_rounded_expectations(self, freq, mentions, rounded):
        assert round(expected_count(freq, mentions)) == rounded

    def test_zero_mentions(self):
        assert expected_count(0.5, 0) == 0.0

    def test_full_precision(self):
        assert expected_count(0.00137, 3142) == 0.00137 * 3142


class TestDeviation:
    def test_swearword_row(self):
        assert deviation(3, 4.16) == pytest.approx(-1.16, abs=0.005)

    def test_fixed_point(self):
        assert deviation(4, 4.0) == 0.0

    def test_from_rounded_table_inputs(self):
        # with the published *rounded* frequency the value differs from the
        # published deviation (-1.16), because that one used the unrounded
        # internal frequency
        value = deviation(3, expected_count(0.00137, 3142))
        assert value == pytest.approx(-1.3045, abs=5e-4)

    @given(st.integers(0, 10_000), st.floats(0, 1), st.integers(0, 100_000))
    def test_identity(self, actual, freq, mentions):
        assert deviation(actual, expected_count(freq, mentions)) == \
            pytest.approx(actual - freq * mentions, abs=1e-12)


def make_counts(mentions, co, cat_counts, total, version=1, window=1):
    co_full = {}
    for tid in mentions:
        co_full[tid] = {c: 0 for c in CATEGORIES}
        co_full[tid].update(co.get(tid, {}))
    cats = {c: 0 for c in CATEGORIES}
    cats.update(cat_counts)
    return CountsTable(mentions=dict(mentions), co_counts=co_full,
                       category_counts=cats, total_tokens=total,
                       lexicon_version=version, window=window)


def make_stats(total, docs=10):
    stats = CorpusStats()
    stats.total_tokens = total
    stats.doc_count = docs
    return stats


class TestBuildReport:
    def test_hand_computed_example(self):
        counts = make_counts({"t1": 10}, {"t1": {Category.ANGER: 2}},
                             {Category.ANGER: 100}, 10_000)
        report = build_report(counts, make_stats(10_000),
                              ReportConfig(window=1, lexicon_version=1,
                                           target_ids=("t1",)))
        cell = report.targets[0].cells[Category.ANGER]
        assert cell.proportion == 0.2
        assert cell.expected == pytest.approx(0.1)
        assert cell.deviation == pytest.approx(1.9)

    def test_all_zero_counts(self):
        counts = make_counts({"t1": 0}, {}, {}, 0)
        report = build_report(counts, make_stats(0),
                              ReportConfig(window=1, lexicon_version=1))
        cell = report.targets[0].cells[Category.ANGER]
        assert cell.actual == 0
        assert cell.proportion is None
        assert cell.expected == 0.0
        assert cell.deviation == 0.0
        assert report.categories[0].relative_frequency == 0.0

    def test_tie_broken_by_target_id(self):
        counts = make_counts({"b": 5, "a": 5, "c": 9}, {}, {}, 100)
        report = build_report(counts, make_stats(100),
                              ReportConfig(window=1, lexicon_version=1))
        assert [t.target_id for t in report.targets] == ["c", "a", "b"]

    def test_version_mismatch_rejected(self):
        counts = make_counts({"t": 1}, {}, {}, 10, version=3)
        with pytest.raises(ConsistencyError):
            build_report(counts, make_stats(10),
                         ReportConfig(window=1, lexicon_version=4))

    def test_pure_function(self):
        counts = make_counts({"t1": 7}, {"t1": {Category.SEXISM: 1}},
                             {Category.SEXISM: 3}, 500)
        cfg = ReportConfig(window=1, lexicon_version=1, target_ids=("t1",))
        r1 = build_report(counts, make_stats(500), cfg)
        r2 = build_report(counts, make_stats(500), cfg)
        assert report_to_json(r1) == report_to_json(r2)

    def test_scale_property(self):
        mentions = {"t1": 12, "t2": 3}
        co = {"t1": {Category.ANGER: 4}, "t2": {Category.SWEARWORD: 1}}
        cats = {Category.ANGER: 40, Category.SWEARWORD: 11}
        single = build_report(make_counts(mentions, co, cats, 2000),
                              make_stats(2000),
                              ReportConfig(window=1, lexicon_version=1))
        doubled = build_report(
            make_counts({t: 2 * m for t, m in mentions.items()},
                        {t: {c: 2 * v for c, v in d.items()} for t, d in co.items()},
                        {c: 2 * v for c, v in cats.items()}, 4000),
            make_stats(4000),
            ReportConfig(window=1, lexicon_version=1))
        for t1, t2 in zip(single.targets, doubled.targets):
            for cat in CATEGORIES:
                c1, c2 = t1.cells[cat], t2.cells[cat]
                assert c2.deviation == 2 * c1.deviation  # exact: scaling by 2
                assert c2.proportion == c1.proportion
        for s1, s2 in zip(single.categories, doubled.categories):
            assert s1.relative_frequency == s2.relative_frequency

    def test_sign_property(self):
        counts = make_counts(
            {"t": 100},
            {"t": {Category.ANGER: 9, Category.SEXISM: 0}},
            {Category.ANGER: 10, Category.SEXISM: 50}, 1000)
        report = build_report(counts, make_stats(1000),
                              ReportConfig(window=1, lexicon_version=1))
        cells = report.targets[0].cells
        # anger: 9 actual vs 1.0 expected; sexism: 0 actual vs 5.0 expected
        assert cells[Category.ANGER].deviation > 0
        assert cells[Category.SEXISM].deviation < 0
        # zero actual can never deviate positively
        for cat in CATEGORIES:
            if cells[cat].actual == 0:
                assert cells[cat].deviation <= 0


class TestSerialization:
    def fixture_report(self) -> Report:
        counts = make_counts({"t1": 10, "t2": 0},
                             {"t1": {Category.ANGER: 2}},
                             {Category.ANGER: 100}, 10_000)
        return build_report(counts, make_stats(10_000),
                            ReportConfig(window=1, lexicon_version=1,
                                         tokenizer=TokenizerConfig(),
                                         target_ids=("t1", "t2")),
                            display_names={"t1": "Target One", "t2": "Target Two"})

    def test_json_shape(self):
        data = report_to_dict(self.fixture_report())
        assert list(data) == ["config", "corpus", "categories", "targets"]
        assert data["config"]["fingerprint"].startswith("sha256:")
        assert len(data["categories"]) == 6
        t1 = data["targets"][0]
        assert t1["target_id"] == "t1"
        assert t1["categories"]["anger"]["proportion"] == 0.2
        t2 = data["targets"][1]
        assert t2["categories"]["anger"]["proportion"] is None

    def test_json_deterministic(self):
        assert report_to_json(self.fixture_report()) == \
            report_to_json(self.fixture_report())

    def test_json_parses(self):
        parsed = json.loads(report_to_json(self.fixture_report()))
        assert parsed["corpus"]["total_tokens"] == 10_000

    def test_csv_rounding(self):
        out = io.StringIO()
        write_report_csv(self.fixture_report(), out)
        lines = out.getvalue().splitlines()
        header = lines[0].split(",")
        assert header[:3] == ["target", "display_name", "mentions"]
        assert "anger_actual" in header and "anger_deviation" in header
        row = lines[1].split(",")
        # t1 anger: actual 2, proportion 0.2, expected 0.1, deviation 1.9
        i = header.index("anger_actual")
        assert row[i:i + 4] == ["2", "0.2000", "0.10", "1.90"]

    def test_null_proportion_blank_in_csv(self):
        out = io.StringIO()
        write_figure_proportions_csv(self.fixture_report(), out)
        lines = out.getvalue().splitlines()
        assert lines[2].split(",")[2] == ""  # zero-mention target, anger column

    def test_figure_counts_panel(self):
        out = io.StringIO()
        write_figure_counts_csv(self.fixture_report(), out)
        lines = out.getvalue().splitlines()
        assert lines[0].split(",") == \
            ["target", "display_name"] + [c.value for c in CATEGORIES]
        assert lines[1].split(",")[2] == "0"  # t1 swearword count


class TestFingerprint:
    def test_changes_with_inputs(self):
        base = ReportConfig(window=1, lexicon_version=1, target_ids=("a",))
        assert base.fingerprint() != \
            ReportConfig(window=2, lexicon_version=1, target_ids=("a",)).fingerprint()
        assert base.fingerprint() != \
            ReportConfig(window=1, lexicon_version=2, target_ids=("a",)).fingerprint()
        assert base.fingerprint() != \
            ReportConfig(window=1, lexicon_version=1, target_ids=("b",)).fingerprint()

    def test_stable_for_equal_inputs(self):
        a = ReportConfig(window=1, lexicon_version=1, target_ids=("a", "b"))
        b = ReportConfig(window=1, lexicon_version=1, target_ids=("a", "b"))
        assert a.fingerprint() == b.fingerprint()
