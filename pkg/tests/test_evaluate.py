"""Evaluator tests with a brute-force set-membership oracle for small corpora."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from litharvest.classify import Label
from litharvest.evaluate import (
    EvaluationReport,
    HumanRelevantList,
    MalformedHumanList,
    evaluate,
    format_overlap,
    format_report_row,
    human_entry,
    load_human_csv,
    match_entry,
)
from litharvest.records import Source, make_record

# ------------------------------------------------------------------- oracle


def oracle_counts(human, records, labels):
    """Nested-loop matching: DOI pass, then title pass. Independent of the
    index-based implementation."""
    matched = 0
    matched_relevant = 0
    for entry in human.entries:
        found = None
        if entry.doi:
            for i, record in enumerate(records):
                if record.doi == entry.doi:
                    found = i
                    break
        if found is None and entry.normalized_title:
            for i, record in enumerate(records):
                if record.normalized_title == entry.normalized_title:
                    found = i
                    break
        if found is None:
            continue
        matched += 1
        if labels[found] is Label.RELEVANT:
            matched_relevant += 1
    return matched, matched_relevant


def corpus_record(i, *, doi=None, title=None, source=Source.SCOPUS):
    return make_record(
        source,
        title or f"harvested article number {i}",
        doi=doi,
        abstract="Field experiments measured the yield response to applied nitrogen.",
    )


def synth(h, ht, hm, extra_records=3):
    """Corpus + curated list realizing the cardinalities (|H|, |H∩T|, |H∩M|)."""
    records = [corpus_record(i, doi=f"10.9/m{i}") for i in range(ht)]
    records += [corpus_record(1000 + i, doi=f"10.9/x{i}") for i in range(extra_records)]
    labels = [Label.RELEVANT if i < hm else Label.IRRELEVANT for i in range(ht)]
    labels += [Label.IRRELEVANT] * extra_records
    entries = [human_entry(doi=f"10.9/m{i}") for i in range(ht)]
    entries += [human_entry(title=f"never harvested title {i}") for i in range(h - ht)]
    human = HumanRelevantList(label="synthetic", entries=tuple(entries))
    return human, records, labels


# -------------------------------------------------------------- match_entry


def test_doi_match_beats_title_difference():
    record = corpus_record(1, doi="10.1/abc", title="Completely different wording")
    entry = human_entry(doi="10.1/ABC", title="The curated title")
    assert match_entry(entry, [record]) is record


def test_title_match_when_no_doi():
    record = corpus_record(1, title="Yield Response of Millet")
    entry = human_entry(title="yield response of millet")
    assert match_entry(entry, [record]) is record


def test_unmatched_doi_falls_back_to_title():
    record = corpus_record(1, doi="10.1/other", title="Shared title")
    entry = human_entry(doi="10.1/missing", title="shared TITLE")
    assert match_entry(entry, [record]) is record


def test_nitrogen_symbol_variant_does_not_match():
    record = corpus_record(
        1,
        doi="10.1/wheat",
        title="determination of a critical nitrogen dilution curve for winter wheat crops",
    )
    entry = human_entry(
        title="determination of a critical N dilution curve for winter wheat crops"
    )
    assert match_entry(entry, [record]) is None


def test_no_match_returns_none():
    assert match_entry(human_entry(title="nothing here"), []) is None


# ----------------------------------------------------------------- evaluate


def test_published_cardinalities_render_exactly():
    cases = [
        (41, 36, 33, "91.67"),
        (41, 36, 36, "100.00"),
        (21, 13, 12, "92.31"),
        (83, 46, 43, "93.48"),
        (83, 46, 39, "84.78"),
        (34, 14, 13, "92.86"),
        (34, 14, 14, "100.00"),
    ]
    for h, ht, hm, expected in cases:
        report = evaluate(*synth(h, ht, hm))
        assert report.overlap_display == expected, (h, ht, hm)
        assert report.intersection_ht == ht
        assert report.intersection_hm == hm
        assert report.missed == h - ht


def test_identical_toy_sets_give_100():
    records = [corpus_record(i, doi=f"10.2/t{i}") for i in range(5)]
    labels = [Label.RELEVANT] * 5
    human = HumanRelevantList(
        "toy", tuple(human_entry(doi=f"10.2/t{i}") for i in range(5))
    )
    report = evaluate(human, records, labels)
    assert report.overlap == Fraction(100)
    assert report.overlap_display == "100.00"
    assert report.missed == 0


def test_zero_matches_overlap_undefined():
    human = HumanRelevantList("none", (human_entry(title="not in corpus"),))
    report = evaluate(human, [corpus_record(1, doi="10.1/a")], [Label.RELEVANT])
    assert report.overlap is None
    assert report.overlap_display == ""
    assert "undefined" in report.overlap_note


def test_unknown_labels_do_not_count_as_relevant():
    human = HumanRelevantList("u", (human_entry(doi="10.1/a"),))
    record = corpus_record(1, doi="10.1/a")
    report = evaluate(human, [record], [Label.UNKNOWN])
    assert report.intersection_hm == 0
    assert report.overlap == Fraction(0)
    assert report.overlap_display == "0.00"


def test_labels_must_cover_records():
    human = HumanRelevantList("u", (human_entry(doi="10.1/a"),))
    with pytest.raises(ValueError):
        evaluate(human, [corpus_record(1, doi="10.1/a")], [])


def test_evaluate_accepts_classification_results():
    from litharvest.classify import ClassificationResult

    record = corpus_record(1, doi="10.1/a")
    result = ClassificationResult(
        record=record,
        label=Label.RELEVANT,
        raw_output="Relevant",
        model_id="m",
        prompt_digest="d",
        attempts=1,
    )
    human = HumanRelevantList("u", (human_entry(doi="10.1/a"),))
    report = evaluate(human, [record], [result])
    assert report.overlap_display == "100.00"


def test_monotonicity_adding_relevant_label():
    human, records, labels = synth(20, 12, 5)
    base = evaluate(human, records, labels)
    for flip in range(5, 12):
        flipped = list(labels)
        flipped[flip] = Label.RELEVANT
        improved = evaluate(human, records, flipped)
        assert improved.overlap >= base.overlap


def test_bounds_property_random_corpora():
    rng = random.Random(9)
    for _ in range(50):
        h = rng.randint(1, 20)
        ht = rng.randint(0, h)
        hm = rng.randint(0, ht)
        report = evaluate(*synth(h, ht, hm))
        if report.overlap is not None:
            assert Fraction(0) <= report.overlap <= Fraction(100)
        assert report.intersection_hm <= report.intersection_ht <= report.human_relevant


def test_brute_force_equivalence_small_corpora():
    rng = random.Random(31)
    titles = [f"shared topic {i}" for i in range(8)]
    for _ in range(120):
        n = rng.randint(0, 20)
        records = []
        for i in range(n):
            records.append(
                corpus_record(
                    i,
                    doi=f"10.4/{rng.randint(0, 12)}" if rng.random() < 0.7 else None,
                    title=rng.choice(titles) if rng.random() < 0.3 else None,
                )
            )
        labels = [
            rng.choice([Label.RELEVANT, Label.IRRELEVANT, Label.UNKNOWN])
            for _ in records
        ]
        entries = []
        for _ in range(rng.randint(1, 15)):
            if rng.random() < 0.5:
                entries.append(human_entry(doi=f"10.4/{rng.randint(0, 12)}"))
            else:
                entries.append(human_entry(title=rng.choice(titles)))
        human = HumanRelevantList("fuzz", tuple(entries))
        report = evaluate(human, records, labels)
        matched, matched_relevant = oracle_counts(human, records, labels)
        assert report.intersection_ht == matched
        assert report.intersection_hm == matched_relevant


# ------------------------------------------------------------ CSV + display


def test_load_human_csv():
    content = "doi,title\n10.1/A,First title\n,Second title only\n10.1/c,\n"
    human = load_human_csv(content, label="demo")
    assert human.label == "demo"
    assert human.entries[0].doi == "10.1/a"
    assert human.entries[1].doi is None
    assert human.entries[1].normalized_title == "second title only"
    assert human.entries[2].title == ""


@pytest.mark.parametrize(
    "content",
    [
        "",
        "doi\n10.1/a\n",
        "title,year\nt,2020\n",
        "doi,title\n",
        "doi,title\n,\n",
    ],
)
def test_load_human_csv_rejects_malformed(content):
    with pytest.raises(MalformedHumanList):
        load_human_csv(content, label="bad")


def test_format_overlap_half_up():
    assert format_overlap(Fraction(100 * 33, 36)) == "91.67"
    assert format_overlap(Fraction(100 * 1, 8)) == "12.50"
    assert format_overlap(Fraction(100 * 1, 3)) == "33.33"
    # Exact half rounds up.
    assert format_overlap(Fraction(12345, 1000)) == "12.35"
    assert format_overlap(None) == ""


def test_report_row_rendering():
    report = evaluate(*synth(41, 36, 33))
    row = format_report_row(report)
    assert "91.67" in row
    assert "HumanRelevant" in row


def test_report_invariants_assert():
    with pytest.raises(AssertionError):
        EvaluationReport(
            label="x",
            human_relevant=5,
            tool_retrieved=10,
            intersection_ht=6,
            missed=-1,
            model_relevant=3,
            intersection_hm=2,
            overlap=None,
        )
