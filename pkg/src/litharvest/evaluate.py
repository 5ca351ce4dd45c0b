"""Screening-quality evaluation against an expert-curated relevant list.

Each curated entry is matched into the harvested corpus by normalized DOI
first, then by exact normalized title. The headline metric is overlap
accuracy: the percentage of matched entries whose matched record the model
labeled relevant,

    overlap = 100 * |curated ∩ model-relevant| / |curated ∩ tool-retrieved|

stored as an exact rational and rendered to two decimals, half-up. Title
matching is exact after normalization, so e.g. a title writing out
"nitrogen" never matches its variant using the symbol "N".
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from typing import Sequence

from .classify import ClassificationResult, Label
from .records import ArticleRecord, normalize_doi, normalize_title


class MalformedHumanList(ValueError):
    pass


@dataclass(frozen=True)
class HumanEntry:
    doi: str | None
    title: str
    normalized_title: str

    def __post_init__(self):
        if not self.doi and not self.title:
            raise ValueError("entry needs a DOI or a title")


def human_entry(doi: str | None = None, title: str = "") -> HumanEntry:
    return HumanEntry(
        doi=normalize_doi(doi),
        title=title,
        normalized_title=normalize_title(title),
    )


@dataclass(frozen=True)
class HumanRelevantList:
    label: str
    entries: tuple[HumanEntry, ...]


def load_human_csv(content: str, label: str) -> HumanRelevantList:
    """Curated list as CSV with ``doi`` and ``title`` columns.

    Rows may leave either column empty (not both). Raises MalformedHumanList
    for a missing header, unknown columns layout, or an empty list.
    """
    reader = csv.DictReader(io.StringIO(content))
    fieldnames = [name.strip().lower() for name in (reader.fieldnames or [])]
    if "doi" not in fieldnames or "title" not in fieldnames:
        raise MalformedHumanList("human CSV must have 'doi' and 'title' columns")
    entries: list[HumanEntry] = []
    for row_no, row in enumerate(reader, 2):
        normalized_row = {
            (key or "").strip().lower(): (value or "").strip()
            for key, value in row.items()
        }
        doi = normalized_row.get("doi") or None
        title = normalized_row.get("title") or ""
        if not doi and not title:
            raise MalformedHumanList(f"row {row_no}: neither doi nor title present")
        entries.append(human_entry(doi=doi, title=title))
    if not entries:
        raise MalformedHumanList("human CSV contains no entries")
    return HumanRelevantList(label=label, entries=tuple(entries))


def match_entry(
    entry: HumanEntry, records: Sequence[ArticleRecord]
) -> ArticleRecord | None:
    """DOI match first; title match only when the DOI is absent or unmatched."""
    by_doi, by_title = _build_indexes(records)
    return _match(entry, by_doi, by_title)


def _build_indexes(records: Sequence[ArticleRecord]):
    by_doi: dict[str, ArticleRecord] = {}
    by_title: dict[str, ArticleRecord] = {}
    for record in records:
        if record.doi is not None:
            by_doi.setdefault(record.doi, record)
        if record.normalized_title:
            by_title.setdefault(record.normalized_title, record)
    return by_doi, by_title


def _match(entry: HumanEntry, by_doi, by_title) -> ArticleRecord | None:
    if entry.doi is not None and entry.doi in by_doi:
        return by_doi[entry.doi]
    if entry.normalized_title and entry.normalized_title in by_title:
        return by_title[entry.normalized_title]
    return None


def format_overlap(value: Fraction | None) -> str:
    if value is None:
        return ""
    exact = Decimal(value.numerator) / Decimal(value.denominator)
    return str(exact.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class EvaluationReport:
    label: str
    human_relevant: int
    tool_retrieved: int
    intersection_ht: int
    missed: int
    model_relevant: int
    intersection_hm: int
    overlap: Fraction | None
    overlap_note: str | None = None

    def __post_init__(self):
        assert self.intersection_hm <= self.intersection_ht <= self.human_relevant
        assert self.missed == self.human_relevant - self.intersection_ht

    @property
    def overlap_display(self) -> str:
        return format_overlap(self.overlap)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "human_relevant": self.human_relevant,
            "tool_retrieved": self.tool_retrieved,
            "intersection_ht": self.intersection_ht,
            "missed": self.missed,
            "model_relevant": self.model_relevant,
            "intersection_hm": self.intersection_hm,
            "overlap_percent": self.overlap_display or None,
            "overlap_note": self.overlap_note,
        }


def evaluate(
    human: HumanRelevantList,
    tool_records: Sequence[ArticleRecord],
    model_labels: Sequence[Label] | Sequence[ClassificationResult],
) -> EvaluationReport:
    """Compute all report columns; ``model_labels`` runs parallel to
    ``tool_records`` (plain labels or full classification results)."""
    if len(model_labels) != len(tool_records):
        raise ValueError("model_labels must cover tool_records")
    labels = [
        item.label if isinstance(item, ClassificationResult) else item
        for item in model_labels
    ]

    by_doi, by_title = _build_indexes(tool_records)
    relevant_ids = {
        id(record)
        for record, label in zip(tool_records, labels)
        if label is Label.RELEVANT
    }

    matched = 0
    matched_relevant = 0
    for entry in human.entries:
        record = _match(entry, by_doi, by_title)
        if record is None:
            continue
        matched += 1
        if id(record) in relevant_ids:
            matched_relevant += 1

    overlap: Fraction | None
    note: str | None = None
    if matched > 0:
        overlap = Fraction(100 * matched_relevant, matched)
    else:
        overlap = None
        note = "undefined: no curated entries were found in the harvested set"

    return EvaluationReport(
        label=human.label,
        human_relevant=len(human.entries),
        tool_retrieved=len(tool_records),
        intersection_ht=matched,
        missed=len(human.entries) - matched,
        model_relevant=sum(1 for label in labels if label is Label.RELEVANT),
        intersection_hm=matched_relevant,
        overlap=overlap,
        overlap_note=note,
    )


def format_report_row(report: EvaluationReport) -> str:
    """One fixed-width, headed report row with all set cardinalities."""
    headers = [
        "Keywords", "HumanRelevant", "ToolRetrieved", "H∩T", "H−T",
        "ModelRelevant", "H∩M", "%Overlap",
    ]
    values = [
        report.label,
        str(report.human_relevant),
        str(report.tool_retrieved),
        str(report.intersection_ht),
        str(report.missed),
        str(report.model_relevant),
        str(report.intersection_hm),
        report.overlap_display or "n/a",
    ]
    widths = [max(len(h), len(v)) for h, v in zip(headers, values)]
    header_line = "  ".join(h.ljust(w) for h, w in zip(headers, widths))
    value_line = "  ".join(v.ljust(w) for v, w in zip(values, widths))
    return header_line + "\n" + value_line
