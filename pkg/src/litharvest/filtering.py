"""Staged record cleaning: source-ID, DOI, and title deduplication, then an
English-language filter, with per-stage before/after/removed statistics.

The pipeline runs a two-phase merge: the Elsevier-backed sources (Scopus,
ScienceDirect) are merged first and deduplicated on their shared record IDs,
then the remaining sources join for the DOI, title, and language stages.
Stage statistics therefore carry a ``merged_in`` count — the number of
records appended to the working set just before the stage ran — so
``before == previous.after + merged_in`` holds at every stage.

Output order is canonical (source priority, then normalized title, DOI,
record id), which makes the surviving record list independent of input
permutation whenever duplicate groups span distinct sources.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Iterable, Sequence

from .language import ENGLISH, UNDETERMINED, detect_language
from .records import ArticleRecord, Source, source_priority
from .records import with_language


class PipelineStage(str, Enum):
    SOURCE_ID = "source_id"
    DOI = "doi"
    TITLE = "title"
    URL = "url"
    LANGUAGE = "language"


@dataclass(frozen=True)
class StageStats:
    stage: PipelineStage
    before: int
    after: int
    removed: int
    merged_in: int = 0

    def __post_init__(self):
        if self.before - self.removed != self.after:
            raise ValueError(
                f"{self.stage.value}: before - removed != after "
                f"({self.before} - {self.removed} != {self.after})"
            )


@dataclass(frozen=True)
class DedupReport:
    stages: tuple[StageStats, ...]
    final_count: int

    def __post_init__(self):
        running = 0
        for stats in self.stages:
            if stats.before != running + stats.merged_in:
                raise ValueError(
                    f"{stats.stage.value}: before != previous after + merged_in"
                )
            running = stats.after
        if self.stages and self.final_count != self.stages[-1].after:
            raise ValueError("final_count != last stage's after")

    def stage(self, stage: PipelineStage) -> StageStats:
        for stats in self.stages:
            if stats.stage is stage:
                return stats
        raise KeyError(stage)

    def to_dict(self) -> dict:
        return {
            "stages": [
                {
                    "stage": s.stage.value,
                    "before": s.before,
                    "after": s.after,
                    "removed": s.removed,
                    "merged_in": s.merged_in,
                }
                for s in self.stages
            ],
            "final_count": self.final_count,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DedupReport":
        return cls(
            stages=tuple(
                StageStats(
                    stage=PipelineStage(s["stage"]),
                    before=s["before"],
                    after=s["after"],
                    removed=s["removed"],
                    merged_in=s.get("merged_in", 0),
                )
                for s in data["stages"]
            ),
            final_count=data["final_count"],
        )


# Fields copied onto a survivor from its discarded duplicates when absent.
_BACKFILL_FIELDS = ("abstract", "doi", "url", "year")


def dedup_by_key(
    records: Sequence[ArticleRecord],
    key_extractor: Callable[[ArticleRecord], str | None],
) -> tuple[list[ArticleRecord], int]:
    """Keep one survivor per key; records without a key always survive.

    The survivor is the highest-priority source in the group (ties broken by
    earliest input position) and inherits abstract/doi/url/year from its
    discarded duplicates when it lacks them. Output preserves input order
    (each survivor sits at its original position).
    """
    groups: dict[str, list[int]] = {}
    keys: list[str | None] = []
    for i, record in enumerate(records):
        key = key_extractor(record)
        keys.append(key)
        if key is not None:
            groups.setdefault(key, []).append(i)

    replacements: dict[int, ArticleRecord] = {}
    dropped: set[int] = set()
    for indices in groups.values():
        if len(indices) < 2:
            continue
        winner = min(indices, key=lambda i: (source_priority(records[i].source), i))
        survivor = records[winner]
        updates = {}
        for other in indices:
            if other == winner:
                continue
            dropped.add(other)
            for field_name in _BACKFILL_FIELDS:
                if getattr(survivor, field_name) is None and field_name not in updates:
                    value = getattr(records[other], field_name)
                    if value is not None:
                        updates[field_name] = value
        if updates:
            replacements[winner] = replace(survivor, **updates)

    kept = [
        replacements.get(i, record)
        for i, record in enumerate(records)
        if i not in dropped
    ]
    return kept, len(dropped)


def filter_language(
    records: Sequence[ArticleRecord], keep: str = ENGLISH
) -> tuple[list[ArticleRecord], int]:
    """Drop records whose abstract (or title, when no abstract) is detected
    as a different language; undetectable texts are kept and tagged "und"."""
    kept: list[ArticleRecord] = []
    removed = 0
    for record in records:
        detected = detect_language(record.abstract or record.title)
        if detected == UNDETERMINED:
            kept.append(with_language(record, UNDETERMINED))
        elif detected == keep:
            kept.append(with_language(record, keep))
        else:
            removed += 1
    return kept, removed


@dataclass(frozen=True)
class PipelineOptions:
    # Sources merged and deduplicated on shared record IDs before the rest join.
    first_merge_sources: tuple[Source, ...] = (Source.SCOPUS, Source.SCIENCEDIRECT)
    dedup_urls: bool = False
    keep_language: str = ENGLISH


def _key_source_id(record: ArticleRecord) -> str | None:
    return record.source_record_id


def _key_doi(record: ArticleRecord) -> str | None:
    return record.doi


def _key_title(record: ArticleRecord) -> str | None:
    # An all-punctuation title normalizes to ""; treat that as no key.
    return record.normalized_title or None


def _key_url(record: ArticleRecord) -> str | None:
    return record.url


def canonical_order(records: Iterable[ArticleRecord]) -> list[ArticleRecord]:
    return sorted(
        records,
        key=lambda r: (
            source_priority(r.source),
            r.normalized_title,
            r.doi or "",
            r.source_record_id or "",
            r.year or 0,
        ),
    )


def run_pipeline(
    records: Sequence[ArticleRecord],
    options: PipelineOptions = PipelineOptions(),
) -> tuple[list[ArticleRecord], DedupReport]:
    """Run the fixed stage cascade and report per-stage statistics.

    Stage order: source-ID dedup over the first merge group, DOI dedup once
    the remaining sources join, title dedup, optional URL dedup, language
    filter. Idempotent: re-running on its own output removes nothing.
    """
    first_group = [r for r in records if r.source in options.first_merge_sources]
    second_group = [r for r in records if r.source not in options.first_merge_sources]

    stages: list[StageStats] = []

    working, removed = dedup_by_key(first_group, _key_source_id)
    stages.append(
        StageStats(
            PipelineStage.SOURCE_ID,
            before=len(first_group),
            after=len(working),
            removed=removed,
            merged_in=len(first_group),
        )
    )

    working = working + second_group
    before = len(working)
    working, removed = dedup_by_key(working, _key_doi)
    stages.append(
        StageStats(
            PipelineStage.DOI,
            before=before,
            after=len(working),
            removed=removed,
            merged_in=len(second_group),
        )
    )

    before = len(working)
    working, removed = dedup_by_key(working, _key_title)
    stages.append(
        StageStats(PipelineStage.TITLE, before=before, after=len(working), removed=removed)
    )

    if options.dedup_urls:
        before = len(working)
        working, removed = dedup_by_key(working, _key_url)
        stages.append(
            StageStats(PipelineStage.URL, before=before, after=len(working), removed=removed)
        )

    before = len(working)
    working, removed = filter_language(working, options.keep_language)
    stages.append(
        StageStats(
            PipelineStage.LANGUAGE, before=before, after=len(working), removed=removed
        )
    )

    ordered = canonical_order(working)
    return ordered, DedupReport(stages=tuple(stages), final_count=len(ordered))


def format_report_table(report: DedupReport) -> str:
    """Fixed-width stage table for terminal output."""
    lines = [f"{'Stage':<12} {'Merged in':>10} {'Before':>8} {'After':>8} {'Removed':>8}"]
    for s in report.stages:
        lines.append(
            f"{s.stage.value:<12} {s.merged_in:>10,} {s.before:>8,} {s.after:>8,} {s.removed:>8,}"
        )
    lines.append(f"{'final':<12} {'':>10} {'':>8} {report.final_count:>8,}")
    return "\n".join(lines)
