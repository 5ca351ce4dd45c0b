"""Harvest orchestration: render the query per source, fan collection out
across connectors concurrently, and aggregate the combined record set.

Limits follow the hosted tool's rules: Scopus and ScienceDirect accept a
record cap of at most 5,000; Web of Science is collected by page with a page
count between 0 and 100; Google Scholar is off unless explicitly enabled;
year-windowed jobs collect at most 1,000 records per source per year.
"""

from __future__ import annotations

import logging
import re
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from typing import Callable, Mapping, Sequence

from .connectors import Connector, PageRequest, PaginationUnit
from .query import QueryDialect, QueryExpr, render_query
from .records import ArticleRecord, Source

logger = logging.getLogger(__name__)

MAX_RECORDS_PER_SOURCE = 5000
MAX_WOS_PAGES = 100
PER_YEAR_CAP = 1000
DEFAULT_CONCURRENCY = 8
DEFAULT_SCHOLAR_LIMIT = 1000

_ALIAS_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]{0,63}$")

_DIALECTS: dict[Source, QueryDialect] = {
    Source.SCOPUS: QueryDialect.TITLE_ABS_KEY,
    Source.SCIENCEDIRECT: QueryDialect.TITLE_ABS_KEY,
    Source.WEB_OF_SCIENCE: QueryDialect.TOPIC_SEARCH,
    Source.GOOGLE_SCHOLAR: QueryDialect.GENERIC,
    Source.FIXTURE: QueryDialect.GENERIC,
}


class ValidationError(ValueError):
    """Submission violates a bound; ``field`` names the offending input."""

    def __init__(self, field_name: str, message: str):
        super().__init__(message)
        self.field = field_name


class HarvestFailed(RuntimeError):
    """Every enabled source failed entirely."""

    def __init__(self, warnings: list[str]):
        super().__init__("all enabled sources failed")
        self.warnings = warnings


class JobStatus(str, Enum):
    PENDING = "pending"
    COLLECTING = "collecting"
    FILTERING = "filtering"
    CLASSIFYING = "classifying"
    DONE = "done"
    FAILED = "failed"


_STATUS_ORDER = [
    JobStatus.PENDING,
    JobStatus.COLLECTING,
    JobStatus.FILTERING,
    JobStatus.CLASSIFYING,
    JobStatus.DONE,
]


def check_transition(current: JobStatus, new: JobStatus) -> None:
    """Statuses only move forward; any state may jump to FAILED."""
    if new is JobStatus.FAILED:
        return
    if current is JobStatus.FAILED:
        raise ValueError("job already failed")
    if _STATUS_ORDER.index(new) < _STATUS_ORDER.index(current):
        raise ValueError(f"status cannot move backward: {current.value} -> {new.value}")


@dataclass(frozen=True)
class SourceConfig:
    enabled: bool = False
    record_limit: int | None = None
    page_count: int | None = None


@dataclass(frozen=True)
class YearRange:
    start: int
    end: int  # inclusive

    def years(self) -> range:
        return range(self.start, self.end + 1)


def default_source_configs() -> dict[Source, SourceConfig]:
    return {
        Source.SCOPUS: SourceConfig(enabled=True, record_limit=MAX_RECORDS_PER_SOURCE),
        Source.SCIENCEDIRECT: SourceConfig(enabled=True, record_limit=MAX_RECORDS_PER_SOURCE),
        Source.WEB_OF_SCIENCE: SourceConfig(enabled=True, page_count=10),
        Source.GOOGLE_SCHOLAR: SourceConfig(enabled=False, record_limit=DEFAULT_SCHOLAR_LIMIT),
    }


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class HarvestJob:
    alias: str
    query: QueryExpr
    source_configs: dict[Source, SourceConfig] = field(default_factory=default_source_configs)
    year_range: YearRange | None = None
    status: JobStatus = JobStatus.PENDING
    created_at: str = field(default_factory=utc_now)
    finished_at: str | None = None
    counters: dict[str, int] = field(default_factory=dict)

    def advance(self, new_status: JobStatus) -> None:
        check_transition(self.status, new_status)
        self.status = new_status
        if new_status in (JobStatus.DONE, JobStatus.FAILED):
            self.finished_at = utc_now()


def validate_job(job: HarvestJob) -> None:
    if not _ALIAS_RE.match(job.alias or ""):
        raise ValidationError(
            "alias",
            "alias must be 1-64 characters drawn from letters, digits, '.', '_', '-'",
        )
    for source, config in job.source_configs.items():
        if not config.enabled:
            continue
        if source in (Source.SCOPUS, Source.SCIENCEDIRECT, Source.FIXTURE,
                      Source.GOOGLE_SCHOLAR):
            limit = config.record_limit
            if limit is None or not 1 <= limit <= MAX_RECORDS_PER_SOURCE:
                raise ValidationError(
                    f"{source.value}.max",
                    f"{source.value} record limit must be between 1 and {MAX_RECORDS_PER_SOURCE}",
                )
        elif source is Source.WEB_OF_SCIENCE:
            pages = config.page_count
            if pages is None or not 0 <= pages <= MAX_WOS_PAGES:
                raise ValidationError(
                    "wos.pages",
                    f"wos page count must be between 0 and {MAX_WOS_PAGES}",
                )
    if job.year_range is not None:
        if job.year_range.start > job.year_range.end:
            raise ValidationError("year_range", "year range start exceeds end")
        for bound in (job.year_range.start, job.year_range.end):
            if not 1800 <= bound <= datetime.now().year + 1:
                raise ValidationError("year_range", f"implausible year {bound}")


def plan_requests(job: HarvestJob) -> dict[Source, list[PageRequest]]:
    """Per-source request plans honoring limits, year windows, and defaults.

    Records-unit sources get one seed request per (source, year) whose limit
    is the stream cap; the page-based source gets one request per page.
    """
    validate_job(job)
    years: Sequence[int | None] = (
        list(job.year_range.years()) if job.year_range else [None]
    )
    plan: dict[Source, list[PageRequest]] = {}
    for source, config in job.source_configs.items():
        if not config.enabled:
            continue
        rendered = render_query(job.query, _DIALECTS[source])
        requests: list[PageRequest] = []
        if source is Source.WEB_OF_SCIENCE:
            for year in years:
                requests.extend(
                    PageRequest(query=rendered, limit=25, page_index=page, year=year)
                    for page in range(config.page_count or 0)
                )
        else:
            for year in years:
                cap = config.record_limit or MAX_RECORDS_PER_SOURCE
                if year is not None:
                    cap = min(cap, PER_YEAR_CAP)
                requests.append(PageRequest(query=rendered, limit=cap, year=year))
        if requests:
            plan[source] = requests
    return plan


@dataclass
class HarvestResult:
    records: list[ArticleRecord]
    per_source_counts: dict[Source, int]
    warnings: list[str]
    failed_sources: list[Source]


ProgressCallback = Callable[[Source, int, int], None]


def _group_streams(
    source: Source, requests: list[PageRequest], unit: PaginationUnit
) -> list[list[PageRequest]]:
    if unit is PaginationUnit.RECORDS:
        return [[request] for request in requests]
    streams: dict[int | None, list[PageRequest]] = {}
    for request in requests:
        streams.setdefault(request.year, []).append(request)
    return list(streams.values())


def _run_records_stream(
    connector: Connector,
    seed: PageRequest,
    on_page: Callable[[int], None],
) -> list[ArticleRecord]:
    collected: list[ArticleRecord] = []
    cursor = seed.cursor
    page = 0
    while len(collected) < seed.limit:
        size = min(seed.limit - len(collected), connector.spec.max_records_per_request)
        result = connector.fetch_page(replace(seed, limit=size, cursor=cursor))
        chunk = list(result.records)[: seed.limit - len(collected)]
        collected.extend(chunk)
        on_page(len(chunk))
        page += 1
        cursor = result.next_token
        if cursor is None or not chunk:
            break
    return collected


def _run_pages_stream(
    connector: Connector,
    requests: list[PageRequest],
    on_page: Callable[[int], None],
) -> list[ArticleRecord]:
    cap = PER_YEAR_CAP if requests[0].year is not None else None
    collected: list[ArticleRecord] = []
    for request in requests:
        result = connector.fetch_page(request)
        chunk = list(result.records)
        if cap is not None:
            chunk = chunk[: cap - len(collected)]
        collected.extend(chunk)
        on_page(len(chunk))
        if result.next_token is None or (cap is not None and len(collected) >= cap):
            break
    return collected


def run_harvest(
    job: HarvestJob,
    connectors: Mapping[Source, Connector],
    concurrency_limit: int = DEFAULT_CONCURRENCY,
    progress: ProgressCallback | None = None,
) -> HarvestResult:
    """Execute all planned streams concurrently and aggregate the results.

    Streams are scheduled onto a pool of at most ``concurrency_limit``
    workers; each stream pages sequentially, so at most that many requests
    are ever in flight. A failing stream is recorded as a warning without
    aborting the others; HarvestFailed is raised only when every enabled
    source failed entirely.
    """
    if concurrency_limit < 1:
        raise ValueError("concurrency_limit must be positive")
    plan = plan_requests(job)

    lock = threading.Lock()
    per_source_counts: dict[Source, int] = {source: 0 for source in plan}
    per_source_pages: dict[Source, int] = {source: 0 for source in plan}
    warnings: list[str] = []
    stream_outputs: dict[tuple[Source, int], list[ArticleRecord]] = {}
    stream_failures: dict[Source, list[str]] = {source: [] for source in plan}
    stream_totals: dict[Source, int] = {}

    def on_page(source: Source) -> Callable[[int], None]:
        def callback(count: int) -> None:
            with lock:
                per_source_counts[source] += count
                per_source_pages[source] += 1
                page = per_source_pages[source]
                total = per_source_counts[source]
            if progress is not None:
                progress(source, page, total)

        return callback

    def run_stream(source: Source, index: int, requests: list[PageRequest]) -> None:
        connector = connectors.get(source)
        if connector is None:
            with lock:
                stream_failures[source].append(f"{source.value}: no connector configured")
            return
        try:
            if connector.spec.pagination_unit is PaginationUnit.PAGES:
                collected = _run_pages_stream(connector, requests, on_page(source))
            else:
                collected = _run_records_stream(connector, requests[0], on_page(source))
        except Exception as exc:  # noqa: BLE001 - stream faults become warnings
            logger.warning("stream %s[%d] failed: %s", source.value, index, exc)
            with lock:
                stream_failures[source].append(f"{source.value}: {exc}")
            return
        with lock:
            stream_outputs[(source, index)] = collected

    tasks: list[tuple[Source, int, list[PageRequest]]] = []
    for source, requests in plan.items():
        unit = connectors[source].spec.pagination_unit if source in connectors else (
            PaginationUnit.PAGES if source is Source.WEB_OF_SCIENCE else PaginationUnit.RECORDS
        )
        streams = _group_streams(source, requests, unit)
        stream_totals[source] = len(streams)
        tasks.extend((source, i, stream) for i, stream in enumerate(streams))

    with ThreadPoolExecutor(max_workers=concurrency_limit) as pool:
        futures = [pool.submit(run_stream, *task) for task in tasks]
        for future in futures:
            future.result()

    for source, failures in stream_failures.items():
        warnings.extend(failures)

    sources_with_streams = [s for s, n in stream_totals.items() if n > 0]
    if sources_with_streams and all(
        len(stream_failures[s]) == stream_totals[s] for s in sources_with_streams
    ):
        raise HarvestFailed(warnings)

    # Concatenate in plan order so output is independent of scheduling.
    records: list[ArticleRecord] = []
    for source in plan:
        for index in range(stream_totals[source]):
            records.extend(stream_outputs.get((source, index), []))

    # Failed streams already reported zero records; recompute from output.
    final_counts = {source: 0 for source in plan}
    for (source, _), chunk in stream_outputs.items():
        final_counts[source] += len(chunk)

    failed_sources = [
        s for s in plan if stream_failures[s] and len(stream_failures[s]) == stream_totals[s]
    ]
    return HarvestResult(
        records=records,
        per_source_counts=final_counts,
        warnings=warnings,
        failed_sources=failed_sources,
    )
