"""Plain-directory job store and the open CSV exporter.

Each job lives under ``<data_dir>/<alias>/`` as a manifest plus
line-delimited record files. Every file is written to a temp path and
renamed into place, with the manifest renamed last, so a crash mid-save
leaves the previous consistent state readable. Datasets are append-once
artifacts; no database needed.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Sequence

from .classify import ClassificationResult, Label, TEMPLATE_ID
from .filtering import DedupReport
from .harvest import HarvestJob, JobStatus, SourceConfig, YearRange, utc_now
from .query import parse_query, render_query
from .records import ArticleRecord, Source, record_from_dict, record_to_dict

logger = logging.getLogger(__name__)

CSV_HEADER = [
    "title", "authors", "year", "doi", "url", "abstract", "source",
    "source_record_id", "language", "relevance", "model_id",
]

MANIFEST_FILE = "manifest.json"
RAW_RECORDS_FILE = "records.jsonl"
CLEAN_RECORDS_FILE = "clean_records.jsonl"
DEDUP_REPORT_FILE = "dedup_report.json"
CLASSIFICATIONS_FILE = "classifications.jsonl"
EXPORT_FILE = "export.csv"


class StoreError(Exception):
    pass


class AliasConflict(StoreError):
    pass


class JobNotFound(StoreError):
    pass


def export_csv(
    records: Sequence[ArticleRecord],
    results: Sequence[ClassificationResult | None] | None = None,
) -> bytes:
    """Dataset as UTF-8 CSV bytes; byte-stable for identical input.

    ``results`` runs parallel to ``records`` when given; without it the
    relevance and model columns stay empty. Quoting follows the standard
    rule (quote on comma, quote, or newline; double embedded quotes).
    """
    if results is not None and len(results) != len(records):
        raise ValueError("results must run parallel to records")
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for i, record in enumerate(records):
        result = results[i] if results is not None else None
        writer.writerow(
            [
                record.title,
                "; ".join(record.authors),
                str(record.year) if record.year is not None else "",
                record.doi or "",
                record.url or "",
                record.abstract or "",
                record.source.value,
                record.source_record_id or "",
                record.language or "",
                result.label.value if result is not None else "",
                result.model_id if result is not None else "",
            ]
        )
    return buffer.getvalue().encode("utf-8")


@dataclass
class JobManifest:
    alias: str
    query: str
    source_configs: dict[str, dict[str, Any]]
    year_range: dict[str, int] | None
    status: JobStatus
    template_id: str = TEMPLATE_ID
    model_id: str | None = None
    created_at: str = field(default_factory=utc_now)
    finished_at: str | None = None
    counters: dict[str, Any] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    files: list[str] = field(default_factory=list)

    @classmethod
    def from_job(cls, job: HarvestJob) -> "JobManifest":
        return cls(
            alias=job.alias,
            query=render_query(job.query),
            source_configs={
                source.value: {k: v for k, v in asdict(config).items() if v is not None}
                for source, config in job.source_configs.items()
            },
            year_range=(
                {"from": job.year_range.start, "to": job.year_range.end}
                if job.year_range
                else None
            ),
            status=job.status,
            created_at=job.created_at,
            finished_at=job.finished_at,
            counters=dict(job.counters),
        )

    def to_job(self) -> HarvestJob:
        configs = {
            Source(name): SourceConfig(
                enabled=raw.get("enabled", False),
                record_limit=raw.get("record_limit"),
                page_count=raw.get("page_count"),
            )
            for name, raw in self.source_configs.items()
        }
        year_range = (
            YearRange(self.year_range["from"], self.year_range["to"])
            if self.year_range
            else None
        )
        return HarvestJob(
            alias=self.alias,
            query=parse_query(self.query),
            source_configs=configs,
            year_range=year_range,
            status=self.status,
            created_at=self.created_at,
            finished_at=self.finished_at,
            counters=dict(self.counters),
        )

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["status"] = self.status.value
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "JobManifest":
        known = {f for f in cls.__dataclass_fields__}
        kwargs = {k: v for k, v in data.items() if k in known}
        kwargs["status"] = JobStatus(kwargs["status"])
        return cls(**kwargs)


@dataclass(frozen=True)
class JobSummary:
    alias: str
    status: JobStatus
    created_at: str
    finished_at: str | None
    warning: str | None = None


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def _records_to_jsonl(records: Sequence[ArticleRecord]) -> bytes:
    lines = [json.dumps(record_to_dict(r), ensure_ascii=False) for r in records]
    return ("\n".join(lines) + "\n" if lines else "").encode("utf-8")


def _classifications_to_jsonl(results: Sequence[ClassificationResult]) -> bytes:
    lines = [
        json.dumps(
            {
                "label": r.label.value,
                "raw_output": r.raw_output,
                "model_id": r.model_id,
                "prompt_digest": r.prompt_digest,
                "attempts": r.attempts,
                "error": r.error,
            },
            ensure_ascii=False,
        )
        for r in results
    ]
    return ("\n".join(lines) + "\n" if lines else "").encode("utf-8")


class JobStore:
    """One directory per job; single writer per job, many readers."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def job_dir(self, alias: str) -> Path:
        return self.root / alias

    def exists(self, alias: str) -> bool:
        return (self.job_dir(alias) / MANIFEST_FILE).exists()

    def create(self, manifest: JobManifest) -> None:
        """Register a new alias. Aliases are unique across the store."""
        job_dir = self.job_dir(manifest.alias)
        if self.exists(manifest.alias):
            raise AliasConflict(f"alias already in use: {manifest.alias}")
        job_dir.mkdir(parents=True, exist_ok=True)
        self.save_job(manifest)

    def save_job(
        self,
        manifest: JobManifest,
        *,
        records: Sequence[ArticleRecord] | None = None,
        clean_records: Sequence[ArticleRecord] | None = None,
        dedup_report: DedupReport | None = None,
        classifications: Sequence[ClassificationResult] | None = None,
        csv_bytes: bytes | None = None,
    ) -> None:
        """Persist any provided artifacts, then the manifest (commit point)."""
        job_dir = self.job_dir(manifest.alias)
        if not job_dir.exists():
            raise JobNotFound(f"unknown alias: {manifest.alias} (create it first)")
        try:
            if records is not None:
                _atomic_write(job_dir / RAW_RECORDS_FILE, _records_to_jsonl(records))
            if clean_records is not None:
                _atomic_write(
                    job_dir / CLEAN_RECORDS_FILE, _records_to_jsonl(clean_records)
                )
            if dedup_report is not None:
                _atomic_write(
                    job_dir / DEDUP_REPORT_FILE,
                    json.dumps(dedup_report.to_dict(), indent=2).encode("utf-8"),
                )
            if classifications is not None:
                _atomic_write(
                    job_dir / CLASSIFICATIONS_FILE,
                    _classifications_to_jsonl(classifications),
                )
            if csv_bytes is not None:
                _atomic_write(job_dir / EXPORT_FILE, csv_bytes)
            manifest.files = sorted(
                p.name for p in job_dir.iterdir() if not p.name.endswith(".tmp")
                and p.name != MANIFEST_FILE
            )
            _atomic_write(
                job_dir / MANIFEST_FILE,
                json.dumps(manifest.to_dict(), indent=2).encode("utf-8"),
            )
        except OSError as exc:
            raise StoreError(f"failed to persist job {manifest.alias}: {exc}") from exc

    def load_manifest(self, alias: str) -> JobManifest:
        path = self.job_dir(alias) / MANIFEST_FILE
        if not path.exists():
            raise JobNotFound(f"unknown alias: {alias}")
        return JobManifest.from_dict(json.loads(path.read_text(encoding="utf-8")))

    def _load_records_file(self, alias: str, filename: str) -> list[ArticleRecord]:
        path = self.job_dir(alias) / filename
        if not path.exists():
            raise JobNotFound(f"{alias} has no {filename}")
        return [
            record_from_dict(json.loads(line))
            for line in path.read_text(encoding="utf-8").splitlines()
            if line.strip()
        ]

    def load_records(self, alias: str) -> list[ArticleRecord]:
        return self._load_records_file(alias, RAW_RECORDS_FILE)

    def load_clean_records(self, alias: str) -> list[ArticleRecord]:
        return self._load_records_file(alias, CLEAN_RECORDS_FILE)

    def load_dedup_report(self, alias: str) -> DedupReport:
        path = self.job_dir(alias) / DEDUP_REPORT_FILE
        if not path.exists():
            raise JobNotFound(f"{alias} has no dedup report")
        return DedupReport.from_dict(json.loads(path.read_text(encoding="utf-8")))

    def load_classifications(self, alias: str) -> list[ClassificationResult]:
        path = self.job_dir(alias) / CLASSIFICATIONS_FILE
        if not path.exists():
            raise JobNotFound(f"{alias} has no classifications")
        records = self.load_clean_records(alias)
        results = []
        for record, line in zip(
            records, path.read_text(encoding="utf-8").splitlines()
        ):
            data = json.loads(line)
            results.append(
                ClassificationResult(
                    record=record,
                    label=Label(data["label"]),
                    raw_output=data["raw_output"],
                    model_id=data["model_id"],
                    prompt_digest=data["prompt_digest"],
                    attempts=data["attempts"],
                    error=data.get("error"),
                )
            )
        return results

    def load_csv(self, alias: str) -> bytes:
        path = self.job_dir(alias) / EXPORT_FILE
        if not path.exists():
            raise JobNotFound(f"{alias} has no export")
        return path.read_bytes()

    def list_jobs(self) -> list[JobSummary]:
        """All stored jobs, newest first; a job with an unreadable manifest
        is listed as failed with a parse warning instead of being hidden."""
        summaries: list[JobSummary] = []
        for job_dir in sorted(self.root.iterdir()):
            if not job_dir.is_dir():
                continue
            try:
                manifest = self.load_manifest(job_dir.name)
                summaries.append(
                    JobSummary(
                        alias=manifest.alias,
                        status=manifest.status,
                        created_at=manifest.created_at,
                        finished_at=manifest.finished_at,
                    )
                )
            except (json.JSONDecodeError, KeyError, ValueError, JobNotFound) as exc:
                logger.warning("unreadable manifest for %s: %s", job_dir.name, exc)
                summaries.append(
                    JobSummary(
                        alias=job_dir.name,
                        status=JobStatus.FAILED,
                        created_at="",
                        finished_at=None,
                        warning=f"manifest unreadable: {exc}",
                    )
                )
        summaries.sort(key=lambda s: s.created_at, reverse=True)
        return summaries
