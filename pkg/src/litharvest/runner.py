"""Job orchestration shared by the CLI and the HTTP service.

A job moves through collecting -> filtering -> classifying -> done; each
stage persists its artifacts through the store before the status advances,
and a live in-memory view feeds the polling endpoint while a stage runs.
The classifier backend is the deterministic keyword stub unless a
generation endpoint is configured (GEN_ENDPOINT or config).
"""

from __future__ import annotations

import logging
import os
import threading
from concurrent.futures import Future, ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Mapping

from .classify import (
    DEFAULT_GEN_ENDPOINT_VAR,
    GenerationBackend,
    GenerationParams,
    HttpBackend,
    classify_batch,
    stub_backend,
)
from .connectors import Connector, ConnectorConfig, build_connectors
from .evaluate import EvaluationReport, HumanRelevantList, evaluate
from .filtering import PipelineOptions, run_pipeline
from .harvest import (
    DEFAULT_CONCURRENCY,
    HarvestFailed,
    HarvestJob,
    JobStatus,
    SourceConfig,
    ValidationError,
    YearRange,
    default_source_configs,
    run_harvest,
    validate_job,
)
from .query import QuerySyntaxError, parse_query
from .records import Source
from .store import AliasConflict, JobManifest, JobStore, export_csv

logger = logging.getLogger(__name__)


@dataclass
class RunnerConfig:
    data_dir: Path
    fixtures_dir: Path | None = None
    gen_endpoint: str | None = None
    concurrency_limit: int = DEFAULT_CONCURRENCY
    classifier_parallelism: int = 4
    max_parallel_jobs: int = 2
    generation_params: GenerationParams = field(default_factory=GenerationParams)
    pipeline_options: PipelineOptions = field(default_factory=PipelineOptions)


def parse_submission(body: Mapping[str, Any]) -> HarvestJob:
    """Validate a job submission and build the job. Field-level
    ValidationError on any violated bound; the query must parse."""
    if not isinstance(body, Mapping):
        raise ValidationError("body", "submission must be an object")
    alias = body.get("alias")
    if not isinstance(alias, str) or not alias:
        raise ValidationError("alias", "alias is required")
    query_text = body.get("query")
    if not isinstance(query_text, str) or not query_text.strip():
        raise ValidationError("query", "query is required")
    try:
        query = parse_query(query_text)
    except QuerySyntaxError as exc:
        raise ValidationError("query", str(exc)) from exc

    def read_int(section: str, key: str, value: Any) -> int:
        try:
            return int(value)
        except (TypeError, ValueError):
            raise ValidationError(
                f"{section}.{key}", f"{section}.{key} must be an integer"
            ) from None

    def read_bool(section: str, value: Any, default: bool) -> bool:
        if value is None:
            return default
        if isinstance(value, bool):
            return value
        raise ValidationError(f"{section}.enabled", f"{section}.enabled must be a boolean")

    configs = default_source_configs()
    sections = {
        Source.SCOPUS: ("scopus", "max", True),
        Source.SCIENCEDIRECT: ("sciencedirect", "max", True),
        Source.WEB_OF_SCIENCE: ("wos", "pages", True),
        Source.GOOGLE_SCHOLAR: ("gscholar", "max", False),
        Source.FIXTURE: ("fixture", "max", False),
    }
    for source, (section, limit_key, default_enabled) in sections.items():
        raw = body.get(section)
        if raw is None:
            continue
        if not isinstance(raw, Mapping):
            raise ValidationError(section, f"{section} must be an object")
        base = configs.get(source, SourceConfig(enabled=False, record_limit=5000))
        enabled = read_bool(section, raw.get("enabled"), default_enabled)
        if limit_key == "pages":
            pages = base.page_count
            if raw.get("pages") is not None:
                pages = read_int(section, "pages", raw["pages"])
            configs[source] = SourceConfig(enabled=enabled, page_count=pages)
        else:
            limit = base.record_limit
            if raw.get("max") is not None:
                limit = read_int(section, "max", raw["max"])
            configs[source] = SourceConfig(enabled=enabled, record_limit=limit)

    year_from = body.get("year_from")
    year_to = body.get("year_to")
    year_range = None
    if (year_from is None) != (year_to is None):
        raise ValidationError("year_range", "year_from and year_to must be given together")
    if year_from is not None:
        year_range = YearRange(
            read_int("year_range", "from", year_from),
            read_int("year_range", "to", year_to),
        )

    job = HarvestJob(alias=alias, query=query, source_configs=configs, year_range=year_range)
    validate_job(job)
    return job


@dataclass
class _LiveState:
    status: JobStatus
    counters: dict[str, int] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)


class JobRunner:
    def __init__(
        self,
        config: RunnerConfig,
        *,
        store: JobStore | None = None,
        connectors: Mapping[Source, Connector] | None = None,
        backend_factory: Callable[[HarvestJob], GenerationBackend] | None = None,
    ):
        self.config = config
        self.store = store or JobStore(config.data_dir)
        self._connectors = connectors
        self._backend_factory = backend_factory
        self._executor = ThreadPoolExecutor(max_workers=config.max_parallel_jobs)
        self._live: dict[str, _LiveState] = {}
        self._lock = threading.Lock()

    # ------------------------------------------------------------ plumbing

    def connectors(self) -> Mapping[Source, Connector]:
        if self._connectors is None:
            self._connectors = build_connectors(
                ConnectorConfig.from_env(fixtures_dir=self.config.fixtures_dir)
            )
        return self._connectors

    def backend(self, job: HarvestJob) -> GenerationBackend:
        if self._backend_factory is not None:
            return self._backend_factory(job)
        endpoint = self.config.gen_endpoint or os.environ.get(DEFAULT_GEN_ENDPOINT_VAR)
        if endpoint:
            return HttpBackend(endpoint=endpoint)
        return stub_backend(job.query)

    def _save(self, job: HarvestJob, manifest: JobManifest, **artifacts: Any) -> None:
        manifest.status = job.status
        manifest.finished_at = job.finished_at
        manifest.counters = dict(job.counters)
        self.store.save_job(manifest, **artifacts)

    def _update_live(self, alias: str, **changes: Any) -> None:
        with self._lock:
            state = self._live.setdefault(alias, _LiveState(status=JobStatus.PENDING))
            for key, value in changes.items():
                setattr(state, key, value)

    # -------------------------------------------------------------- stages

    def create(self, job: HarvestJob) -> JobManifest:
        """Register the job as pending; raises AliasConflict on reuse."""
        manifest = JobManifest.from_job(job)
        self.store.create(manifest)
        self._update_live(job.alias, status=JobStatus.PENDING)
        return manifest

    def collect(self, job: HarvestJob, manifest: JobManifest) -> int:
        """Harvest all enabled sources; leaves the job parked at filtering."""
        job.advance(JobStatus.COLLECTING)
        self._update_live(job.alias, status=job.status)
        self._save(job, manifest)

        def progress(source: Source, page: int, count: int) -> None:
            with self._lock:
                state = self._live[job.alias]
                state.counters[source.value] = count

        try:
            result = run_harvest(
                job,
                self.connectors(),
                concurrency_limit=self.config.concurrency_limit,
                progress=progress,
            )
        except HarvestFailed as exc:
            job.counters["sources"] = {}
            manifest.warnings.extend(exc.warnings)
            self._fail(job, manifest, "collection failed for every enabled source")
            raise
        job.counters["sources"] = {
            source.value: count for source, count in result.per_source_counts.items()
        }
        manifest.warnings.extend(result.warnings)
        job.advance(JobStatus.FILTERING)
        self._update_live(
            job.alias, status=job.status, counters=dict(job.counters["sources"]),
            warnings=list(manifest.warnings),
        )
        self._save(job, manifest, records=result.records)
        return len(result.records)

    def filter(self, job: HarvestJob, manifest: JobManifest):
        """Run the dedup/language pipeline over the collected records."""
        if job.status is not JobStatus.FILTERING:
            raise ValueError(f"job {job.alias} is not ready to filter ({job.status.value})")
        records = self.store.load_records(job.alias)
        clean, report = run_pipeline(records, self.config.pipeline_options)
        job.counters["clean"] = report.final_count
        job.advance(JobStatus.CLASSIFYING)
        self._update_live(job.alias, status=job.status)
        self._save(job, manifest, clean_records=clean, dedup_report=report)
        return clean, report

    def classify(self, job: HarvestJob, manifest: JobManifest):
        """Screen the cleaned records and export the final CSV."""
        if job.status is not JobStatus.CLASSIFYING:
            raise ValueError(f"job {job.alias} is not ready to classify ({job.status.value})")
        clean = self.store.load_clean_records(job.alias)
        results = classify_batch(
            clean,
            job.query,
            self.backend(job),
            params=self.config.generation_params,
            parallelism=self.config.classifier_parallelism,
        )
        manifest.model_id = results[0].model_id if results else None
        job.counters["relevant"] = sum(
            1 for r in results if r.label.value == "relevant"
        )
        job.advance(JobStatus.DONE)
        self._update_live(job.alias, status=job.status)
        self._save(
            job,
            manifest,
            classifications=results,
            csv_bytes=export_csv(clean, results),
        )
        return results

    def _fail(self, job: HarvestJob, manifest: JobManifest, reason: str) -> None:
        job.advance(JobStatus.FAILED)
        manifest.warnings.append(reason)
        self._update_live(job.alias, status=JobStatus.FAILED, warnings=list(manifest.warnings))
        try:
            self._save(job, manifest)
        except Exception:  # pragma: no cover - best effort on the failure path
            logger.exception("could not persist failure state for %s", job.alias)

    # ---------------------------------------------------------- whole runs

    def run_job(self, job: HarvestJob, manifest: JobManifest) -> None:
        """Collect, filter, and classify in sequence (synchronous)."""
        try:
            self.collect(job, manifest)
            self.filter(job, manifest)
            self.classify(job, manifest)
        except HarvestFailed:
            pass  # already marked failed with warnings
        except Exception as exc:  # noqa: BLE001 - job faults must not kill workers
            logger.exception("job %s failed", job.alias)
            if job.status is not JobStatus.FAILED:
                self._fail(job, manifest, f"{type(exc).__name__}: {exc}")

    def submit(self, body: Mapping[str, Any]) -> tuple[JobManifest, Future]:
        """Validate, register, and run a submission asynchronously."""
        job = parse_submission(body)
        manifest = self.create(job)
        future = self._executor.submit(self.run_job, job, manifest)
        return manifest, future

    # -------------------------------------------------------------- queries

    def status_document(self, alias: str) -> dict[str, Any]:
        manifest = self.store.load_manifest(alias)
        with self._lock:
            live = self._live.get(alias)
            live_status = live.status if live else None
            live_counters = dict(live.counters) if live else {}
            live_warnings = list(live.warnings) if live else []
        running = live_status is not None and manifest.status != live_status
        counters = dict(manifest.counters.get("sources", {}))
        if running or not counters:
            for key, value in live_counters.items():
                counters[key] = max(counters.get(key, 0), value)
        document: dict[str, Any] = {
            "alias": manifest.alias,
            "status": (live_status or manifest.status).value,
            "query": manifest.query,
            "created_at": manifest.created_at,
            "finished_at": manifest.finished_at,
            "counters": {"sources": counters},
            "warnings": live_warnings or list(manifest.warnings),
            "files": list(manifest.files),
            "template_id": manifest.template_id,
            "model_id": manifest.model_id,
        }
        if "clean" in manifest.counters:
            document["counters"]["clean"] = manifest.counters["clean"]
        if "relevant" in manifest.counters:
            document["counters"]["relevant"] = manifest.counters["relevant"]
        try:
            document["dedup_report"] = self.store.load_dedup_report(alias).to_dict()
        except Exception:
            document["dedup_report"] = None
        return document

    def evaluate_job(self, alias: str, human: HumanRelevantList) -> EvaluationReport:
        manifest = self.store.load_manifest(alias)
        if manifest.status is not JobStatus.DONE:
            raise ValueError(f"job {alias} is not done ({manifest.status.value})")
        records = self.store.load_clean_records(alias)
        results = self.store.load_classifications(alias)
        return evaluate(human, records, results)

    def shutdown(self) -> None:
        self._executor.shutdown(wait=True)
