"""Scholarly literature harvesting, cleaning, screening, and export.

The pieces compose in pipeline order:

    query      boolean keyword queries (parse, render, match, count)
    records    the unified article record and its normalizers
    connectors paginated, rate-limited source access (fixtures + live)
    harvest    concurrent collection across sources
    filtering  source-ID/DOI/title dedup cascade + language filter
    classify   zero-shot relevance screening behind a generation contract
    evaluate   overlap accuracy against expert-curated lists
    store      directory-backed job store and CSV export
    runner     stage orchestration shared by the CLI and HTTP API
    service    the FastAPI app
"""

from .classify import (
    ClassificationResult,
    GenerationParams,
    Label,
    build_prompt,
    classify_batch,
    extract_label,
    stub_backend,
)
from .connectors import ConnectorConfig, FixtureConnector, PageRequest, list_connectors
from .evaluate import (
    EvaluationReport,
    HumanRelevantList,
    evaluate,
    human_entry,
    load_human_csv,
    match_entry,
)
from .filtering import (
    DedupReport,
    PipelineOptions,
    dedup_by_key,
    filter_language,
    run_pipeline,
)
from .harvest import (
    HarvestJob,
    JobStatus,
    SourceConfig,
    YearRange,
    plan_requests,
    run_harvest,
)
from .query import (
    And,
    Or,
    QueryDialect,
    QueryExpr,
    QuerySyntaxError,
    Term,
    matches,
    parse_query,
    render_query,
    term_frequencies,
)
from .records import (
    ArticleRecord,
    Source,
    from_source_payload,
    make_record,
    normalize_doi,
    normalize_title,
)
from .runner import JobRunner, RunnerConfig, parse_submission
from .service import create_app
from .store import JobStore, export_csv

__version__ = "0.1.0"

__all__ = [
    "And", "ArticleRecord", "ClassificationResult", "ConnectorConfig",
    "DedupReport", "EvaluationReport", "FixtureConnector", "GenerationParams",
    "HarvestJob", "HumanRelevantList", "JobRunner", "JobStatus", "JobStore",
    "Label", "Or", "PageRequest", "PipelineOptions", "QueryDialect",
    "QueryExpr", "QuerySyntaxError", "RunnerConfig", "Source", "SourceConfig",
    "Term", "YearRange", "build_prompt", "classify_batch", "create_app",
    "dedup_by_key", "evaluate", "export_csv", "extract_label",
    "filter_language", "from_source_payload", "human_entry", "list_connectors",
    "load_human_csv", "make_record", "match_entry", "matches", "normalize_doi",
    "normalize_title", "parse_query", "parse_submission", "plan_requests",
    "render_query", "run_harvest", "run_pipeline", "stub_backend",
    "term_frequencies",
]
