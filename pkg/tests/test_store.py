from __future__ import annotations

import json
import os

import pytest

from litharvest.classify import ClassificationResult, Label
from litharvest.filtering import run_pipeline
from litharvest.harvest import HarvestJob, JobStatus, SourceConfig, YearRange
from litharvest.query import parse_query
from litharvest.records import Source, make_record
from litharvest.store import (
    AliasConflict,
    CSV_HEADER,
    JobManifest,
    JobNotFound,
    JobStore,
    StoreError,
    export_csv,
)

# --------------------------------------------------------------- export_csv


def labeled(record, label=Label.RELEVANT, model="stub-keyword-v1"):
    return ClassificationResult(
        record=record,
        label=label,
        raw_output=label.value.capitalize(),
        model_id=model,
        prompt_digest="0" * 64,
        attempts=1,
    )


def three_record_fixture():
    first = make_record(
        Source.SCOPUS,
        "Nitrogen use efficiency, revisited",
        source_record_id="SCOPUS_ID:1",
        doi="10.1016/j.fcr.2020.1",
        abstract='Discusses "NUE" metrics across trials.',
        authors=["Mensah, K.", "Osei, A."],
        year=2020,
        url="https://example.org/nue",
        language="en",
    )
    second = make_record(
        Source.GOOGLE_SCHOLAR,
        "Millet yield under drought",
        abstract="Line one\nLine two",
        authors=["Fatou Ba"],
        language="und",
    )
    third = make_record(
        Source.WEB_OF_SCIENCE,
        "Sorghum trials",
        source_record_id="WOS:9",
        doi="10.9/x",
        abstract="Plain text.",
        year=1999,
        language="en",
    )
    results = [labeled(first), None, labeled(third, Label.IRRELEVANT)]
    return [first, second, third], results


# Hand-derived from the documented CSV rules: quote on comma/quote/newline,
# double embedded quotes, empty string for absent values.
EXPECTED_3RECORD_CSV = (
    "title,authors,year,doi,url,abstract,source,source_record_id,language,relevance,model_id\n"
    '"Nitrogen use efficiency, revisited","Mensah, K.; Osei, A.",2020,'
    "10.1016/j.fcr.2020.1,https://example.org/nue,"
    '"Discusses ""NUE"" metrics across trials.",scopus,SCOPUS_ID:1,en,relevant,stub-keyword-v1\n'
    'Millet yield under drought,Fatou Ba,,,,"Line one\nLine two",gscholar,,und,,\n'
    "Sorghum trials,,1999,10.9/x,,Plain text.,wos,WOS:9,en,irrelevant,stub-keyword-v1\n"
)


def test_export_empty_is_header_only():
    assert export_csv([]) == (",".join(CSV_HEADER) + "\n").encode()


def test_export_three_record_golden_bytes(golden_dir):
    records, results = three_record_fixture()
    data = export_csv(records, results)
    assert data == EXPECTED_3RECORD_CSV.encode("utf-8")
    frozen = (golden_dir / "export_3records.csv").read_bytes()
    assert data == frozen


def test_export_byte_stable():
    records, results = three_record_fixture()
    assert export_csv(records, results) == export_csv(records, results)


def test_export_title_with_comma_is_quoted():
    record = make_record(Source.SCOPUS, "One, two")
    line = export_csv([record]).decode().splitlines()[1]
    assert line.startswith('"One, two"')


def test_export_without_results_leaves_label_columns_empty():
    record = make_record(Source.SCOPUS, "Plain")
    line = export_csv([record]).decode().splitlines()[1]
    assert line.endswith(",,")


def test_export_results_length_mismatch():
    record = make_record(Source.SCOPUS, "Plain")
    with pytest.raises(ValueError):
        export_csv([record], [])


# ------------------------------------------------------------------ manifest


def sample_job(alias="job-1"):
    return HarvestJob(
        alias=alias,
        query=parse_query("nitrogen AND (yield OR harvest)"),
        source_configs={
            Source.SCOPUS: SourceConfig(enabled=True, record_limit=5000),
            Source.WEB_OF_SCIENCE: SourceConfig(enabled=True, page_count=10),
            Source.GOOGLE_SCHOLAR: SourceConfig(enabled=False, record_limit=1000),
        },
        year_range=YearRange(2018, 2020),
    )


def test_manifest_job_round_trip():
    job = sample_job()
    job.counters = {"sources": {"scopus": 12}}
    manifest = JobManifest.from_job(job)
    rebuilt = manifest.to_job()
    assert rebuilt.alias == job.alias
    assert rebuilt.query == job.query
    assert rebuilt.source_configs == job.source_configs
    assert rebuilt.year_range == job.year_range
    assert rebuilt.counters == job.counters


def test_manifest_dict_round_trip():
    manifest = JobManifest.from_job(sample_job())
    assert JobManifest.from_dict(manifest.to_dict()) == manifest


# --------------------------------------------------------------------- store


def stored_records(n=4):
    return [
        make_record(
            Source.SCOPUS,
            f"Stored article {i}",
            source_record_id=f"S{i}",
            doi=f"10.5/s{i}",
            abstract="The experiment quantified the yield response to nitrogen rates.",
            authors=[f"Author {i}"],
            year=2015 + i,
        )
        for i in range(n)
    ]


def test_create_and_round_trip(tmp_path):
    store = JobStore(tmp_path)
    manifest = JobManifest.from_job(sample_job())
    store.create(manifest)

    records = stored_records()
    clean, report = run_pipeline(records)
    results = [labeled(r) for r in clean]
    manifest.status = JobStatus.DONE
    store.save_job(
        manifest,
        records=records,
        clean_records=clean,
        dedup_report=report,
        classifications=results,
        csv_bytes=export_csv(clean, results),
    )

    assert store.load_records("job-1") == records
    assert store.load_clean_records("job-1") == clean
    assert store.load_dedup_report("job-1") == report
    assert store.load_classifications("job-1") == results
    assert store.load_csv("job-1") == export_csv(clean, results)
    loaded = store.load_manifest("job-1")
    assert loaded.status is JobStatus.DONE
    assert set(loaded.files) >= {
        "records.jsonl", "clean_records.jsonl", "dedup_report.json",
        "classifications.jsonl", "export.csv",
    }


def test_duplicate_alias_conflicts(tmp_path):
    store = JobStore(tmp_path)
    store.create(JobManifest.from_job(sample_job()))
    with pytest.raises(AliasConflict):
        store.create(JobManifest.from_job(sample_job()))


def test_unknown_alias_raises(tmp_path):
    store = JobStore(tmp_path)
    with pytest.raises(JobNotFound):
        store.load_manifest("ghost")
    with pytest.raises(JobNotFound):
        store.save_job(JobManifest.from_job(sample_job(alias="ghost")))


def test_crash_between_temp_write_and_rename_preserves_state(tmp_path, monkeypatch):
    store = JobStore(tmp_path)
    manifest = JobManifest.from_job(sample_job())
    store.create(manifest)
    records = stored_records()
    store.save_job(manifest, records=records)

    real_replace = os.replace

    def exploding_replace(src, dst):
        if str(dst).endswith("manifest.json"):
            raise OSError("simulated crash")
        return real_replace(src, dst)

    manifest.status = JobStatus.DONE
    monkeypatch.setattr("litharvest.store.os.replace", exploding_replace)
    with pytest.raises(StoreError):
        store.save_job(manifest, records=stored_records(2))
    monkeypatch.undo()

    # The manifest rename never happened, so the stored status is unchanged;
    # the store stays readable and internally consistent.
    reloaded = store.load_manifest("job-1")
    assert reloaded.status is JobStatus.PENDING


def test_list_jobs_newest_first(tmp_path):
    store = JobStore(tmp_path)
    old = JobManifest.from_job(sample_job("older"))
    old.created_at = "2024-01-01T00:00:00+00:00"
    new = JobManifest.from_job(sample_job("newer"))
    new.created_at = "2025-01-01T00:00:00+00:00"
    store.create(old)
    store.create(new)
    assert [s.alias for s in store.list_jobs()] == ["newer", "older"]


def test_list_jobs_empty(tmp_path):
    assert JobStore(tmp_path).list_jobs() == []


def test_list_jobs_reports_corrupted_manifest(tmp_path):
    store = JobStore(tmp_path)
    store.create(JobManifest.from_job(sample_job("good")))
    bad_dir = tmp_path / "broken"
    bad_dir.mkdir()
    (bad_dir / "manifest.json").write_text("{not json", encoding="utf-8")

    summaries = {s.alias: s for s in store.list_jobs()}
    assert summaries["good"].warning is None
    assert summaries["broken"].status is JobStatus.FAILED
    assert "unreadable" in summaries["broken"].warning


def test_manifest_is_commit_point(tmp_path):
    # Artifacts write before the manifest, so a reader that sees the new
    # manifest also sees the files it inventories.
    store = JobStore(tmp_path)
    manifest = JobManifest.from_job(sample_job())
    store.create(manifest)
    store.save_job(manifest, records=stored_records())
    listed = json.loads(
        (tmp_path / "job-1" / "manifest.json").read_text(encoding="utf-8")
    )["files"]
    assert "records.jsonl" in listed
