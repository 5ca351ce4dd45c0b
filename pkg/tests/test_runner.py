from __future__ import annotations

import pytest

from litharvest.classify import GenerationResponse
from litharvest.connectors import FixtureConnector
from litharvest.harvest import JobStatus, ValidationError
from litharvest.records import Source
from litharvest.runner import JobRunner, RunnerConfig, parse_submission
from litharvest.store import AliasConflict

GHANA_QUERY = (
    "Ghana AND (Nutrient OR Fertilization OR Fertilizer OR Rates OR Doses OR "
    "Nitrogen OR Phosphorus OR Potassium OR Sulfur OR Sulphur) AND Yield"
)


def demo_body(alias="demo", **overrides):
    body = {
        "alias": alias,
        "query": GHANA_QUERY,
        "scopus": {"enabled": True, "max": 5000},
        "sciencedirect": {"enabled": True, "max": 5000},
        "wos": {"enabled": True, "pages": 2},
        "gscholar": {"enabled": True, "max": 1000},
    }
    body.update(overrides)
    return body


@pytest.fixture
def runner(tmp_path, demo_fixtures_dir):
    r = JobRunner(RunnerConfig(data_dir=tmp_path / "data", fixtures_dir=demo_fixtures_dir))
    yield r
    r.shutdown()


# ----------------------------------------------------------- parse_submission


def test_parse_submission_defaults():
    job = parse_submission({"alias": "a1", "query": "nitrogen AND yield"})
    assert job.source_configs[Source.SCOPUS].enabled
    assert job.source_configs[Source.SCOPUS].record_limit == 5000
    assert job.source_configs[Source.WEB_OF_SCIENCE].page_count == 10
    assert not job.source_configs[Source.GOOGLE_SCHOLAR].enabled
    assert job.year_range is None


@pytest.mark.parametrize(
    "body,field",
    [
        ({"query": "x"}, "alias"),
        ({"alias": "a", "query": ""}, "query"),
        ({"alias": "a", "query": "x AND"}, "query"),
        ({"alias": "a", "query": "x", "scopus": {"max": 5001}}, "scopus.max"),
        ({"alias": "a", "query": "x", "scopus": {"max": "many"}}, "scopus.max"),
        ({"alias": "a", "query": "x", "wos": {"pages": 101}}, "wos.pages"),
        ({"alias": "a", "query": "x", "wos": {"pages": -1}}, "wos.pages"),
        ({"alias": "a", "query": "x", "gscholar": {"enabled": "yes"}}, "gscholar.enabled"),
        ({"alias": "a", "query": "x", "year_from": 2020}, "year_range"),
        ({"alias": "bad alias", "query": "x"}, "alias"),
    ],
)
def test_parse_submission_field_errors(body, field):
    with pytest.raises(ValidationError) as excinfo:
        parse_submission(body)
    assert excinfo.value.field == field


def test_parse_submission_year_range():
    job = parse_submission(
        {"alias": "a", "query": "x", "year_from": 2019, "year_to": 2021}
    )
    assert job.year_range.start == 2019
    assert job.year_range.end == 2021


# -------------------------------------------------------------- staged flow


def test_full_run_progresses_to_done(runner):
    manifest, future = runner.submit(demo_body())
    assert manifest.alias == "demo"
    future.result(timeout=30)
    doc = runner.status_document("demo")
    assert doc["status"] == "done"
    assert doc["counters"]["sources"] == {
        "scopus": 24, "sciencedirect": 12, "wos": 10, "gscholar": 8,
    }
    assert doc["counters"]["clean"] == 44
    assert doc["finished_at"] is not None
    assert doc["dedup_report"]["final_count"] == 44
    assert doc["model_id"] == "stub-keyword-v1"
    assert doc["template_id"] == "kwfreq-v1"


def test_staged_execution_matches_async_run(runner):
    job = parse_submission(demo_body(alias="staged"))
    manifest = runner.create(job)
    total = runner.collect(job, manifest)
    assert total == 54
    assert job.status is JobStatus.FILTERING
    clean, report = runner.filter(job, manifest)
    assert job.status is JobStatus.CLASSIFYING
    assert report.final_count == len(clean) == 44
    results = runner.classify(job, manifest)
    assert job.status is JobStatus.DONE
    assert len(results) == 44
    assert runner.store.load_csv("staged") == runner.store.load_csv("staged")


def test_stage_preconditions_enforced(runner):
    job = parse_submission(demo_body(alias="ooo"))
    manifest = runner.create(job)
    with pytest.raises(ValueError, match="not ready to filter"):
        runner.filter(job, manifest)
    with pytest.raises(ValueError, match="not ready to classify"):
        runner.classify(job, manifest)


def test_submit_duplicate_alias_never_double_runs(runner):
    _, future = runner.submit(demo_body(alias="once"))
    future.result(timeout=30)
    with pytest.raises(AliasConflict):
        runner.submit(demo_body(alias="once"))


def test_all_sources_failing_marks_job_failed(tmp_path, demo_fixtures_dir):
    connectors = {
        source: FixtureConnector(source, records=[], always_fail=True, sleep=lambda s: None)
        for source in Source
    }
    runner = JobRunner(
        RunnerConfig(data_dir=tmp_path, fixtures_dir=demo_fixtures_dir),
        connectors=connectors,
    )
    _, future = runner.submit(demo_body(alias="doomed"))
    future.result(timeout=30)
    doc = runner.status_document("doomed")
    assert doc["status"] == "failed"
    assert doc["warnings"]
    runner.shutdown()


def test_partial_source_failure_warns_but_completes(tmp_path, demo_fixtures_dir):
    from litharvest.connectors import FIXTURE_FILENAMES, build_connectors, ConnectorConfig

    connectors = dict(
        build_connectors(ConnectorConfig(fixtures_dir=demo_fixtures_dir))
    )
    connectors[Source.WEB_OF_SCIENCE] = FixtureConnector(
        Source.WEB_OF_SCIENCE, records=[], always_fail=True, sleep=lambda s: None
    )
    runner = JobRunner(
        RunnerConfig(data_dir=tmp_path, fixtures_dir=demo_fixtures_dir),
        connectors=connectors,
    )
    _, future = runner.submit(demo_body(alias="partial"))
    future.result(timeout=30)
    doc = runner.status_document("partial")
    assert doc["status"] == "done"
    assert doc["counters"]["sources"]["wos"] == 0
    assert any("wos" in w for w in doc["warnings"])
    runner.shutdown()


def test_injected_backend_is_used(tmp_path, demo_fixtures_dir):
    class AlwaysRelevant:
        def generate(self, prompt, params):
            return GenerationResponse("Relevant", "injected-model")

    runner = JobRunner(
        RunnerConfig(data_dir=tmp_path, fixtures_dir=demo_fixtures_dir),
        backend_factory=lambda job: AlwaysRelevant(),
    )
    _, future = runner.submit(demo_body(alias="injected"))
    future.result(timeout=30)
    doc = runner.status_document("injected")
    assert doc["model_id"] == "injected-model"
    assert doc["counters"]["relevant"] == 44
    runner.shutdown()


def test_evaluate_requires_done(runner):
    from litharvest.evaluate import load_human_csv

    job = parse_submission(demo_body(alias="pending-job"))
    runner.create(job)
    human = load_human_csv("doi,title\n10.1/x,\n", label="x")
    with pytest.raises(ValueError, match="not done"):
        runner.evaluate_job("pending-job", human)


def test_evaluate_job_on_demo_corpus(runner, demo_fixtures_dir):
    from litharvest.evaluate import load_human_csv

    _, future = runner.submit(demo_body(alias="eval-me"))
    future.result(timeout=30)
    human = load_human_csv(
        (demo_fixtures_dir / "human_relevant.csv").read_text(encoding="utf-8"),
        label="demo-list",
    )
    report = runner.evaluate_job("eval-me", human)
    assert report.human_relevant == 6
    assert report.intersection_ht == 4
    assert report.intersection_hm == 3
    assert report.missed == 2
    assert report.overlap_display == "75.00"
