"""Command-line interface composing the same internals as the HTTP layer.

A dataset is built in stages that can be run separately:

    litharvest harvest  --alias ghana --query "Ghana AND (Nutrient OR Yield)"
    litharvest filter   --job ghana
    litharvest classify --job ghana
    litharvest export   --job ghana -o ghana.csv
    litharvest evaluate --job ghana --human curated.csv
    litharvest serve    --port 8000
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .evaluate import MalformedHumanList, format_report_row, load_human_csv
from .filtering import PipelineOptions, format_report_table
from .harvest import HarvestFailed, ValidationError
from .runner import JobRunner, RunnerConfig, parse_submission
from .store import AliasConflict, JobNotFound


def _runner(ctx: click.Context) -> JobRunner:
    return JobRunner(ctx.obj)


def _fail(message: str) -> "click.ClickException":
    return click.ClickException(message)


@click.group()
@click.option(
    "--data-dir",
    envvar="DATA_DIR",
    default="data",
    type=click.Path(path_type=Path),
    help="Job store root (env: DATA_DIR).",
)
@click.option(
    "--fixtures-dir",
    envvar="FIXTURES_DIR",
    default=None,
    type=click.Path(path_type=Path),
    help="Replay line-delimited fixture files instead of live APIs.",
)
@click.pass_context
def main(ctx: click.Context, data_dir: Path, fixtures_dir: Path | None):
    """Harvest, clean, screen, and export scholarly literature datasets."""
    ctx.obj = RunnerConfig(data_dir=data_dir, fixtures_dir=fixtures_dir)


@main.command()
@click.option("--alias", "-a", required=True, help="Unique name for this dataset.")
@click.option("--query", "-q", required=True, help="Boolean keyword query.")
@click.option("--scopus-max", default=5000, show_default=True)
@click.option("--sciencedirect-max", default=5000, show_default=True)
@click.option("--wos-pages", default=10, show_default=True)
@click.option("--gscholar/--no-gscholar", default=False, show_default=True,
              help="Include Google Scholar (titles only, classified by title).")
@click.option("--gscholar-max", default=1000, show_default=True)
@click.option("--year-from", type=int, default=None)
@click.option("--year-to", type=int, default=None)
@click.option("--concurrency", default=8, show_default=True)
@click.pass_context
def harvest(ctx, alias, query, scopus_max, sciencedirect_max, wos_pages,
            gscholar, gscholar_max, year_from, year_to, concurrency):
    """Collect records from all enabled sources concurrently."""
    body = {
        "alias": alias,
        "query": query,
        "scopus": {"enabled": True, "max": scopus_max},
        "sciencedirect": {"enabled": True, "max": sciencedirect_max},
        "wos": {"enabled": True, "pages": wos_pages},
        "gscholar": {"enabled": gscholar, "max": gscholar_max},
        "year_from": year_from,
        "year_to": year_to,
    }
    if year_from is None and year_to is None:
        body.pop("year_from")
        body.pop("year_to")
    config = ctx.obj
    config.concurrency_limit = concurrency
    runner = JobRunner(config)
    try:
        job = parse_submission(body)
        manifest = runner.create(job)
        total = runner.collect(job, manifest)
    except ValidationError as exc:
        raise _fail(f"{exc.field}: {exc}") from exc
    except AliasConflict as exc:
        raise _fail(str(exc)) from exc
    except HarvestFailed as exc:
        for warning in exc.warnings:
            click.echo(f"warning: {warning}", err=True)
        raise _fail("collection failed for every enabled source") from exc
    for source, count in job.counters.get("sources", {}).items():
        click.echo(f"{source:>14}: {count:,}")
    for warning in manifest.warnings:
        click.echo(f"warning: {warning}", err=True)
    click.echo(f"collected {total:,} records into job '{alias}'")


@main.command("filter")
@click.option("--job", "-j", "alias", required=True)
@click.option("--dedup-urls", is_flag=True, default=False,
              help="Also deduplicate on exact URLs (off by default).")
@click.pass_context
def filter_cmd(ctx, alias, dedup_urls):
    """Deduplicate and language-filter a collected job."""
    config = ctx.obj
    config.pipeline_options = PipelineOptions(dedup_urls=dedup_urls)
    runner = JobRunner(config)
    try:
        manifest = runner.store.load_manifest(alias)
        job = manifest.to_job()
        _clean, report = runner.filter(job, manifest)
    except (JobNotFound, ValueError) as exc:
        raise _fail(str(exc)) from exc
    click.echo(format_report_table(report))


@main.command()
@click.option("--job", "-j", "alias", required=True)
@click.option("--endpoint", default=None,
              help="Text-generation endpoint URL (default: GEN_ENDPOINT env, else the keyword stub).")
@click.option("--parallelism", default=4, show_default=True)
@click.pass_context
def classify(ctx, alias, endpoint, parallelism):
    """Screen cleaned records for relevance to the job's query."""
    config = ctx.obj
    config.gen_endpoint = endpoint
    config.classifier_parallelism = parallelism
    runner = JobRunner(config)
    try:
        manifest = runner.store.load_manifest(alias)
        job = manifest.to_job()
        results = runner.classify(job, manifest)
    except (JobNotFound, ValueError) as exc:
        raise _fail(str(exc)) from exc
    relevant = sum(1 for r in results if r.label.value == "relevant")
    unknown = sum(1 for r in results if r.label.value == "unknown")
    click.echo(
        f"classified {len(results)} records: {relevant} relevant, "
        f"{len(results) - relevant - unknown} irrelevant, {unknown} unknown"
    )


@main.command()
@click.option("--job", "-j", "alias", required=True)
@click.option("--human", "human_path", required=True,
              type=click.Path(exists=True, path_type=Path),
              help="Curated relevant list (CSV with doi,title columns).")
@click.option("--label", default=None, help="Name for the curated list (default: job alias).")
@click.pass_context
def evaluate(ctx, alias, human_path, label):
    """Compare screening output against an expert-curated relevant list."""
    runner = _runner(ctx)
    try:
        human = load_human_csv(
            human_path.read_text(encoding="utf-8"), label=label or alias
        )
        report = runner.evaluate_job(alias, human)
    except (JobNotFound, MalformedHumanList, ValueError) as exc:
        raise _fail(str(exc)) from exc
    click.echo(format_report_row(report))
    if report.overlap_note:
        click.echo(f"note: {report.overlap_note}")


@main.command()
@click.option("--job", "-j", "alias", required=True)
@click.option("--output", "-o", type=click.Path(path_type=Path), default=None,
              help="Write the CSV here (default: stdout).")
@click.pass_context
def export(ctx, alias, output):
    """Write a job's final dataset as CSV."""
    runner = _runner(ctx)
    try:
        data = runner.store.load_csv(alias)
    except JobNotFound as exc:
        raise _fail(str(exc)) from exc
    if output is None:
        sys.stdout.buffer.write(data)
    else:
        output.write_bytes(data)
        click.echo(f"wrote {output}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", envvar="PORT", default=8000, show_default=True)
@click.pass_context
def serve(ctx, host, port):
    """Run the HTTP API for the dashboard."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(ctx.obj), host=host, port=port)


if __name__ == "__main__":
    main()
