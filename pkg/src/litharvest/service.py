"""HTTP facade over the job runner for the dashboard and scripts.

Endpoints (all under /api):
    POST /api/jobs                 submit a harvest job, runs asynchronously
    GET  /api/jobs                 list stored jobs, newest first
    GET  /api/jobs/{alias}         status document with live counters
    GET  /api/jobs/{alias}/download  final dataset as a CSV attachment
    POST /api/evaluate             overlap-accuracy report for a done job

Error bodies always carry a machine-readable ``code`` plus a human
``message`` (and ``field`` for validation problems). Repeated GETs never
mutate state; resubmitting an alias conflicts instead of double-running.
"""

from __future__ import annotations

from typing import Any

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response

from .evaluate import MalformedHumanList, load_human_csv
from .harvest import JobStatus, ValidationError
from .runner import JobRunner, RunnerConfig
from .store import AliasConflict, JobNotFound


def _error(status_code: int, code: str, message: str, field: str | None = None) -> JSONResponse:
    body: dict[str, Any] = {"code": code, "message": message}
    if field is not None:
        body["field"] = field
    return JSONResponse(status_code=status_code, content=body)


def create_app(config: RunnerConfig, runner: JobRunner | None = None) -> FastAPI:
    app = FastAPI(title="litharvest", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.runner = runner or JobRunner(config)

    def get_runner() -> JobRunner:
        return app.state.runner

    @app.post("/api/jobs", status_code=201)
    async def create_job(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _error(400, "bad_request", "request body must be JSON")
        try:
            manifest, _future = get_runner().submit(body)
        except ValidationError as exc:
            return _error(400, "validation", str(exc), field=exc.field)
        except AliasConflict as exc:
            return _error(409, "alias_conflict", str(exc))
        return {"alias": manifest.alias, "status": manifest.status.value}

    @app.get("/api/jobs")
    def list_jobs():
        summaries = get_runner().store.list_jobs()
        return {
            "jobs": [
                {
                    "alias": s.alias,
                    "status": s.status.value,
                    "created_at": s.created_at,
                    "finished_at": s.finished_at,
                    "warning": s.warning,
                }
                for s in summaries
            ]
        }

    @app.get("/api/jobs/{alias}")
    def get_job(alias: str):
        try:
            return get_runner().status_document(alias)
        except JobNotFound as exc:
            return _error(404, "not_found", str(exc))

    @app.get("/api/jobs/{alias}/download")
    def download(alias: str):
        runner = get_runner()
        try:
            manifest = runner.store.load_manifest(alias)
        except JobNotFound as exc:
            return _error(404, "not_found", str(exc))
        if manifest.status is not JobStatus.DONE:
            return _error(
                409, "not_done",
                f"job {alias} is not done yet ({manifest.status.value})",
            )
        try:
            data = runner.store.load_csv(alias)
        except JobNotFound as exc:
            return _error(404, "not_found", str(exc))
        return Response(
            content=data,
            media_type="text/csv; charset=utf-8",
            headers={"Content-Disposition": f'attachment; filename="{alias}.csv"'},
        )

    @app.post("/api/evaluate")
    async def evaluate_endpoint(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _error(400, "bad_request", "request body must be JSON")
        alias = body.get("alias")
        human_csv = body.get("human_csv")
        if not isinstance(alias, str) or not alias:
            return _error(400, "validation", "alias is required", field="alias")
        if not isinstance(human_csv, str):
            return _error(400, "validation", "human_csv is required", field="human_csv")
        label = body.get("label") or alias
        runner = get_runner()
        try:
            human = load_human_csv(human_csv, label=label)
        except MalformedHumanList as exc:
            return _error(400, "malformed_human_csv", str(exc), field="human_csv")
        try:
            report = runner.evaluate_job(alias, human)
        except JobNotFound as exc:
            return _error(404, "not_found", str(exc))
        except ValueError as exc:
            return _error(409, "not_done", str(exc))
        return report.to_dict()

    return app
