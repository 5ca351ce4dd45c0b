"""Pluggable source connectors with pagination, rate control, and retries.

Every connector exposes the same ``fetch_page`` surface. Fixture connectors
replay line-delimited JSON files and are the backend for all reproducible
runs; live connectors are thin HTTP adapters that stay inert until their
API-key environment variables are set. Google Scholar is file-backed only
(no scraping) and provides titles without abstracts.
"""

from __future__ import annotations

import json
import logging
import os
import random
import threading
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Sequence

import httpx

from .records import ArticleRecord, PayloadError, Source, from_source_payload

logger = logging.getLogger(__name__)


class ConnectorError(Exception):
    pass


class AuthError(ConnectorError):
    pass


class RateLimited(ConnectorError):
    pass


class TransportError(ConnectorError):
    pass


class MalformedPayload(ConnectorError):
    """Response body could not be interpreted; keeps the raw body for the job log."""

    def __init__(self, message: str, raw_body: str):
        super().__init__(message)
        self.raw_body = raw_body


class PaginationUnit(str, Enum):
    RECORDS = "records"
    PAGES = "pages"


@dataclass(frozen=True)
class ConnectorSpec:
    source: Source
    provides_abstracts: bool
    pagination_unit: PaginationUnit
    max_records_per_request: int
    rate_limit: float  # max requests per second
    credential_env_names: tuple[str, ...] = ()

    def __post_init__(self):
        if self.source is Source.GOOGLE_SCHOLAR and self.provides_abstracts:
            raise ValueError("the Scholar connector cannot provide abstracts")


SCOPUS_SPEC = ConnectorSpec(
    Source.SCOPUS, True, PaginationUnit.RECORDS, 100, 2.0, ("SCOPUS_API_KEY",)
)
SCIENCEDIRECT_SPEC = ConnectorSpec(
    Source.SCIENCEDIRECT, True, PaginationUnit.RECORDS, 100, 2.0, ("SCIENCEDIRECT_API_KEY",)
)
WOS_SPEC = ConnectorSpec(
    Source.WEB_OF_SCIENCE, True, PaginationUnit.PAGES, 25, 2.0, ("WOS_API_KEY",)
)
GSCHOLAR_SPEC = ConnectorSpec(
    Source.GOOGLE_SCHOLAR, False, PaginationUnit.RECORDS, 20, 1.0
)
FIXTURE_SPECS: dict[Source, ConnectorSpec] = {
    spec.source: spec
    for spec in (
        # Same shapes as the live sources, but unthrottled for test runs.
        ConnectorSpec(Source.SCOPUS, True, PaginationUnit.RECORDS, 100, 1000.0),
        ConnectorSpec(Source.SCIENCEDIRECT, True, PaginationUnit.RECORDS, 100, 1000.0),
        ConnectorSpec(Source.WEB_OF_SCIENCE, True, PaginationUnit.PAGES, 25, 1000.0),
        ConnectorSpec(Source.GOOGLE_SCHOLAR, False, PaginationUnit.RECORDS, 20, 1000.0),
        ConnectorSpec(Source.FIXTURE, True, PaginationUnit.RECORDS, 100, 1000.0),
    )
}

FIXTURE_FILENAMES: dict[Source, str] = {
    Source.SCOPUS: "scopus.jsonl",
    Source.SCIENCEDIRECT: "sciencedirect.jsonl",
    Source.WEB_OF_SCIENCE: "wos.jsonl",
    Source.GOOGLE_SCHOLAR: "gscholar.jsonl",
    Source.FIXTURE: "fixture.jsonl",
}


@dataclass(frozen=True)
class PageRequest:
    query: str
    limit: int
    cursor: str | None = None
    page_index: int | None = None
    year: int | None = None

    def __post_init__(self):
        if self.limit < 1:
            raise ValueError("limit must be positive")
        if self.cursor is not None and self.page_index is not None:
            raise ValueError("use cursor or page_index, not both")
        if self.page_index is not None and self.page_index < 0:
            raise ValueError("page_index must be non-negative")


@dataclass(frozen=True)
class PageResult:
    records: tuple[ArticleRecord, ...]
    next_token: str | None
    total_available: int | None


class TokenBucket:
    """Minimum-spacing limiter: over any window of w seconds it admits at
    most ceil(rate * w) + 1 acquisitions. Thread-safe."""

    def __init__(
        self,
        rate: float,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        if rate <= 0:
            raise ValueError("rate must be positive")
        self._interval = 1.0 / rate
        self._clock = clock
        self._sleep = sleep
        self._next_free = 0.0
        self._lock = threading.Lock()

    def acquire(self) -> None:
        with self._lock:
            now = self._clock()
            start = max(now, self._next_free)
            self._next_free = start + self._interval
            wait = start - now
        if wait > 0:
            self._sleep(wait)


MAX_ATTEMPTS = 3
BACKOFF_BASE = 0.5
BACKOFF_FACTOR = 2.0


class Connector:
    """Shared fetch loop: rate limiting plus retry with full-jitter backoff.

    Subclasses implement ``_fetch``. One instance serves a source; concurrent
    ``fetch_page`` calls are safe and throttle through the shared limiter.
    """

    def __init__(
        self,
        spec: ConnectorSpec,
        *,
        limiter: TokenBucket | None = None,
        sleep: Callable[[float], None] = time.sleep,
        rng: random.Random | None = None,
    ):
        self.spec = spec
        self._limiter = limiter or TokenBucket(spec.rate_limit)
        self._sleep = sleep
        self._rng = rng or random.Random()

    def fetch_page(self, request: PageRequest) -> PageResult:
        self._check_pagination(request)
        for attempt in range(1, MAX_ATTEMPTS + 1):
            self._limiter.acquire()
            try:
                return self._fetch(request)
            except (TransportError, RateLimited) as exc:
                if attempt == MAX_ATTEMPTS:
                    raise
                delay = self._rng.uniform(
                    0, BACKOFF_BASE * BACKOFF_FACTOR ** (attempt - 1)
                )
                logger.debug(
                    "%s fetch attempt %d failed (%s); retrying in %.2fs",
                    self.spec.source.value, attempt, exc, delay,
                )
                self._sleep(delay)
        raise AssertionError("unreachable")

    def _check_pagination(self, request: PageRequest) -> None:
        if self.spec.pagination_unit is PaginationUnit.PAGES:
            if request.page_index is None:
                raise ValueError(f"{self.spec.source.value} paginates by page_index")
        elif request.page_index is not None:
            raise ValueError(f"{self.spec.source.value} paginates by cursor")

    def _fetch(self, request: PageRequest) -> PageResult:
        raise NotImplementedError


class FixtureConnector(Connector):
    """Deterministic file- or list-backed connector used for all tests.

    ``fail_times`` scripts transient failures: the first N fetches raise
    TransportError, exercising the retry path without a network.
    """

    def __init__(
        self,
        source: Source,
        *,
        path: Path | None = None,
        records: Sequence[ArticleRecord] | None = None,
        fail_times: int = 0,
        always_fail: bool = False,
        spec: ConnectorSpec | None = None,
        **kwargs: Any,
    ):
        super().__init__(spec or FIXTURE_SPECS[source], **kwargs)
        self._path = path
        self._records = tuple(records) if records is not None else None
        self._fail_times = fail_times
        self._always_fail = always_fail
        self._load_lock = threading.Lock()

    def _load(self) -> tuple[ArticleRecord, ...]:
        with self._load_lock:
            if self._records is None:
                loaded: list[ArticleRecord] = []
                if self._path is not None and self._path.exists():
                    for line_no, line in enumerate(
                        self._path.read_text(encoding="utf-8").splitlines(), 1
                    ):
                        if not line.strip():
                            continue
                        try:
                            payload = json.loads(line)
                        except json.JSONDecodeError as exc:
                            raise MalformedPayload(
                                f"{self._path.name}:{line_no}: invalid record line",
                                raw_body=line,
                            ) from exc
                        try:
                            loaded.append(from_source_payload(self.spec.source, payload))
                        except PayloadError as exc:
                            raise MalformedPayload(
                                f"{self._path.name}:{line_no}: {exc.reason}",
                                raw_body=line,
                            ) from exc
                self._records = tuple(loaded)
            return self._records

    def _fetch(self, request: PageRequest) -> PageResult:
        if self._always_fail:
            raise TransportError("scripted permanent failure")
        if self._fail_times > 0:
            self._fail_times -= 1
            raise TransportError("scripted transient failure")

        records = self._load()
        if request.year is not None:
            records = tuple(r for r in records if r.year == request.year)
        total = len(records)
        size = min(request.limit, self.spec.max_records_per_request)
        if self.spec.pagination_unit is PaginationUnit.PAGES:
            page_size = self.spec.max_records_per_request
            offset = request.page_index * page_size
            chunk = records[offset : offset + min(size, page_size)]
            exhausted = offset + len(chunk) >= total
            next_token = None if exhausted else str(request.page_index + 1)
        else:
            offset = int(request.cursor) if request.cursor else 0
            chunk = records[offset : offset + size]
            exhausted = offset + len(chunk) >= total
            next_token = None if exhausted else str(offset + len(chunk))
        return PageResult(records=chunk, next_token=next_token, total_available=total)


def _raise_for_status(source: Source, response: httpx.Response) -> None:
    if response.status_code in (401, 403):
        raise AuthError(f"{source.value}: credentials rejected ({response.status_code})")
    if response.status_code == 429:
        raise RateLimited(f"{source.value}: throttled by server")
    if response.status_code >= 400:
        raise TransportError(f"{source.value}: HTTP {response.status_code}")


class ElsevierConnector(Connector):
    """Adapter for the Elsevier search APIs (Scopus and ScienceDirect)."""

    base_urls = {
        Source.SCOPUS: "https://api.elsevier.com/content/search/scopus",
        Source.SCIENCEDIRECT: "https://api.elsevier.com/content/search/sciencedirect",
    }

    def __init__(self, spec: ConnectorSpec, api_key: str | None, client: httpx.Client | None = None, **kwargs: Any):
        super().__init__(spec, **kwargs)
        self._api_key = api_key
        self._client = client or httpx.Client(timeout=30.0)

    def _fetch(self, request: PageRequest) -> PageResult:
        if not self._api_key:
            raise AuthError(
                f"{self.spec.source.value}: set {self.spec.credential_env_names[0]}"
            )
        query = request.query
        if request.year is not None:
            query = f"{query} AND PUBYEAR = {request.year}"
        params = {
            "query": query,
            "apiKey": self._api_key,
            "count": str(min(request.limit, self.spec.max_records_per_request)),
            "start": request.cursor or "0",
        }
        try:
            response = self._client.get(self.base_urls[self.spec.source], params=params)
        except httpx.HTTPError as exc:
            raise TransportError(f"{self.spec.source.value}: {exc}") from exc
        _raise_for_status(self.spec.source, response)
        try:
            body = response.json()["search-results"]
            entries = body.get("entry", [])
            total = int(body["opensearch:totalResults"])
        except (KeyError, ValueError, json.JSONDecodeError) as exc:
            raise MalformedPayload(
                f"{self.spec.source.value}: unexpected response shape",
                raw_body=response.text,
            ) from exc
        records = tuple(
            from_source_payload(self.spec.source, entry) for entry in entries
        )
        offset = int(request.cursor or 0)
        exhausted = not records or offset + len(records) >= total
        return PageResult(
            records=records,
            next_token=None if exhausted else str(offset + len(records)),
            total_available=total,
        )


class WosConnector(Connector):
    """Adapter for the Clarivate Web of Science search API (page-based)."""

    base_url = "https://wos-api.clarivate.com/api/wos"

    def __init__(self, api_key: str | None, client: httpx.Client | None = None, **kwargs: Any):
        super().__init__(WOS_SPEC, **kwargs)
        self._api_key = api_key
        self._client = client or httpx.Client(timeout=30.0)

    def _fetch(self, request: PageRequest) -> PageResult:
        if not self._api_key:
            raise AuthError(f"wos: set {WOS_SPEC.credential_env_names[0]}")
        query = request.query
        if request.year is not None:
            query = f"{query} AND PY=({request.year})"
        page_size = self.spec.max_records_per_request
        params = {
            "databaseId": "WOS",
            "usrQuery": query,
            "count": str(page_size),
            "firstRecord": str(request.page_index * page_size + 1),
        }
        try:
            response = self._client.get(
                self.base_url, params=params, headers={"X-ApiKey": self._api_key}
            )
        except httpx.HTTPError as exc:
            raise TransportError(f"wos: {exc}") from exc
        _raise_for_status(Source.WEB_OF_SCIENCE, response)
        try:
            body = response.json()
            total = int(body["QueryResult"]["RecordsFound"])
            raw_records = body["Data"]["Records"]
        except (KeyError, ValueError, json.JSONDecodeError) as exc:
            raise MalformedPayload("wos: unexpected response shape", raw_body=response.text) from exc
        records = tuple(
            from_source_payload(Source.WEB_OF_SCIENCE, raw) for raw in raw_records
        )
        offset = request.page_index * page_size
        exhausted = not records or offset + len(records) >= total
        return PageResult(
            records=records,
            next_token=None if exhausted else str(request.page_index + 1),
            total_available=total,
        )


@dataclass(frozen=True)
class ConnectorConfig:
    scopus_api_key: str | None = None
    sciencedirect_api_key: str | None = None
    wos_api_key: str | None = None
    fixtures_dir: Path | None = None

    @classmethod
    def from_env(cls, fixtures_dir: Path | None = None) -> "ConnectorConfig":
        return cls(
            scopus_api_key=os.environ.get("SCOPUS_API_KEY"),
            sciencedirect_api_key=os.environ.get("SCIENCEDIRECT_API_KEY"),
            wos_api_key=os.environ.get("WOS_API_KEY"),
            fixtures_dir=fixtures_dir,
        )


def list_connectors(config: ConnectorConfig) -> list[ConnectorSpec]:
    """Available connector specs, live credentialed sources first, then the
    fixture-backed ones, in a fixed order."""
    specs: list[ConnectorSpec] = []
    if config.scopus_api_key:
        specs.append(SCOPUS_SPEC)
    if config.sciencedirect_api_key:
        specs.append(SCIENCEDIRECT_SPEC)
    if config.wos_api_key:
        specs.append(WOS_SPEC)
    specs.extend(
        FIXTURE_SPECS[source]
        for source in (
            Source.SCOPUS,
            Source.SCIENCEDIRECT,
            Source.WEB_OF_SCIENCE,
            Source.GOOGLE_SCHOLAR,
            Source.FIXTURE,
        )
    )
    return specs


def build_connectors(config: ConnectorConfig) -> dict[Source, Connector]:
    """One connector instance per source.

    With a fixtures directory every source replays its fixture file
    (reproducible mode); otherwise the credentialed live adapters are used.
    Google Scholar is always file-backed.
    """
    connectors: dict[Source, Connector] = {}
    if config.fixtures_dir is not None:
        for source, filename in FIXTURE_FILENAMES.items():
            connectors[source] = FixtureConnector(
                source, path=config.fixtures_dir / filename
            )
        return connectors

    connectors[Source.SCOPUS] = ElsevierConnector(SCOPUS_SPEC, config.scopus_api_key)
    connectors[Source.SCIENCEDIRECT] = ElsevierConnector(
        SCIENCEDIRECT_SPEC, config.sciencedirect_api_key
    )
    connectors[Source.WEB_OF_SCIENCE] = WosConnector(config.wos_api_key)
    connectors[Source.GOOGLE_SCHOLAR] = FixtureConnector(Source.GOOGLE_SCHOLAR)
    return connectors
