"""Zero-shot relevance screening through a narrow text-generation contract.

The prompt is a fixed, versioned template: the research query, per-keyword
occurrence counts in the text being screened (domain experts treat keyword
frequency as a relevance signal), the abstract (or title when the source
provides no abstracts), and a one-word answer constraint. Any backend that
accepts {prompt, generation params} and returns {generated_text, model_id}
can sit behind it; a deterministic keyword-rule stub ships for tests and
offline runs.
"""

from __future__ import annotations

import hashlib
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Protocol, Sequence

import httpx

from .query import QueryExpr, iter_terms, matches, render_query, term_frequencies
from .records import ArticleRecord

TEMPLATE_ID = "kwfreq-v1"
STUB_MODEL_ID = "stub-keyword-v1"

DEFAULT_GEN_ENDPOINT_VAR = "GEN_ENDPOINT"


class ClassifierError(Exception):
    pass


class MissingText(ClassifierError):
    """Record has neither abstract nor title; guards corrupted stores."""


class BackendUnavailable(ClassifierError):
    """The generation backend cannot be reached at all."""


class GenerationTransportError(ClassifierError):
    """A single generation call failed; retried per record, then Unknown."""


@dataclass(frozen=True)
class GenerationParams:
    max_new_tokens: int = 32
    temperature: float = 0.6
    top_p: float = 0.9
    sample: bool = True
    stop_at_end_token: bool = True

    def __post_init__(self):
        if self.max_new_tokens < 1:
            raise ValueError("max_new_tokens must be >= 1")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if not 0 < self.top_p <= 1:
            raise ValueError("top_p must be in (0, 1]")


class Label(str, Enum):
    RELEVANT = "relevant"
    IRRELEVANT = "irrelevant"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class GenerationResponse:
    generated_text: str
    model_id: str


class GenerationBackend(Protocol):
    def generate(self, prompt: str, params: GenerationParams) -> GenerationResponse: ...


@dataclass(frozen=True)
class ClassificationResult:
    record: ArticleRecord
    label: Label
    raw_output: str
    model_id: str
    prompt_digest: str
    attempts: int
    error: str | None = None


_PROMPT_TEMPLATE = """You are screening scientific articles for relevance to a research query.
Query: {query}

Keyword occurrences in the text below:
{keyword_lines}

Text:
{text}

Answer with exactly one word: Relevant or Irrelevant."""

_TEXT_HEADER = "\nText:\n"
_ANSWER_FOOTER = "\n\nAnswer with exactly one word: Relevant or Irrelevant."


def build_prompt(query: QueryExpr, record: ArticleRecord) -> str:
    """Deterministic screening prompt; byte-stable for identical inputs."""
    text = record.text_for_screening()
    if text is None:
        raise MissingText("record has neither abstract nor title")
    frequencies = term_frequencies(query, text)
    keyword_lines = "\n".join(
        f"- {term}: {frequencies[term]}" for term in iter_terms(query)
    )
    return _PROMPT_TEMPLATE.format(
        query=render_query(query), keyword_lines=keyword_lines, text=text
    )


def prompt_digest(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


_NEGATIVE_MARKERS = ("irrelevant", "not relevant", "unrelated")
_POSITIVE_MARKERS = ("relevant", "related")


def extract_label(generated: str) -> Label:
    """Total label parser; negative forms are checked first because
    "irrelevant" and "unrelated" contain the positive markers."""
    lowered = generated.casefold()
    if any(marker in lowered for marker in _NEGATIVE_MARKERS):
        return Label.IRRELEVANT
    if any(marker in lowered for marker in _POSITIVE_MARKERS):
        return Label.RELEVANT
    return Label.UNKNOWN


def _screened_text(prompt: str) -> str:
    """Recover the verbatim text section from a built prompt."""
    try:
        after_header = prompt.split(_TEXT_HEADER, 1)[1]
        return after_header.rsplit(_ANSWER_FOOTER, 1)[0]
    except IndexError as exc:
        raise ClassifierError("prompt does not follow the screening template") from exc


class StubBackend:
    """Deterministic stand-in for a live model.

    Answers "Relevant" exactly when the screened text satisfies the query
    and contains at least two keyword occurrences in total; generation
    parameters are ignored. Classification through this backend is a pure
    function of (query, text).
    """

    MIN_TOTAL_HITS = 2

    def __init__(self, query: QueryExpr):
        self._query = query

    def generate(self, prompt: str, params: GenerationParams) -> GenerationResponse:
        text = _screened_text(prompt)
        total_hits = sum(term_frequencies(self._query, text).values())
        relevant = matches(self._query, text) and total_hits >= self.MIN_TOTAL_HITS
        return GenerationResponse(
            generated_text="Relevant" if relevant else "Irrelevant",
            model_id=STUB_MODEL_ID,
        )


def stub_backend(query: QueryExpr) -> StubBackend:
    return StubBackend(query)


class HttpBackend:
    """Client for a local text-generation endpoint.

    Request body: {prompt, max_new_tokens, temperature, top_p, sample};
    response body: {generated_text, model_id}. The endpoint URL comes from
    the GEN_ENDPOINT environment variable unless given explicitly.
    """

    def __init__(self, endpoint: str | None = None, client: httpx.Client | None = None):
        endpoint = endpoint or os.environ.get(DEFAULT_GEN_ENDPOINT_VAR)
        if not endpoint:
            raise BackendUnavailable(
                f"no generation endpoint configured (set {DEFAULT_GEN_ENDPOINT_VAR})"
            )
        self._endpoint = endpoint
        self._client = client or httpx.Client(timeout=60.0)

    def generate(self, prompt: str, params: GenerationParams) -> GenerationResponse:
        body = {
            "prompt": prompt,
            "max_new_tokens": params.max_new_tokens,
            "temperature": params.temperature,
            "top_p": params.top_p,
            "sample": params.sample,
        }
        try:
            response = self._client.post(self._endpoint, json=body)
        except httpx.ConnectError as exc:
            raise BackendUnavailable(f"generation endpoint unreachable: {exc}") from exc
        except httpx.HTTPError as exc:
            raise GenerationTransportError(str(exc)) from exc
        if response.status_code >= 500:
            raise GenerationTransportError(f"generation endpoint HTTP {response.status_code}")
        if response.status_code != 200:
            raise BackendUnavailable(f"generation endpoint HTTP {response.status_code}")
        try:
            payload = response.json()
            return GenerationResponse(
                generated_text=str(payload["generated_text"]),
                model_id=str(payload.get("model_id", "unknown")),
            )
        except (KeyError, ValueError) as exc:
            raise GenerationTransportError("malformed generation response") from exc


def _classify_one(
    record: ArticleRecord,
    query: QueryExpr,
    backend: GenerationBackend,
    params: GenerationParams,
    retry_budget: int,
) -> ClassificationResult:
    prompt = build_prompt(query, record)
    digest = prompt_digest(prompt)
    label = Label.UNKNOWN
    raw_output = ""
    model_id = ""
    error: str | None = None
    attempts = 0
    # Unknown first answers (or transport hiccups) get one re-generation.
    while attempts <= retry_budget:
        attempts += 1
        try:
            response = backend.generate(prompt, params)
        except GenerationTransportError as exc:
            error = str(exc)
            label = Label.UNKNOWN
            continue
        raw_output = response.generated_text
        model_id = response.model_id
        error = None
        label = extract_label(raw_output)
        if label is not Label.UNKNOWN:
            break
    return ClassificationResult(
        record=record,
        label=label,
        raw_output=raw_output,
        model_id=model_id,
        prompt_digest=digest,
        attempts=attempts,
        error=error,
    )


def classify_batch(
    records: Sequence[ArticleRecord],
    query: QueryExpr,
    backend: GenerationBackend,
    params: GenerationParams = GenerationParams(),
    parallelism: int = 4,
    retry_budget: int = 1,
) -> list[ClassificationResult]:
    """Classify every record, preserving input order.

    At most ``parallelism`` generations run concurrently. Per-record
    transport errors consume the retry budget and finalize as Unknown with
    the error noted; an unreachable backend aborts the whole batch.
    """
    if parallelism < 1:
        raise ValueError("parallelism must be positive")
    if not records:
        return []
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        futures = [
            pool.submit(_classify_one, record, query, backend, params, retry_budget)
            for record in records
        ]
        return [future.result() for future in futures]
