"""Unified article metadata record and the normalizers shared by dedup and evaluation.

A record is an immutable value object; ``normalized_title`` and ``doi`` are
always stored in canonical form so identifier comparisons are exact string
comparisons. Title normalization is purely textual (case, punctuation,
whitespace) — it deliberately does NOT expand abbreviations, so titles that
spell "nitrogen" out versus using the symbol "N" stay distinct.
"""

from __future__ import annotations

import datetime
import re
import unicodedata
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Mapping


class Source(str, Enum):
    SCOPUS = "scopus"
    SCIENCEDIRECT = "sciencedirect"
    WEB_OF_SCIENCE = "wos"
    GOOGLE_SCHOLAR = "gscholar"
    FIXTURE = "fixture"


# Survivor preference when duplicates collide, and the canonical listing order.
SOURCE_PRIORITY: tuple[Source, ...] = (
    Source.SCOPUS,
    Source.SCIENCEDIRECT,
    Source.WEB_OF_SCIENCE,
    Source.GOOGLE_SCHOLAR,
    Source.FIXTURE,
)


def source_priority(source: Source) -> int:
    return SOURCE_PRIORITY.index(source)


class PayloadError(ValueError):
    """A source payload could not be mapped to a record."""

    def __init__(self, source: Source, reason: str, payload: Mapping[str, Any]):
        super().__init__(f"{source.value}: {reason}")
        self.source = source
        self.reason = reason
        self.payload = dict(payload)


_DOI_PREFIXES = ("https://doi.org/", "http://doi.org/", "doi:")


def normalize_doi(raw: str | None) -> str | None:
    """Canonical DOI: prefix-stripped, lowercased; None when not a DOI."""
    if raw is None:
        return None
    doi = raw.strip()
    stripped = True
    while stripped:
        stripped = False
        for prefix in _DOI_PREFIXES:
            if doi.lower().startswith(prefix):
                doi = doi[len(prefix):].strip()
                stripped = True
    doi = doi.lower()
    if not doi.startswith("10."):
        return None
    return doi


def normalize_title(raw: str) -> str:
    """Casefolded, punctuation-free, whitespace-collapsed title text."""
    text = unicodedata.normalize("NFKC", raw).casefold()
    chars = [" " if unicodedata.category(c).startswith("P") else c for c in text]
    return re.sub(r"\s+", " ", "".join(chars)).strip()


def _max_year() -> int:
    return datetime.date.today().year + 1


@dataclass(frozen=True)
class ArticleRecord:
    source: Source
    title: str
    normalized_title: str
    source_record_id: str | None = None
    doi: str | None = None
    abstract: str | None = None
    authors: tuple[str, ...] = ()
    year: int | None = None
    url: str | None = None
    language: str | None = None
    extra: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.title:
            raise ValueError("record title must not be empty")
        if self.normalized_title != normalize_title(self.title):
            raise ValueError("normalized_title out of sync with title")
        if self.doi is not None and self.doi != normalize_doi(self.doi):
            raise ValueError(f"doi not in normalized form: {self.doi!r}")
        if self.year is not None and not 1800 <= self.year <= _max_year():
            raise ValueError(f"year out of range: {self.year}")

    def text_for_screening(self) -> str | None:
        """Abstract when available, else title (title-only sources)."""
        if self.abstract:
            return self.abstract
        return self.title or None


def make_record(
    source: Source,
    title: str,
    *,
    source_record_id: str | None = None,
    doi: str | None = None,
    abstract: str | None = None,
    authors: tuple[str, ...] | list[str] = (),
    year: int | None = None,
    url: str | None = None,
    language: str | None = None,
    extra: Mapping[str, str] | None = None,
) -> ArticleRecord:
    """Build a record from raw inputs, normalizing the DOI and deriving
    the normalized title."""
    return ArticleRecord(
        source=source,
        title=title,
        normalized_title=normalize_title(title),
        source_record_id=source_record_id or None,
        doi=normalize_doi(doi),
        abstract=abstract or None,
        authors=tuple(authors),
        year=year,
        url=url or None,
        language=language or None,
        extra=dict(extra or {}),
    )


# Per-source payload key tables. Keys not listed here land in ``extra``.
# Generic keys (title, abstract, doi, id, year, authors, url, language) are
# accepted for every source; fixture files use them.
_GENERIC_KEYS = {
    "title": "title",
    "abstract": "abstract",
    "doi": "doi",
    "id": "source_record_id",
    "year": "year",
    "authors": "authors",
    "url": "url",
    "language": "language",
}

_SOURCE_KEYS: dict[Source, dict[str, str]] = {
    Source.SCOPUS: {
        "dc:title": "title",
        "dc:description": "abstract",
        "prism:doi": "doi",
        "dc:identifier": "source_record_id",
        "prism:coverDate": "year",
        "dc:creator": "authors",
        "prism:url": "url",
    },
    Source.SCIENCEDIRECT: {
        "dc:title": "title",
        "dc:description": "abstract",
        "prism:doi": "doi",
        "dc:identifier": "source_record_id",
        "prism:coverDate": "year",
        "dc:creator": "authors",
        "prism:url": "url",
    },
    Source.WEB_OF_SCIENCE: {
        "uid": "source_record_id",
        "doctype": "extra",
    },
    Source.GOOGLE_SCHOLAR: {
        "pub_url": "url",
        "num_citations": "extra",
    },
    Source.FIXTURE: {},
}

_YEAR_RE = re.compile(r"\b(1[89]\d\d|2[01]\d\d)\b")


def _parse_year(raw: Any) -> int | None:
    if isinstance(raw, int):
        year = raw
    else:
        match = _YEAR_RE.search(str(raw))
        if not match:
            return None
        year = int(match.group(1))
    if 1800 <= year <= _max_year():
        return year
    return None


def _parse_authors(raw: Any) -> tuple[str, ...]:
    if isinstance(raw, (list, tuple)):
        return tuple(str(a).strip() for a in raw if str(a).strip())
    return tuple(part.strip() for part in str(raw).split(";") if part.strip())


def from_source_payload(source: Source, payload: Mapping[str, Any]) -> ArticleRecord:
    """Map a raw source payload onto the unified record shape.

    Unmapped fields are preserved in ``extra``. Raises PayloadError when the
    payload carries no usable title; the raw payload stays attached for the
    job's error log.
    """
    keymap = dict(_GENERIC_KEYS)
    keymap.update(_SOURCE_KEYS.get(source, {}))

    fields: dict[str, Any] = {}
    extra: dict[str, str] = {}
    for key, value in payload.items():
        target = keymap.get(key)
        if target is None or target == "extra" or target in fields:
            extra[key] = value if isinstance(value, str) else repr(value)
            continue
        fields[target] = value

    title = str(fields.get("title", "") or "").strip()
    if not title:
        raise PayloadError(source, "payload has no title", payload)

    year_raw = fields.get("year")
    year = _parse_year(year_raw) if year_raw is not None else None
    if year_raw is not None and year is None:
        extra.setdefault("year", str(year_raw))

    return make_record(
        source,
        title,
        source_record_id=(
            str(fields["source_record_id"]).strip()
            if fields.get("source_record_id") is not None
            else None
        ),
        doi=str(fields["doi"]) if fields.get("doi") is not None else None,
        abstract=str(fields["abstract"]).strip() if fields.get("abstract") else None,
        authors=_parse_authors(fields.get("authors", ())),
        year=year,
        url=str(fields["url"]).strip() if fields.get("url") else None,
        language=str(fields["language"]).strip() if fields.get("language") else None,
        extra=extra,
    )


def record_to_dict(record: ArticleRecord) -> dict[str, Any]:
    """JSON-ready representation; inverse of ``record_from_dict``."""
    return {
        "source": record.source.value,
        "title": record.title,
        "source_record_id": record.source_record_id,
        "doi": record.doi,
        "abstract": record.abstract,
        "authors": list(record.authors),
        "year": record.year,
        "url": record.url,
        "language": record.language,
        "extra": record.extra,
    }


def record_from_dict(data: Mapping[str, Any]) -> ArticleRecord:
    return make_record(
        Source(data["source"]),
        data["title"],
        source_record_id=data.get("source_record_id"),
        doi=data.get("doi"),
        abstract=data.get("abstract"),
        authors=tuple(data.get("authors") or ()),
        year=data.get("year"),
        url=data.get("url"),
        language=data.get("language"),
        extra=data.get("extra") or {},
    )


def with_language(record: ArticleRecord, tag: str) -> ArticleRecord:
    return replace(record, language=tag)
