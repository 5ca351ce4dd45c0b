"""Deterministic English detection for the language-filter stage.

Rule: tokenize into letter runs, compute the fraction of tokens that are
common English function words. A text with at least MIN_TOKENS tokens is
English when that fraction reaches ENGLISH_RATIO; shorter texts are
undetermined ("und") and are never filtered out. Dependency-free and
byte-stable, so fixture corpora classify identically everywhere.
"""

from __future__ import annotations

import re

ENGLISH = "en"
UNDETERMINED = "und"
OTHER = "other"

MIN_TOKENS = 8
ENGLISH_RATIO = 0.12

# 120 common English function words.
STOPWORDS = frozenset(
    """
    a an the and or but if then than as because while until since although
    though whether so such both each either neither few more most other some
    any all several much many own same very too only just also
    of to in on at by for with from into over under above below between among
    through during before after about against up down out off within without
    toward upon
    is are was were be been being am do does did have has had having will
    would shall should can could may might must
    it its this that these those which who whom whose what when where why how
    we they their our not no nor there here however therefore
    """.split()
)

_LETTER_RUN = re.compile(r"[^\W\d_]+")


def tokenize(text: str) -> list[str]:
    return _LETTER_RUN.findall(text.casefold())


def detect_language(text: str) -> str:
    """Classify text as ENGLISH, OTHER, or UNDETERMINED (too short to call)."""
    tokens = tokenize(text)
    if len(tokens) < MIN_TOKENS:
        return UNDETERMINED
    hits = sum(1 for token in tokens if token in STOPWORDS)
    return ENGLISH if hits / len(tokens) >= ENGLISH_RATIO else OTHER
