"""Boolean keyword query language used to drive searches, prompts, and screening.

Queries are plain infix boolean text, e.g.

    Ghana AND (Nutrient OR Fertilizer) AND Yield

Phrases are bare runs of words ("unmanned aerial vehicle"); AND/OR are
case-insensitive; AND binds tighter than OR; parentheses group. Parsed
expressions are immutable and flattened (no AND directly under AND, no OR
directly under OR), so they are safe to share across worker threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Union


class QuerySyntaxError(ValueError):
    """Query string could not be parsed; ``offset`` is the character position."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


@dataclass(frozen=True)
class Term:
    phrase: str

    def __post_init__(self):
        if not self.phrase.strip():
            raise ValueError("term phrase must not be empty or whitespace-only")


@dataclass(frozen=True)
class And:
    children: tuple["QueryExpr", ...]

    def __post_init__(self):
        if len(self.children) < 2:
            raise ValueError("AND node requires at least 2 children")


@dataclass(frozen=True)
class Or:
    children: tuple["QueryExpr", ...]

    def __post_init__(self):
        if len(self.children) < 2:
            raise ValueError("OR node requires at least 2 children")


QueryExpr = Union[Term, And, Or]


def conjunction(parts: Iterable[QueryExpr]) -> QueryExpr:
    """n-ary AND; flattens nested ANDs and collapses a single operand."""
    flat: list[QueryExpr] = []
    for part in parts:
        if isinstance(part, And):
            flat.extend(part.children)
        else:
            flat.append(part)
    if not flat:
        raise ValueError("conjunction of nothing")
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def disjunction(parts: Iterable[QueryExpr]) -> QueryExpr:
    """n-ary OR; flattens nested ORs and collapses a single operand."""
    flat: list[QueryExpr] = []
    for part in parts:
        if isinstance(part, Or):
            flat.extend(part.children)
        else:
            flat.append(part)
    if not flat:
        raise ValueError("disjunction of nothing")
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


class QueryDialect(Enum):
    """How a query is rendered for a given search backend.

    GENERIC emits plain infix boolean text. TITLE_ABS_KEY wraps the generic
    form in a field-scoped function (Elsevier style). TOPIC_SEARCH wraps it
    in a tagged-field form (Clarivate style). Every wrapper is strippable,
    so the generic parser can always recover the expression.
    """

    GENERIC = "generic"
    TITLE_ABS_KEY = "title-abs-key"
    TOPIC_SEARCH = "topic-search"


_TOKEN_RE = re.compile(r"[()]|[^()\s]+")
_OPERATORS = ("AND", "OR")


def _tokenize(text: str) -> list[tuple[str, int]]:
    return [(m.group(), m.start()) for m in _TOKEN_RE.finditer(text)]


def _is_operator(token: str) -> bool:
    return token.upper() in _OPERATORS


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.end = len(text)
        self.pos = 0

    def _peek(self) -> tuple[str, int] | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _advance(self) -> tuple[str, int]:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def parse(self) -> QueryExpr:
        if not self.tokens:
            raise QuerySyntaxError("empty query", 0)
        expr = self._parse_or()
        leftover = self._peek()
        if leftover is not None:
            token, offset = leftover
            if token == ")":
                raise QuerySyntaxError("unbalanced closing parenthesis", offset)
            raise QuerySyntaxError(f"missing operator before {token!r}", offset)
        return expr

    def _parse_or(self) -> QueryExpr:
        parts = [self._parse_and()]
        while True:
            ahead = self._peek()
            if ahead is None or ahead[0].upper() != "OR":
                break
            self._advance()
            parts.append(self._parse_and())
        return disjunction(parts)

    def _parse_and(self) -> QueryExpr:
        parts = [self._parse_atom()]
        while True:
            ahead = self._peek()
            if ahead is None or ahead[0].upper() != "AND":
                break
            self._advance()
            parts.append(self._parse_atom())
        return conjunction(parts)

    def _parse_atom(self) -> QueryExpr:
        ahead = self._peek()
        if ahead is None:
            raise QuerySyntaxError("dangling operator", self.end)
        token, offset = ahead
        if token == "(":
            self._advance()
            inner_ahead = self._peek()
            if inner_ahead is not None and inner_ahead[0] == ")":
                raise QuerySyntaxError("empty group", inner_ahead[1])
            expr = self._parse_or()
            closing = self._peek()
            if closing is None:
                raise QuerySyntaxError("unclosed parenthesis", offset)
            if closing[0] != ")":
                raise QuerySyntaxError(
                    f"missing operator before {closing[0]!r}", closing[1]
                )
            self._advance()
            return expr
        if token == ")":
            raise QuerySyntaxError("unbalanced closing parenthesis", offset)
        if _is_operator(token):
            raise QuerySyntaxError(f"operator {token!r} where operand expected", offset)
        return Term(" ".join(self._collect_phrase()))

    def _collect_phrase(self) -> list[str]:
        # Adjacent plain words merge into one multiword phrase.
        words = []
        while True:
            ahead = self._peek()
            if ahead is None or ahead[0] in "()" or _is_operator(ahead[0]):
                break
            words.append(self._advance()[0])
        return words


def parse_query(text: str) -> QueryExpr:
    """Parse infix boolean query text into an expression tree.

    AND binds tighter than OR; parentheses override; operator keywords are
    case-insensitive. Raises QuerySyntaxError (with a character offset) on
    unbalanced parentheses, dangling operators, or empty groups.
    """
    return _Parser(text).parse()


def _render_generic(expr: QueryExpr) -> str:
    if isinstance(expr, Term):
        return expr.phrase
    if isinstance(expr, And):
        return " AND ".join(_render_generic(child) for child in expr.children)
    return "(" + " OR ".join(_render_generic(child) for child in expr.children) + ")"


def render_query(expr: QueryExpr, dialect: QueryDialect = QueryDialect.GENERIC) -> str:
    """Deterministic string form; OR groups are always parenthesized."""
    body = _render_generic(expr)
    if dialect is QueryDialect.TITLE_ABS_KEY:
        return f"TITLE-ABS-KEY({body})"
    if dialect is QueryDialect.TOPIC_SEARCH:
        return f"TS=({body})"
    return body


def strip_dialect_wrapper(rendered: str, dialect: QueryDialect) -> str:
    """Undo a dialect wrapper so the generic parser can recover the query."""
    if dialect is QueryDialect.TITLE_ABS_KEY:
        prefix = "TITLE-ABS-KEY("
    elif dialect is QueryDialect.TOPIC_SEARCH:
        prefix = "TS=("
    else:
        return rendered
    if not (rendered.startswith(prefix) and rendered.endswith(")")):
        raise ValueError(f"not a {dialect.value} rendering: {rendered!r}")
    return rendered[len(prefix):-1]


def iter_terms(expr: QueryExpr) -> tuple[str, ...]:
    """Distinct term phrases in first-appearance order."""
    seen: dict[str, None] = {}

    def walk(node: QueryExpr) -> None:
        if isinstance(node, Term):
            seen.setdefault(node.phrase)
        else:
            for child in node.children:
                walk(child)

    walk(expr)
    return tuple(seen)


_WORD_RE = re.compile(r"\w+")


def _words(text: str) -> list[str]:
    return _WORD_RE.findall(text.casefold())


def _count_sequence(haystack: list[str], needle: list[str]) -> int:
    if not needle or len(needle) > len(haystack):
        return 0
    span = len(needle)
    return sum(
        1
        for i in range(len(haystack) - span + 1)
        if haystack[i : i + span] == needle
    )


def term_frequencies(expr: QueryExpr, text: str) -> dict[str, int]:
    """Case-insensitive whole-word occurrence counts for each distinct term.

    Multiword phrases match as contiguous word sequences; "N" does not match
    inside "nitrogen" because matching is word-boundary delimited.
    """
    haystack = _words(text)
    return {
        phrase: _count_sequence(haystack, _words(phrase))
        for phrase in iter_terms(expr)
    }


def matches(expr: QueryExpr, text: str) -> bool:
    """Boolean satisfaction: a term is true iff it occurs at least once."""
    freqs = term_frequencies(expr, text)

    def evaluate(node: QueryExpr) -> bool:
        if isinstance(node, Term):
            return freqs[node.phrase] >= 1
        if isinstance(node, And):
            return all(evaluate(child) for child in node.children)
        return any(evaluate(child) for child in node.children)

    return evaluate(expr)
