"""Code-aware tokenization, line splitting, and per-language lexical profiles.

Everything downstream (metrics, similarity, detection, repair) consumes the
primitives defined here: ``CodeSnippet`` as the unit of analysis,
``tokenize_line`` as the word splitter, ``split_lines`` as the line splitter,
and ``LanguageProfile`` for lexical line-shape classification.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Protocol


class LineShape(str, Enum):
    """Lexical shape of a single line; every line maps to exactly one."""

    ASSIGNMENT = "assignment"
    ASSERTION = "assertion"
    CONDITIONAL = "conditional"
    FUNCTION_DEF = "function_def"
    COMMENT = "comment"
    EMPTY = "empty"
    CHAINED_ACCESS = "chained_access"
    OTHER = "other"


@dataclass(frozen=True)
class CodeSnippet:
    """Raw generated code plus its language tag.

    ``eos_markers`` optionally overrides the configured end-of-sequence
    markers for this snippet only.
    """

    code: str
    language: str = "plain"
    eos_markers: tuple[str, ...] | None = None


def as_snippet(code: "CodeSnippet | str", language: str = "plain") -> CodeSnippet:
    if isinstance(code, CodeSnippet):
        return code
    return CodeSnippet(code=code, language=language)


@dataclass(frozen=True)
class Token:
    """One word of a line: a maximal run of alphanumeric/underscore characters.

    ``span`` is a half-open character interval within the source line.
    """

    text: str
    span: tuple[int, int]


@dataclass(frozen=True)
class LineRecord:
    """One line of a snippet with its original index, tokens, and shape."""

    index: int
    raw: str
    trimmed: str
    tokens: tuple[Token, ...]
    shape: LineShape

    @property
    def token_texts(self) -> tuple[str, ...]:
        return tuple(t.text for t in self.tokens)


class SyntaxProvider(Protocol):
    """Pluggable line-shape classifier.

    The default implementation is lexical (prefix/regex heuristics); a full
    parser can be dropped in behind the same call shape.
    """

    def __call__(self, trimmed: str) -> LineShape: ...


_Rule = tuple[LineShape, "re.Pattern[str]"]


@dataclass(frozen=True)
class LanguageProfile:
    """Lexical profile for one language: comment/string syntax plus the
    ordered shape heuristics used by :func:`classify_line_shape`."""

    language_id: str
    comment_markers: tuple[str, ...] = ()
    block_comment_markers: tuple[tuple[str, str], ...] = ()
    string_delimiters: tuple[str, ...] = ()
    shape_rules: tuple[_Rule, ...] = ()
    syntax_provider: Callable[[str], LineShape] | None = None

    def classify(self, trimmed: str) -> LineShape:
        if not trimmed:
            return LineShape.EMPTY
        if self.syntax_provider is not None:
            return self.syntax_provider(trimmed)
        for marker in self.comment_markers:
            if trimmed.startswith(marker):
                return LineShape.COMMENT
        for open_marker, _ in self.block_comment_markers:
            if trimmed.startswith(open_marker):
                return LineShape.COMMENT
        for shape, pattern in self.shape_rules:
            if pattern.search(trimmed):
                return shape
        return LineShape.OTHER


def tokenize_line(line: str) -> list[Token]:
    """Split one line into word tokens.

    Every character that is not alphanumeric (Unicode) and not underscore is
    a separator; maximal runs of the remaining characters become tokens, so
    identifiers like ``min_cost`` stay whole. Empty input yields no tokens.
    """
    tokens: list[Token] = []
    start = -1
    for i, ch in enumerate(line):
        if ch.isalnum() or ch == "_":
            if start < 0:
                start = i
        elif start >= 0:
            tokens.append(Token(line[start:i], (start, i)))
            start = -1
    if start >= 0:
        tokens.append(Token(line[start:], (start, len(line))))
    return tokens


# an assignment operator that is not part of ==, !=, <=, >= or =>
_ASSIGN_OP = r"(?<![=!<>+\-*/%&|^:])=(?![=>])|[-+*/%&|^]=|//=|\*\*=|>>=|<<=|:="


def _rules(*pairs: tuple[LineShape, str]) -> tuple[_Rule, ...]:
    return tuple((shape, re.compile(pattern)) for shape, pattern in pairs)


_PY_RULES = _rules(
    (LineShape.ASSERTION, r"^assert\b|^(self\.)?assert\w*\s*\("),
    (LineShape.FUNCTION_DEF, r"^(async\s+)?def\s|^lambda\b"),
    (LineShape.CONDITIONAL, r"^(if|elif|else\b|match|case)\b"),
    (LineShape.CHAINED_ACCESS, r"^\w+(\.\w+){2,}"),
    (LineShape.ASSIGNMENT, _ASSIGN_OP),
)

_JAVA_RULES = _rules(
    (LineShape.ASSERTION, r"^assert\b|^Assert\.|^assert\w*\s*\("),
    (LineShape.FUNCTION_DEF,
     r"^(public|private|protected|static|final|synchronized|abstract)\b.*\(.*\)\s*\{?\s*$"
     r"|^[\w<>\[\],.\s]+\s\w+\s*\(.*\)\s*\{\s*$"),
    (LineShape.CONDITIONAL, r"^(if|else\b|switch|case)\b"),
    (LineShape.CHAINED_ACCESS, r"^\w+(\.\w+){2,}"),
    (LineShape.ASSIGNMENT, _ASSIGN_OP),
)

_GO_RULES = _rules(
    (LineShape.ASSERTION, r"^assert\w*\s*\(|\bt\.(Error|Fatal|Assert)\w*\("),
    (LineShape.FUNCTION_DEF, r"^func\b"),
    (LineShape.CONDITIONAL, r"^(if|else\b|switch|case)\b"),
    (LineShape.CHAINED_ACCESS, r"^\w+(\.\w+){2,}"),
    (LineShape.ASSIGNMENT, _ASSIGN_OP),
)

_JS_RULES = _rules(
    (LineShape.ASSERTION, r"^(expect|assert)\w*\s*\(|\.(toBe|toEqual)\w*\("),
    (LineShape.FUNCTION_DEF,
     r"^(export\s+)?(default\s+)?(async\s+)?function\b|=>\s*\{?\s*$"),
    (LineShape.CONDITIONAL, r"^(if|else\b|switch|case)\b"),
    (LineShape.CHAINED_ACCESS, r"^\w+(\.\w+){2,}"),
    (LineShape.ASSIGNMENT, _ASSIGN_OP),
)

_CPP_RULES = _rules(
    (LineShape.ASSERTION, r"^(assert|ASSERT|EXPECT|CHECK)\w*\s*\("),
    (LineShape.FUNCTION_DEF, r"^[\w:<>~&*,\s]+\s[\w:~]+\s*\(.*\)\s*(const\s*)?\{?\s*$"),
    (LineShape.CONDITIONAL, r"^(if|else\b|switch|case)\b"),
    (LineShape.CHAINED_ACCESS, r"^\w+((\.|->)\w+){2,}"),
    (LineShape.ASSIGNMENT, _ASSIGN_OP),
)


PROFILES: dict[str, LanguageProfile] = {
    "python": LanguageProfile(
        language_id="python",
        comment_markers=("#",),
        string_delimiters=('"', "'"),
        shape_rules=_PY_RULES,
    ),
    "java": LanguageProfile(
        language_id="java",
        comment_markers=("//", "*"),
        block_comment_markers=(("/*", "*/"),),
        string_delimiters=('"', "'"),
        shape_rules=_JAVA_RULES,
    ),
    "go": LanguageProfile(
        language_id="go",
        comment_markers=("//",),
        block_comment_markers=(("/*", "*/"),),
        string_delimiters=('"', "'", "`"),
        shape_rules=_GO_RULES,
    ),
    "javascript_typescript": LanguageProfile(
        language_id="javascript_typescript",
        comment_markers=("//", "*"),
        block_comment_markers=(("/*", "*/"),),
        string_delimiters=('"', "'", "`"),
        shape_rules=_JS_RULES,
    ),
    "cpp": LanguageProfile(
        language_id="cpp",
        comment_markers=("//", "*"),
        block_comment_markers=(("/*", "*/"),),
        string_delimiters=('"', "'"),
        shape_rules=_CPP_RULES,
    ),
    "plain": LanguageProfile(language_id="plain"),
}

_ALIASES = {
    "py": "python",
    "python3": "python",
    "js": "javascript_typescript",
    "ts": "javascript_typescript",
    "javascript": "javascript_typescript",
    "typescript": "javascript_typescript",
    "c++": "cpp",
    "cxx": "cpp",
    "cc": "cpp",
    "c": "cpp",
    "golang": "go",
}


def get_profile(language: str | None) -> LanguageProfile:
    """Resolve a language tag to a profile; unknown tags map to ``plain``."""
    if not language:
        return PROFILES["plain"]
    key = language.strip().lower()
    key = _ALIASES.get(key, key)
    return PROFILES.get(key, PROFILES["plain"])


def classify_line_shape(line: LineRecord, profile: LanguageProfile) -> LineShape:
    """Deterministic, total shape classification for one line.

    Comment detection takes precedence over every other shape.
    """
    return profile.classify(line.trimmed)


def split_lines(
    code: str,
    drop_empty: bool = False,
    profile: LanguageProfile | None = None,
) -> list[LineRecord]:
    """Split code on newlines into :class:`LineRecord` objects.

    Indices always refer to the original text, so records stay mappable back
    to source even when ``drop_empty`` excludes whitespace-only lines. A
    trailing newline does not create a phantom final line.
    """
    profile = profile or PROFILES["plain"]
    raw_lines = code.split("\n")
    if raw_lines and raw_lines[-1] == "" and code.endswith("\n"):
        raw_lines.pop()
    records: list[LineRecord] = []
    for index, raw in enumerate(raw_lines):
        trimmed = raw.strip()
        if drop_empty and not trimmed:
            continue
        if trimmed:
            tokens = tuple(tokenize_line(raw))
            shape = profile.classify(trimmed)
        else:
            tokens = ()
            shape = LineShape.EMPTY
        records.append(LineRecord(index, raw, trimmed, tokens, shape))
    return records


def line_start_offsets(code: str) -> list[int]:
    """Character offset of each line start in ``code`` (same split convention
    as :func:`split_lines`), plus a final sentinel of ``len(code)``."""
    offsets = [0]
    for i, ch in enumerate(code):
        if ch == "\n":
            offsets.append(i + 1)
    if code.endswith("\n"):
        offsets.pop()
    offsets.append(len(code))
    return offsets
