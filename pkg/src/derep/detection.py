"""Cascading repetition detection: character level, then statement level,
then block level, returning the first hit.

Each detector reports a pattern kind plus the repeated units with their
spans; character units use character offsets within one line, statement and
block units use half-open line-index ranges. A truncated final occurrence is
kept as an incomplete unit.
"""

from __future__ import annotations

import re
from collections import Counter, deque
from dataclasses import dataclass, replace
from enum import Enum
from typing import Sequence

from .config import Config, DEFAULT_CONFIG
from .lexing import (
    CodeSnippet,
    LanguageProfile,
    LineRecord,
    LineShape,
    as_snippet,
    get_profile,
    split_lines,
)
from .similarity import (
    TfIdfContext,
    digit_skeleton,
    is_similar,
    is_truncated_continuation,
    skeleton_equal,
)


def _context_for(lines: Sequence[LineRecord], config: Config) -> TfIdfContext:
    return TfIdfContext(
        lines,
        cosine_threshold=config.cosine_threshold,
        idf_weight=config.idf_weight,
    )


class Granularity(str, Enum):
    CHARACTER = "character"
    STATEMENT = "statement"
    BLOCK = "block"


class PatternKind(str, Enum):
    """The 20 repetition patterns, grouped by granularity."""

    CHAR_NUMERIC_LITERAL = "character/numeric_literal"
    CHAR_STRING_LITERAL = "character/string_literal"
    CHAR_DICT_KEY_VALUE_PAIRS = "character/dict_key_value_pairs"
    CHAR_ARRAY_ELEMENTS = "character/array_elements"
    CHAR_IDENTIFIER = "character/identifier"
    CHAR_CONDITIONAL_STATEMENT = "character/conditional_statement"
    CHAR_CHAINED_FUNCTION_CALLS = "character/chained_function_calls"

    STMT_TEST_STATEMENTS = "statement/test_statements"
    STMT_ASSIGNMENT_STATEMENTS = "statement/assignment_statements"
    STMT_COMMENTS = "statement/comments"
    STMT_EMPTY_LINES = "statement/empty_lines"
    STMT_CHAINED_ATTRIBUTE_ACCESSES = "statement/chained_attribute_accesses"
    STMT_DICT_KEY_VALUE_PAIRS = "statement/dict_key_value_pairs"
    STMT_ARRAY_ELEMENTS = "statement/array_elements"

    BLOCK_FUNCTIONS = "block/functions"
    BLOCK_COMMENTS = "block/comments"
    BLOCK_CONDITIONAL_STATEMENTS = "block/conditional_statements"
    BLOCK_COMMENT_PLUS_ASSIGNMENT = "block/comment_plus_assignment"
    BLOCK_COMMENT_PLUS_TEST = "block/comment_plus_test"
    BLOCK_SPECIAL_CHARACTERS = "block/special_characters"

    @property
    def granularity(self) -> Granularity:
        return Granularity(self.value.split("/", 1)[0])


class Fidelity(str, Enum):
    COMPLETE = "complete"
    SIMILAR = "similar"


class Termination(str, Enum):
    FINITE = "finite"
    TRUNCATED = "truncated"


@dataclass(frozen=True)
class ExtentKind:
    fidelity: Fidelity
    termination: Termination


@dataclass(frozen=True)
class RepetitionUnit:
    """One occurrence of the repeated fragment.

    ``span`` is half-open: character offsets within the matched line for
    character granularity, line indices otherwise. ``complete`` is False only
    for a truncated final occurrence.
    """

    content: str
    span: tuple[int, int]
    complete: bool = True


@dataclass(frozen=True)
class DetectionResult:
    granularity: Granularity | None
    pattern: PatternKind | None
    units: tuple[RepetitionUnit, ...]
    extent: ExtentKind | None = None
    line_index: int | None = None  # line holding the units (character level)

    @property
    def found(self) -> bool:
        return self.pattern is not None


NO_REPETITION = DetectionResult(None, None, ())


# ---------------------------------------------------------------------------
# character level
# ---------------------------------------------------------------------------

# seed for maximal periodic regions: some unit repeated at least twice
_PERIOD_SEED_RE = re.compile(r"(.+?)\1+")

_DICT_PAIR_RE = re.compile(r"""(['"]?[\w.\-]+['"]?)\s*:\s*[^,{}:]+,?\s*""")
_DICT_UNIT_RE = re.compile(r"""^['"]?[\w.\-]+['"]?\s*:\s*[^:]+$""")
_IDENT_UNIT_RE = re.compile(r"^\w+$")
_COND_OP_RE = re.compile(r"==|!=|<=|>=|&&|\|\||\band\b|\bor\b|\bnot\b")
_CHAIN_UNIT_RE = re.compile(r"\.\w+\s*\(")
_CHAIN_CALL_RE = re.compile(r"\.(\w+)\(([^()]*)\)")
_COMPARISON_RE = re.compile(r"(\S+?)\s*(==|!=|<=|>=)\s*(\S+)")
_CONNECTOR_RE = re.compile(r"^\s*(?:and|or|&&|\|\|)\s*$")
_WORD_CHAR_RE = re.compile(r"\w")


def _smallest_period(s: str) -> int:
    """Smallest period of ``s`` via the classic border (failure) function."""
    n = len(s)
    border = [0] * (n + 1)
    k = 0
    for i in range(1, n):
        while k > 0 and s[i] != s[k]:
            k = border[k]
        if s[i] == s[k]:
            k += 1
        border[i + 1] = k
    return n - border[n]


def _periodic_regions(text: str) -> list[tuple[int, int, int]]:
    """Maximal periodic regions of ``text`` as (start, end, period) triples.

    Each region is seeded by a regex hit (some unit repeated adjacently),
    extended left and right as far as its period holds, then reduced to the
    smallest period of the extended region.
    """
    regions: list[tuple[int, int, int]] = []
    n = len(text)
    pos = 0
    while pos < n:
        match = _PERIOD_SEED_RE.search(text, pos)
        if match is None:
            break
        a, b = match.span()
        p = len(match.group(1))
        while True:
            while a > 0 and text[a - 1] == text[a - 1 + p]:
                a -= 1
            while b < n and text[b] == text[b - p]:
                b += 1
            smallest = _smallest_period(text[a:b])
            if smallest >= p:
                break
            p = smallest
        regions.append((a, b, p))
        pos = b
    return regions


def _inside_string(line: str, offset: int, profile: LanguageProfile) -> bool:
    """Lexical check: does an odd number of some quote char precede offset?"""
    prefix = line[:offset]
    for quote in profile.string_delimiters:
        if prefix.count(quote) % 2 == 1:
            return True
    return False


def _classify_periodic_unit(
    unit: str,
    line: str,
    region_start: int,
    profile: LanguageProfile,
    allow_symbol_runs: bool,
) -> PatternKind | None:
    """Assign a character-level pattern to a periodic unit, in the fixed
    priority order; None means the unit does not classify (and the region is
    discarded)."""
    stripped = unit.strip()
    if not stripped:
        return None
    if any(c.isdigit() for c in stripped) and all(
        c.isdigit() or c in ".-+" for c in stripped
    ):
        return PatternKind.CHAR_NUMERIC_LITERAL
    if _inside_string(line, region_start, profile):
        return PatternKind.CHAR_STRING_LITERAL
    if ":" in stripped and _DICT_UNIT_RE.match(stripped):
        return PatternKind.CHAR_DICT_KEY_VALUE_PAIRS
    if "," in stripped:
        residue = re.sub(r"[\s,]+", "", stripped)
        if residue and re.fullmatch(r"""[-+\w.'"]+""", residue):
            return PatternKind.CHAR_ARRAY_ELEMENTS
    if _IDENT_UNIT_RE.match(stripped):
        return PatternKind.CHAR_IDENTIFIER
    if _COND_OP_RE.search(stripped):
        return PatternKind.CHAR_CONDITIONAL_STATEMENT
    if _CHAIN_UNIT_RE.search(stripped):
        return PatternKind.CHAR_CHAINED_FUNCTION_CALLS
    if _WORD_CHAR_RE.search(stripped):
        return PatternKind.CHAR_IDENTIFIER
    if allow_symbol_runs:
        return PatternKind.CHAR_STRING_LITERAL
    return None


def _units_from_region(
    text: str, start: int, end: int, period: int
) -> list[RepetitionUnit]:
    units: list[RepetitionUnit] = []
    full = (end - start) // period
    for j in range(full):
        a = start + j * period
        units.append(RepetitionUnit(text[a:a + period], (a, a + period)))
    tail = start + full * period
    if tail < end:
        units.append(RepetitionUnit(text[tail:end], (tail, end), complete=False))
    return units


def _adjacent_match_runs(
    matches: list["re.Match[str]"], gap: int = 0
) -> list[list["re.Match[str]"]]:
    """Group regex matches into runs of adjacent occurrences."""
    runs: list[list[re.Match[str]]] = []
    current: list[re.Match[str]] = []
    for m in matches:
        if current and m.start() - current[-1].end() > gap:
            runs.append(current)
            current = []
        current.append(m)
    if current:
        runs.append(current)
    return runs


def _structural_units(
    text: str, config: Config
) -> tuple[PatternKind | None, list[RepetitionUnit]]:
    """Pattern-specific extraction for near-duplicate in-line repetition that
    exact periodicity cannot see: key/value pair runs, comparison-clause
    chains, and same-method chained calls with varying arguments."""
    need = config.min_char_repeats

    pair_runs = _adjacent_match_runs(list(_DICT_PAIR_RE.finditer(text)), gap=0)
    for run in pair_runs:
        if len(run) < need:
            continue
        skeletons = {digit_skeleton(m.group(1)) for m in run}
        if len(skeletons) != 1:
            continue
        if run[-1].end() - run[0].start() < config.min_char_region:
            continue
        units = [RepetitionUnit(m.group(0), m.span()) for m in run]
        return PatternKind.CHAR_DICT_KEY_VALUE_PAIRS, units

    comparisons = list(_COMPARISON_RE.finditer(text))
    clause_runs: list[list[re.Match[str]]] = []
    current: list[re.Match[str]] = []
    for m in comparisons:
        if current and not _CONNECTOR_RE.match(text[current[-1].end():m.start()]):
            clause_runs.append(current)
            current = []
        current.append(m)
    if current:
        clause_runs.append(current)
    for run in clause_runs:
        if len(run) < need:
            continue
        skeletons = {
            (digit_skeleton(m.group(1)), m.group(2), digit_skeleton(m.group(3)))
            for m in run
        }
        if len(skeletons) != 1:
            continue
        if run[-1].end() - run[0].start() < config.min_char_region:
            continue
        units = [
            RepetitionUnit(text[m.start():nxt.start()], (m.start(), nxt.start()))
            for m, nxt in zip(run, run[1:])
        ]
        units.append(RepetitionUnit(run[-1].group(0), run[-1].span()))
        return PatternKind.CHAR_CONDITIONAL_STATEMENT, units

    call_runs = _adjacent_match_runs(list(_CHAIN_CALL_RE.finditer(text)), gap=0)
    for run in call_runs:
        if len(run) < need:
            continue
        if len({m.group(1) for m in run}) != 1:
            continue
        if run[-1].end() - run[0].start() < config.min_char_region:
            continue
        units = [RepetitionUnit(m.group(0), m.span()) for m in run]
        return PatternKind.CHAR_CHAINED_FUNCTION_CALLS, units

    return None, []


def extract_char_units(
    line: LineRecord,
    profile: LanguageProfile,
    config: Config = DEFAULT_CONFIG,
    allow_symbol_runs: bool = False,
) -> tuple[PatternKind | None, list[RepetitionUnit]]:
    """Find in-line repetition on a single line.

    Exact periodicity is tried first: the longest maximal periodic region
    qualifies when it holds at least ``min_char_repeats`` full periods or is
    longer than the over-length threshold, and spans at least
    ``min_char_region`` characters. Whitespace-only periods never qualify;
    symbol-only periods qualify only when ``allow_symbol_runs`` is set (the
    over-length/end-marker fast path). Near-duplicate structures that have no
    exact period fall through to pattern-specific rules.
    """
    text = line.raw.rstrip()
    if len(text) >= config.min_char_region:
        best: tuple[int, int, int] | None = None
        for a, b, p in _periodic_regions(text):
            length = b - a
            if length < config.min_char_region:
                continue
            if length // p < 2:
                continue
            if length // p < config.min_char_repeats and length <= config.overlength:
                continue
            unit = text[a:a + p]
            if not unit.strip():
                continue
            if not allow_symbol_runs and not _WORD_CHAR_RE.search(unit):
                if not _inside_string(text, a, profile):
                    continue
            if best is None or length > best[1] - best[0] or (
                length == best[1] - best[0] and a > best[0]
            ):
                best = (a, b, p)
        if best is not None:
            a, b, p = best
            pattern = _classify_periodic_unit(
                text[a:a + p], text, a, profile, allow_symbol_runs
            )
            if pattern is not None:
                return pattern, _units_from_region(text, a, b, p)

        pattern, units = _structural_units(text, config)
        if pattern is not None:
            return pattern, units

    return None, []


def detect_char(
    lines: Sequence[LineRecord],
    profile: LanguageProfile,
    config: Config = DEFAULT_CONFIG,
    eos_markers: Sequence[str] | None = None,
) -> tuple[PatternKind | None, list[RepetitionUnit], int | None]:
    """Character-level detection: check the last line first when it is
    over-length or carries an end-of-sequence marker, then scan all lines
    last to first. Returns (pattern, units, line index of the hit)."""
    if not lines:
        return None, [], None
    markers = tuple(eos_markers) if eos_markers is not None else config.eos_markers
    last = lines[-1]
    if len(last.raw) > config.overlength or any(m in last.raw for m in markers):
        pattern, units = extract_char_units(
            last, profile, config, allow_symbol_runs=True
        )
        if pattern is not None:
            return pattern, units, last.index
    for rec in reversed(lines):
        pattern, units = extract_char_units(rec, profile, config)
        if pattern is not None:
            return pattern, units, rec.index
    return None, [], None


# ---------------------------------------------------------------------------
# statement level
# ---------------------------------------------------------------------------

_DICT_LINE_RE = re.compile(r"""^['"]?[\w.\-]+['"]?\s*:\s*.+?,?\s*$""")
_ARRAY_LINE_RE = re.compile(r"""^(?:[-+]?[\w.'"]+\s*,\s*)+[-+\w.'"]*\]?,?\s*$""")

_SHAPE_TO_STMT = {
    LineShape.ASSERTION: PatternKind.STMT_TEST_STATEMENTS,
    LineShape.ASSIGNMENT: PatternKind.STMT_ASSIGNMENT_STATEMENTS,
    LineShape.COMMENT: PatternKind.STMT_COMMENTS,
    LineShape.EMPTY: PatternKind.STMT_EMPTY_LINES,
    LineShape.CHAINED_ACCESS: PatternKind.STMT_CHAINED_ATTRIBUTE_ACCESSES,
}


def _classify_statement_run(run: Sequence[LineRecord]) -> PatternKind:
    votes = Counter(rec.shape for rec in run)
    top = max(votes.values())
    winners = {shape for shape, count in votes.items() if count == top}
    shape = run[0].shape if run[0].shape in winners else next(
        rec.shape for rec in run if rec.shape in winners
    )
    direct = _SHAPE_TO_STMT.get(shape)
    if direct is not None:
        return direct
    # shapes without a dedicated statement kind: look at the line content
    texts = [rec.trimmed for rec in run]
    if sum(1 for t in texts if _DICT_LINE_RE.match(t)) * 2 > len(texts):
        return PatternKind.STMT_DICT_KEY_VALUE_PAIRS
    if sum(1 for t in texts if _ARRAY_LINE_RE.match(t)) * 2 > len(texts):
        return PatternKind.STMT_ARRAY_ELEMENTS
    return PatternKind.STMT_ASSIGNMENT_STATEMENTS


def _line_unit(rec: LineRecord) -> RepetitionUnit:
    return RepetitionUnit(rec.raw, (rec.index, rec.index + 1))


def _longest_empty_run(lines: Sequence[LineRecord]) -> list[LineRecord]:
    best: list[LineRecord] = []
    current: list[LineRecord] = []
    for rec in lines:
        if rec.shape is LineShape.EMPTY:
            current.append(rec)
            if len(current) > len(best):
                best = list(current)
        else:
            current = []
    return best


def detect_statement(
    lines: Sequence[LineRecord],
    config: Config = DEFAULT_CONFIG,
    context: TfIdfContext | None = None,
) -> tuple[PatternKind | None, list[RepetitionUnit]]:
    """Statement-level detection: the longest contiguous run of consecutive
    similar lines (at least two), classified by the dominant line shape.

    Runs of empty lines are handled by a pre-check, since they carry no
    tokens for the similarity kernel.
    """
    n = len(lines)
    if n < 2:
        return None, []
    empty_run = _longest_empty_run(lines)
    if len(empty_run) >= config.min_empty_repeats:
        return PatternKind.STMT_EMPTY_LINES, [_line_unit(r) for r in empty_run]

    ctx = context or _context_for(lines, config)
    max_len = 0
    max_start = -1
    current_len = 1
    for i in range(1, n):
        if is_similar([lines[i]], [lines[i - 1]], ctx):
            current_len += 1
            if current_len > max_len:
                max_len = current_len
                max_start = i - current_len + 1
        else:
            current_len = 1
    if max_len < 2:
        return None, []

    run = list(lines[max_start:max_start + max_len])
    units = [_line_unit(rec) for rec in run]
    end = max_start + max_len
    if end == n - 1 and is_truncated_continuation(
        lines[n - 1], [run[-1]], min_tokens=config.prefix_min_tokens
    ):
        units.append(
            RepetitionUnit(
                lines[n - 1].raw,
                (lines[n - 1].index, lines[n - 1].index + 1),
                complete=False,
            )
        )
    return _classify_statement_run(run), units


# ---------------------------------------------------------------------------
# block level
# ---------------------------------------------------------------------------


def _counter_add(target: Counter[str], other: Counter[str]) -> None:
    target.update(other)


def _counter_sub(target: Counter[str], other: Counter[str]) -> None:
    for tok, count in other.items():
        remaining = target[tok] - count
        if remaining:
            target[tok] = remaining
        else:
            del target[tok]


def _block_span_content(lines: Sequence[LineRecord], a: int, b: int) -> str:
    return "\n".join(rec.raw for rec in lines[a:b])


def _anchored(a: LineRecord, b: LineRecord, ctx: TfIdfContext) -> bool:
    """First-line agreement for block comparisons. Without it, windows cut
    across the true block phase (the tail of one copy plus the head of the
    next) can clear the similarity threshold and win on unit count, and the
    keep-first repair would then slice through a copy."""
    if not a.trimmed and not b.trimmed:
        return True
    return is_similar([a], [b], ctx)


def find_all_repeats(
    lines: Sequence[LineRecord],
    start: int,
    length: int,
    context: TfIdfContext | None = None,
    config: Config = DEFAULT_CONFIG,
) -> list[RepetitionUnit]:
    """Extend a confirmed block repeat forward: keep appending the next
    ``length``-line block while it stays similar to the first one."""
    ctx = context or _context_for(lines, config)
    reference = list(lines[start:start + length])
    spans = [(start, start + length)]
    nxt = start + length
    while nxt + length <= len(lines):
        candidate = list(lines[nxt:nxt + length])
        if not is_similar(reference, candidate, ctx):
            break
        if not _anchored(reference[0], candidate[0], ctx):
            break
        spans.append((nxt, nxt + length))
        nxt += length
    return [
        RepetitionUnit(_block_span_content(lines, a, b), (a, b)) for a, b in spans
    ]


def _match_partial_block(
    partial: Sequence[LineRecord],
    reference: Sequence[LineRecord],
    ctx: TfIdfContext,
    config: Config,
) -> bool:
    """Does a short trailing group of lines look like a cut-off next block?"""
    if not partial or len(partial) >= len(reference):
        return False
    for j in range(len(partial) - 1):
        if partial[j].trimmed == reference[j].trimmed:
            continue
        if not is_similar([partial[j]], [reference[j]], ctx):
            return False
    return is_truncated_continuation(
        partial[-1],
        list(reference[len(partial) - 1:]),
        min_tokens=config.prefix_min_tokens,
    )


def _next_partner_gaps(lines: Sequence[LineRecord]) -> list[int]:
    """For each line, the distance to the nearest later line sharing a token
    or a digit skeleton with it. Non-empty lines always partner on their
    skeleton, which keeps digit-variant rows and symbol art visible to the
    block scan even when they share no tokens."""
    infinity = len(lines) + 1
    gaps = [infinity] * len(lines)
    last_seen: dict[str, int] = {}
    for j, rec in enumerate(lines):
        keys = set(rec.token_texts)
        if rec.trimmed:
            keys.add("\x00" + digit_skeleton(rec.trimmed))
        for tok in keys:
            prev = last_seen.get(tok)
            if prev is not None and j - prev < gaps[prev]:
                gaps[prev] = j - prev
            last_seen[tok] = j
    return gaps


def detect_block(
    lines: Sequence[LineRecord],
    config: Config = DEFAULT_CONFIG,
    context: TfIdfContext | None = None,
) -> tuple[PatternKind | None, list[RepetitionUnit]]:
    """Block-level detection: slide windows of every length L from ``l_min``
    up to ``l_max_ratio * n`` comparing each block with the next; the
    candidate with the strictly greatest unit count wins; count ties break
    toward the more similar seed pair, then the smallest L and leftmost
    window. The similarity tie-break keeps an exact two-copy repeat from
    losing to an off-phase or padding-diluted window that also clears the
    threshold."""
    n = len(lines)
    if n < 2 * config.l_min or n > config.max_block_lines:
        return None, []
    ctx = context or _context_for(lines, config)
    counts = [Counter(rec.token_texts) for rec in lines]
    trimmed = [rec.trimmed for rec in lines]
    gaps = _next_partner_gaps(lines)
    l_max = int(n * config.l_max_ratio)

    best_units: list[RepetitionUnit] = []
    best_count = 0
    best_sim = 0.0
    best_ref: tuple[int, int] | None = None
    c1: Counter[str] = Counter()
    c2: Counter[str] = Counter()
    for length in range(config.l_min, l_max + 1):
        if 2 * length > n:
            break
        if n // length < best_count:
            break  # no window of this or any larger length can beat the best
        reach = 2 * length
        minq: deque[int] = deque()  # sliding min over gaps[i : i + length]
        for j in range(length):
            while minq and gaps[minq[-1]] >= gaps[j]:
                minq.pop()
            minq.append(j)
        counters_at = -2  # window index for which c1/c2 are current
        for i in range(0, n - 2 * length + 1):
            if i > 0:
                j = i + length - 1
                while minq and gaps[minq[-1]] >= gaps[j]:
                    minq.pop()
                minq.append(j)
                if minq[0] < i:
                    minq.popleft()
            # a similar pair of adjacent blocks needs two lines sharing a
            # token within reach; without one, skip all the heavy work
            if gaps[minq[0]] >= reach:
                continue
            reachable = (n - i) // length
            if reachable < best_count or (
                reachable == best_count and best_sim >= 1.0 - 1e-12
            ):
                continue
            if counters_at == i - 1:
                _counter_sub(c1, counts[i - 1])
                _counter_add(c1, counts[i + length - 1])
                _counter_sub(c2, counts[i + length - 1])
                _counter_add(c2, counts[i + 2 * length - 1])
            elif counters_at != i:
                c1 = Counter()
                c2 = Counter()
                for j in range(length):
                    _counter_add(c1, counts[i + j])
                    _counter_add(c2, counts[i + length + j])
            counters_at = i
            seed_sim = ctx.cosine_counts(c1, c2)
            if seed_sim < config.cosine_threshold:
                b1 = digit_skeleton("\n".join(trimmed[i:i + length]))
                if not b1 or b1 != digit_skeleton(
                    "\n".join(trimmed[i + length:i + 2 * length])
                ):
                    continue
                seed_sim = 1.0
            if not _anchored(lines[i], lines[i + length], ctx):
                continue
            units = find_all_repeats(lines, i, length, ctx, config)
            count = len(units)
            if count > best_count or (count == best_count and seed_sim > best_sim):
                best_units = units
                best_count = count
                best_sim = seed_sim
                best_ref = (i, length)

    if not best_units:
        return None, []

    assert best_ref is not None
    start, length = best_ref
    last_span = best_units[-1].span
    tail_start = last_span[1]
    partial = list(lines[tail_start:])
    while partial and partial[-1].shape is LineShape.EMPTY:
        partial.pop()
    if partial and len(partial) < length:
        reference = list(lines[last_span[0]:last_span[1]])
        if _match_partial_block(partial, reference, ctx, config):
            end = tail_start + len(partial)
            best_units = best_units + [
                RepetitionUnit(
                    _block_span_content(lines, tail_start, end),
                    (tail_start, end),
                    complete=False,
                )
            ]

    pattern = identify_block_pattern(best_units, lines, None)
    return pattern, best_units


def _symbol_dominated(text: str, threshold: float = 0.8) -> bool:
    meaningful = [c for c in text if not c.isspace()]
    if not meaningful:
        return False
    symbols = sum(1 for c in meaningful if not (c.isalnum() or c == "_"))
    return symbols / len(meaningful) >= threshold


def identify_block_pattern(
    units: Sequence[RepetitionUnit],
    lines: Sequence[LineRecord],
    profile: LanguageProfile | None = None,
) -> PatternKind:
    """Classify a block repeat by the line shapes inside its first unit."""
    a, b = units[0].span
    unit_lines = [rec for rec in lines[a:b] if rec.shape is not LineShape.EMPTY]
    if not unit_lines:
        return PatternKind.BLOCK_SPECIAL_CHARACTERS
    shapes = [rec.shape for rec in unit_lines]
    text = "\n".join(rec.trimmed for rec in unit_lines)

    # symbol art is checked before the comment rules: '#'-art lines parse as
    # comments in languages with '#' markers but are their own pattern
    if _symbol_dominated(text):
        return PatternKind.BLOCK_SPECIAL_CHARACTERS
    if LineShape.FUNCTION_DEF in shapes:
        return PatternKind.BLOCK_FUNCTIONS
    if all(s is LineShape.COMMENT for s in shapes):
        return PatternKind.BLOCK_COMMENTS
    if shapes[0] is LineShape.CONDITIONAL:
        return PatternKind.BLOCK_CONDITIONAL_STATEMENTS
    if shapes[0] is LineShape.COMMENT:
        rest = [s for s in shapes if s is not LineShape.COMMENT]
        if rest and any(s is LineShape.ASSERTION for s in rest):
            return PatternKind.BLOCK_COMMENT_PLUS_TEST
        if rest and all(
            s in (LineShape.ASSIGNMENT, LineShape.CHAINED_ACCESS) for s in rest
        ):
            return PatternKind.BLOCK_COMMENT_PLUS_ASSIGNMENT

    # fallback: vote the statement-level kind and map it to the closest
    # block-level kind
    stmt = _classify_statement_run(unit_lines)
    return {
        PatternKind.STMT_TEST_STATEMENTS: PatternKind.BLOCK_COMMENT_PLUS_TEST,
        PatternKind.STMT_ASSIGNMENT_STATEMENTS: PatternKind.BLOCK_COMMENT_PLUS_ASSIGNMENT,
        PatternKind.STMT_COMMENTS: PatternKind.BLOCK_COMMENTS,
        PatternKind.STMT_EMPTY_LINES: PatternKind.BLOCK_COMMENTS,
        PatternKind.STMT_CHAINED_ATTRIBUTE_ACCESSES: PatternKind.BLOCK_COMMENT_PLUS_ASSIGNMENT,
        PatternKind.STMT_DICT_KEY_VALUE_PAIRS: PatternKind.BLOCK_COMMENT_PLUS_ASSIGNMENT,
        PatternKind.STMT_ARRAY_ELEMENTS: PatternKind.BLOCK_COMMENT_PLUS_ASSIGNMENT,
    }[stmt]


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------


def classify_extent(result: DetectionResult, code: CodeSnippet | str) -> ExtentKind:
    """Complete vs similar by byte identity of the complete units; finite vs
    truncated by an incomplete final unit or repetition running to the last
    non-empty line."""
    if result.pattern is None:
        raise ValueError("cannot classify the extent of a no-repetition result")
    snippet = as_snippet(code)
    units = result.units
    complete_contents = {u.content for u in units if u.complete}
    fidelity = Fidelity.COMPLETE if len(complete_contents) <= 1 else Fidelity.SIMILAR

    truncated = not units[-1].complete
    if not truncated:
        lines = split_lines(snippet.code, drop_empty=False)
        last_nonempty = next(
            (rec for rec in reversed(lines) if rec.trimmed), None
        )
        if last_nonempty is not None:
            if result.granularity is Granularity.CHARACTER:
                truncated = (
                    result.line_index == last_nonempty.index
                    and units[-1].span[1] >= len(last_nonempty.raw.rstrip())
                )
            else:
                truncated = units[-1].span[1] > last_nonempty.index
    termination = Termination.TRUNCATED if truncated else Termination.FINITE
    return ExtentKind(fidelity, termination)


def detect(
    code: CodeSnippet | str,
    profile: LanguageProfile | None = None,
    config: Config = DEFAULT_CONFIG,
) -> DetectionResult:
    """Run the cascade: character level first, then statement, then block;
    the first level reporting a pattern wins."""
    snippet = as_snippet(code)
    prof = profile or get_profile(snippet.language)
    lines = split_lines(snippet.code, drop_empty=False, profile=prof)
    eos = snippet.eos_markers if snippet.eos_markers is not None else None

    pattern, units, line_index = detect_char(lines, prof, config, eos_markers=eos)
    if pattern is not None:
        result = DetectionResult(
            Granularity.CHARACTER, pattern, tuple(units), None, line_index
        )
        return replace(result, extent=classify_extent(result, snippet))

    ctx = _context_for(lines, config)
    pattern, units = detect_statement(lines, config, context=ctx)
    if pattern is not None:
        result = DetectionResult(Granularity.STATEMENT, pattern, tuple(units))
        return replace(result, extent=classify_extent(result, snippet))

    pattern, units = detect_block(lines, config, context=ctx)
    if pattern is not None:
        result = DetectionResult(Granularity.BLOCK, pattern, tuple(units))
        return replace(result, extent=classify_extent(result, snippet))

    return NO_REPETITION
