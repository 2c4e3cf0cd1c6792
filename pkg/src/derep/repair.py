"""Keep-first pruning of detected repetition, iterated to a fixed point.

Each pass keeps the first occurrence of the repeated unit and deletes every
later one, including a truncated trailing occurrence; re-detection then
catches any repetition at other granularities. Every pass strictly shortens
the code, so the loop terminates.
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import Config, DEFAULT_CONFIG
from .detection import DetectionResult, Granularity, detect
from .lexing import (
    CodeSnippet,
    LanguageProfile,
    as_snippet,
    get_profile,
    line_start_offsets,
    split_lines,
)
from .metrics import MetricsReport, compute_report

Span = tuple[int, int]


@dataclass(frozen=True)
class RepairFragment:
    """Outcome of one pruning pass, spans in the input's coordinates."""

    repaired_code: str
    removed_spans: tuple[Span, ...]


@dataclass(frozen=True)
class RepairResult:
    repaired_code: str
    removed_spans: tuple[Span, ...]
    passes: int
    before: MetricsReport
    after: MetricsReport
    converged: bool


def _merge_spans(spans: list[Span]) -> list[Span]:
    merged: list[Span] = []
    for start, end in sorted(spans):
        if merged and start <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], end))
        else:
            merged.append((start, end))
    return [(a, b) for a, b in merged if b > a]


def _excise(code: str, spans: list[Span]) -> str:
    kept: list[str] = []
    cursor = 0
    for start, end in spans:
        kept.append(code[cursor:start])
        cursor = end
    kept.append(code[cursor:])
    return "".join(kept)


def repair_once(code: CodeSnippet | str, result: DetectionResult) -> RepairFragment:
    """Prune one detection: keep the first unit, drop the rest.

    For statement/block granularity the later units' line ranges are deleted
    (a blank-line pileup at the seam is swallowed so at most one blank line
    remains); for character granularity the periodic region collapses to a
    single period, leaving the line's prefix and suffix untouched.
    """
    if result.pattern is None or not result.units:
        raise ValueError("repair_once needs a detection with units")
    snippet = as_snippet(code)
    text = snippet.code
    units = result.units

    if result.granularity is Granularity.CHARACTER:
        assert result.line_index is not None
        offsets = line_start_offsets(text)
        base = offsets[result.line_index]
        start = base + units[0].span[1]
        end = base + units[-1].span[1]
        spans = [(start, end)] if end > start else []
    else:
        records = split_lines(text, drop_empty=False)
        blank = [not rec.trimmed for rec in records]
        n = len(records)
        offsets = line_start_offsets(text)
        line_ranges = _merge_spans([u.span for u in units[1:]])
        spans = []
        for s, e in line_ranges:
            while e < n and s > 0 and blank[s - 1] and blank[e]:
                e += 1
            spans.append((offsets[s], offsets[min(e, n)]))
        spans = _merge_spans(spans)

    return RepairFragment(_excise(text, spans), tuple(spans))


def _map_to_original(
    segments: list[Span], removed_current: tuple[Span, ...]
) -> tuple[list[Span], list[Span]]:
    """Translate spans over the current (already pruned) text into original
    coordinates, given the kept segments whose concatenation is the current
    text. Returns the surviving segments and the newly removed originals."""
    new_segments: list[Span] = []
    removed_original: list[Span] = []
    spans = iter(removed_current)
    span = next(spans, None)
    position = 0  # cursor in current-text coordinates
    for seg_start, seg_end in segments:
        seg_len = seg_end - seg_start
        seg_pos = 0
        while span is not None and span[0] < position + seg_len:
            rel_start = max(span[0] - position, 0)
            rel_end = min(span[1] - position, seg_len)
            if rel_start > seg_pos:
                new_segments.append((seg_start + seg_pos, seg_start + rel_start))
            removed_original.append((seg_start + rel_start, seg_start + rel_end))
            seg_pos = rel_end
            if span[1] <= position + seg_len:
                span = next(spans, None)
            else:
                break
        if seg_pos < seg_len:
            new_segments.append((seg_start + seg_pos, seg_end))
        position += seg_len
    return new_segments, removed_original


def repair(
    code: CodeSnippet | str,
    profile: LanguageProfile | None = None,
    config: Config = DEFAULT_CONFIG,
) -> RepairResult:
    """Detect-and-prune until no repetition remains or ``max_passes`` is hit.

    ``passes`` counts detection rounds, so a clean snippet reports
    ``passes == 1``; ``converged`` is False only when the pass budget ran out
    with repetition still present.
    """
    snippet = as_snippet(code)
    prof = profile or get_profile(snippet.language)
    before = compute_report(snippet, config.n_values, config.editsim_threshold)

    original = snippet.code
    current = original
    segments: list[Span] = [(0, len(original))] if original else []
    removed: list[Span] = []
    passes = 0
    converged = False
    while passes < config.max_passes:
        passes += 1
        result = detect(
            CodeSnippet(current, snippet.language, snippet.eos_markers), prof, config
        )
        if not result.found:
            converged = True
            break
        fragment = repair_once(current, result)
        if len(fragment.repaired_code) >= len(current):
            break  # defensive: a pass that fails to shrink would never end
        segments, newly_removed = _map_to_original(segments, fragment.removed_spans)
        removed.extend(newly_removed)
        current = fragment.repaired_code

    after = compute_report(
        CodeSnippet(current, snippet.language), config.n_values, config.editsim_threshold
    )
    return RepairResult(
        repaired_code=current,
        removed_spans=tuple(_merge_spans(removed)),
        passes=passes,
        before=before,
        after=after,
        converged=converged,
    )
