"""Repetition metrics: rep-n, rep-line, sim-line, and their aggregate.

All three range over [0, 100]; higher means more repetitive. rep-n counts
non-unique token n-grams, rep-line counts exactly duplicated non-empty lines,
and sim-line counts lines absorbed by near-duplicate line sets under
token-level edit-distance similarity.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .lexing import CodeSnippet, LineRecord, as_snippet, split_lines


@dataclass(frozen=True)
class MetricsReport:
    rep_n: dict[int, float]
    rep_line: float
    sim_line: float
    rep_aggregate: float
    token_count: int
    line_count: int


def _snippet_tokens(snippet: CodeSnippet) -> list[str]:
    records = split_lines(snippet.code, drop_empty=False)
    tokens: list[str] = []
    for rec in records:
        tokens.extend(t.text for t in rec.tokens)
    return tokens


def rep_n(code: CodeSnippet | str, n: int, *, _tokens: Sequence[str] | None = None) -> float:
    """Percentage of non-unique token n-grams: 100 * (1 - unique / total).

    Returns 0.0 when the snippet has at most one n-gram. ``n`` must be >= 1.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    tokens = list(_tokens) if _tokens is not None else _snippet_tokens(as_snippet(code))
    total = len(tokens) - n + 1
    if total <= 1:
        return 0.0
    grams = Counter(tuple(tokens[i:i + n]) for i in range(total))
    return 100.0 * (1.0 - len(grams) / total)


def rep_line(code: CodeSnippet | str) -> float:
    """Percentage of non-unique lines, empty lines removed, identity by
    exact equality of trimmed text."""
    snippet = as_snippet(code)
    records = split_lines(snippet.code, drop_empty=True)
    total = len(records)
    if total <= 1:
        return 0.0
    unique = len({rec.trimmed for rec in records})
    return 100.0 * (1.0 - unique / total)


def token_edit_distance(a: Sequence[str], b: Sequence[str]) -> int:
    """Levenshtein distance over token sequences."""
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, tok_a in enumerate(a, start=1):
        current = [i]
        for j, tok_b in enumerate(b, start=1):
            cost = 0 if tok_a == tok_b else 1
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + cost))
        previous = current
    return previous[-1]


def line_similarity(a: LineRecord, b: LineRecord) -> float:
    """Normalized token-level edit-distance similarity in [0, 1].

    Normalizes by the longer token list; two token-less lines count as
    identical (1.0). Symmetric by construction.
    """
    ta, tb = a.token_texts, b.token_texts
    longest = max(len(ta), len(tb))
    if longest == 0:
        return 1.0
    return 1.0 - token_edit_distance(ta, tb) / longest


def sim_line(code: CodeSnippet | str, threshold: float = 0.8) -> float:
    """Percentage of lines not founding their own dissimilar-line set.

    Lines (empty ones removed) are partitioned greedily in order: each line
    joins the first existing set whose representative (the set's first line)
    has :func:`line_similarity` strictly above ``threshold``, otherwise it
    founds a new set. Returns 100 * (1 - sets / total lines).
    """
    snippet = as_snippet(code)
    records = split_lines(snippet.code, drop_empty=True)
    total = len(records)
    if total <= 1:
        return 0.0
    # cheap exact upper bounds let the quadratic greedy pass skip the edit
    # distance DP for clearly dissimilar pairs: the similarity can exceed
    # neither 1 - len_diff/longest nor multiset_overlap/longest
    reps: list[tuple[LineRecord, tuple[str, ...], Counter[str], int]] = []
    for rec in records:
        tokens = rec.token_texts
        counts = Counter(tokens)
        size = len(tokens)
        for rep, rep_tokens, rep_counts, rep_size in reps:
            if tokens == rep_tokens:
                if 1.0 > threshold:
                    break
                continue
            longest = max(size, rep_size)
            if longest - abs(size - rep_size) <= threshold * longest:
                continue
            overlap = sum(min(c, rep_counts[t]) for t, c in counts.items())
            if overlap <= threshold * longest:
                continue
            if line_similarity(rec, rep) > threshold:
                break
        else:
            reps.append((rec, tokens, counts, size))
    return 100.0 * (1.0 - len(reps) / total)


def compute_report(
    code: CodeSnippet | str,
    n_values: Sequence[int] = (2, 3, 4),
    editsim_threshold: float = 0.8,
) -> MetricsReport:
    """Assemble all metrics for one snippet.

    ``n_values`` must be non-empty and include 3 so the aggregate
    (mean of rep-3, rep-line, sim-line) is defined.
    """
    if not n_values:
        raise ValueError("n_values must be non-empty")
    if 3 not in n_values:
        raise ValueError("n_values must include 3 so the aggregate is defined")
    snippet = as_snippet(code)
    tokens = _snippet_tokens(snippet)
    records = split_lines(snippet.code, drop_empty=True)
    reps = {n: rep_n(snippet, n, _tokens=tokens) for n in n_values}
    line_rep = rep_line(snippet)
    line_sim = sim_line(snippet, threshold=editsim_threshold)
    aggregate = (reps[3] + line_rep + line_sim) / 3.0
    return MetricsReport(
        rep_n=reps,
        rep_line=line_rep,
        sim_line=line_sim,
        rep_aggregate=aggregate,
        token_count=len(tokens),
        line_count=len(records),
    )
