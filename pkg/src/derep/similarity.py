"""Cosine similarity over snippet lines, plus the truncation prefix
heuristic.

The document collection for IDF is always the current snippet's own lines,
so detection stays self-contained per snippet. IDF is smoothed:
``ln((1 + D) / (1 + d)) + 1`` with D = lines in context and d = lines
containing the token.

The similarity decision itself uses term-frequency cosine by default
(``idf_weight = 0``): with a snippet-local collection, full IDF weighting
suppresses exactly the tokens a repetition shares across lines and rejects
canonically repetitive statement pairs like ``int i = 0; / int j = 0;``.
The exponent is configurable up to 1.0, which restores the full TF-IDF
kernel. Lines that are identical except for numeric constants (``"1": 1,``
vs ``"2": 2,``) carry no shared tokens at all, so a digit-skeleton equality
check backs up the cosine.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from typing import Mapping, Sequence

from .lexing import LineRecord

TfIdfVector = dict[str, float]

_DIGITS_RE = re.compile(r"\d+")


def digit_skeleton(text: str) -> str:
    """The text with every digit run collapsed to '#': equal skeletons mean
    the lines differ only in numeric constants."""
    return _DIGITS_RE.sub("#", text)


class TfIdfContext:
    """Precomputed document frequencies for one snippet's lines.

    Building the context once per snippet keeps repeated ``is_similar``
    calls (the block-level sliding window in particular) cheap.
    """

    def __init__(
        self,
        lines: Sequence[LineRecord],
        cosine_threshold: float = 0.65,
        idf_weight: float = 0.0,
    ):
        self.lines = list(lines)
        self.cosine_threshold = cosine_threshold
        self.idf_weight = idf_weight
        self.doc_count = len(self.lines)
        df: Counter[str] = Counter()
        for rec in self.lines:
            df.update(set(rec.token_texts))
        base = 1 + self.doc_count
        self.idf: dict[str, float] = {
            tok: math.log(base / (1 + d)) + 1.0 for tok, d in df.items()
        }
        self._max_idf = math.log(base) + 1.0
        if idf_weight == 0.0:
            self._sim_idf: dict[str, float] = {}
        elif idf_weight == 1.0:
            self._sim_idf = self.idf
        else:
            self._sim_idf = {t: v ** idf_weight for t, v in self.idf.items()}

    def idf_of(self, token: str) -> float:
        # tokens never seen in the context get the max (d = 0) weight
        return self.idf.get(token, self._max_idf)

    def vector_from_counts(self, counts: Mapping[str, int]) -> TfIdfVector:
        return {tok: tf * self.idf_of(tok) for tok, tf in counts.items() if tf > 0}

    def vectorize(self, unit: Sequence[LineRecord]) -> TfIdfVector:
        counts: Counter[str] = Counter()
        for rec in unit:
            counts.update(rec.token_texts)
        return self.vector_from_counts(counts)

    def _similarity_vector(self, counts: Mapping[str, int]) -> TfIdfVector:
        if self.idf_weight == 0.0:
            return {tok: float(tf) for tok, tf in counts.items() if tf > 0}
        weights = self._sim_idf
        top = self._max_idf ** self.idf_weight
        return {
            tok: tf * weights.get(tok, top) for tok, tf in counts.items() if tf > 0
        }

    def cosine_counts(self, a: Counter[str], b: Counter[str]) -> float:
        if not a or not b or a.keys().isdisjoint(b.keys()):
            return 0.0
        return cosine(self._similarity_vector(a), self._similarity_vector(b))

    def similar_counts(self, a: Counter[str], b: Counter[str]) -> bool:
        return self.cosine_counts(a, b) >= self.cosine_threshold


def _as_context(context: "TfIdfContext | Sequence[LineRecord]",
                threshold: float | None = None) -> TfIdfContext:
    if isinstance(context, TfIdfContext):
        return context
    return TfIdfContext(context, cosine_threshold=0.65 if threshold is None else threshold)


def vectorize(unit: Sequence[LineRecord],
              corpus_context: "TfIdfContext | Sequence[LineRecord]") -> TfIdfVector:
    """Smoothed TF-IDF vector of a unit (one or more lines) against the
    snippet's lines as document collection. An empty unit yields the zero
    vector."""
    return _as_context(corpus_context).vectorize(unit)


def cosine(a: TfIdfVector, b: TfIdfVector) -> float:
    """Cosine similarity of two sparse vectors; zero vectors compare as 0."""
    if not a or not b:
        return 0.0
    if len(b) < len(a):
        a, b = b, a
    dot = sum(w * b[tok] for tok, w in a.items() if tok in b)
    if dot == 0.0:
        return 0.0
    norm_a = math.sqrt(sum(w * w for w in a.values()))
    norm_b = math.sqrt(sum(w * w for w in b.values()))
    return dot / (norm_a * norm_b)


def _joined_trimmed(unit: Sequence[LineRecord]) -> str:
    return "\n".join(rec.trimmed for rec in unit)


def skeleton_equal(a: Sequence[LineRecord], b: Sequence[LineRecord]) -> bool:
    """Non-empty units whose trimmed text matches after digit collapsing."""
    ta = _joined_trimmed(a)
    if not ta:
        return False
    return digit_skeleton(ta) == digit_skeleton(_joined_trimmed(b))


def is_similar(
    a: Sequence[LineRecord],
    b: Sequence[LineRecord],
    context: "TfIdfContext | Sequence[LineRecord]",
    threshold: float | None = None,
) -> bool:
    """True when the units' cosine meets the threshold or the units are
    digit-skeleton identical.

    Units with no tokens at all (symbol-art lines) have zero vectors, which
    cosine treats as dissimilar to everything; only exact skeleton equality
    can pair them.
    """
    ctx = _as_context(context, threshold)
    tau = ctx.cosine_threshold if threshold is None else threshold
    ca: Counter[str] = Counter()
    for rec in a:
        ca.update(rec.token_texts)
    cb: Counter[str] = Counter()
    for rec in b:
        cb.update(rec.token_texts)
    if ctx.cosine_counts(ca, cb) >= tau:
        return True
    return skeleton_equal(a, b)


def is_truncated_continuation(
    tail: LineRecord,
    unit: Sequence[LineRecord],
    min_tokens: int = 1,
) -> bool:
    """Does the snippet's final line look like a cut-off next occurrence?

    True when the tail's tokens are a prefix (at least ``min_tokens`` long)
    of the unit's first line's tokens, or the tail's trimmed text is a
    character prefix of that line's trimmed text.
    """
    if not unit:
        return False
    head = unit[0]
    tail_tokens = tail.token_texts
    if len(tail_tokens) >= min_tokens and tail_tokens == head.token_texts[: len(tail_tokens)]:
        return True
    return bool(tail.trimmed) and head.trimmed.startswith(tail.trimmed)
