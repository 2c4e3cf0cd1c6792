from __future__ import annotations

import random

import pytest
from hypothesis import given, strategies as st

from derep.lexing import split_lines
from derep.metrics import (
    compute_report,
    line_similarity,
    rep_line,
    rep_n,
    sim_line,
    token_edit_distance,
)

# --- independent oracles ----------------------------------------------------


def oracle_rep_n(tokens: list[str], n: int) -> float:
    grams = [tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1)]
    if len(grams) <= 1:
        return 0.0
    return 100.0 * (1.0 - len(set(grams)) / len(grams))


def oracle_rep_line(code: str) -> float:
    lines = [l.strip() for l in code.split("\n") if l.strip()]
    if len(lines) <= 1:
        return 0.0
    return 100.0 * (1.0 - len(set(lines)) / len(lines))


def oracle_edit_distance(a: list[str], b: list[str]) -> int:
    table = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(len(a) + 1):
        table[i][0] = i
    for j in range(len(b) + 1):
        table[0][j] = j
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            table[i][j] = min(
                table[i - 1][j] + 1,
                table[i][j - 1] + 1,
                table[i - 1][j - 1] + (a[i - 1] != b[j - 1]),
            )
    return table[-1][-1]


def code_from_tokens(tokens: list[str], per_line: int = 8) -> str:
    lines = [
        " ".join(tokens[i:i + per_line]) for i in range(0, len(tokens), per_line)
    ]
    return "\n".join(lines)


token_lists = st.lists(st.sampled_from(["a", "b", "c", "d", "kk", "z9"]), max_size=40)


# --- rep-n -------------------------------------------------------------------


class TestRepN:
    def test_alternating_bigrams(self):
        # tokens a b a b a b: 5 bigrams, 2 unique -> 60.0
        assert rep_n("a b a b a b", 2) == pytest.approx(60.0)

    def test_unigram_run(self):
        # x x x x: 4 unigrams, 1 unique -> 75.0
        assert rep_n("x x x x", 1) == pytest.approx(75.0)

    def test_all_distinct(self):
        assert rep_n("q w e r t y", 2) == 0.0

    def test_single_ngram_is_zero(self):
        assert rep_n("a b c", 3) == 0.0
        assert rep_n("a", 1) == 0.0
        assert rep_n("", 2) == 0.0

    def test_too_few_tokens(self):
        assert rep_n("a b", 4) == 0.0

    def test_n_zero_rejected(self):
        with pytest.raises(ValueError):
            rep_n("a b c", 0)
        with pytest.raises(ValueError):
            rep_n("a b c", -2)

    @given(token_lists, st.integers(min_value=1, max_value=5))
    def test_matches_oracle_exactly(self, tokens, n):
        code = code_from_tokens(tokens)
        assert rep_n(code, n) == oracle_rep_n(tokens, n)

    @given(token_lists)
    def test_rename_bijection_invariance(self, tokens):
        renamed = [t + "_r" for t in tokens]
        for n in (1, 2, 3):
            assert rep_n(code_from_tokens(tokens), n) == rep_n(
                code_from_tokens(renamed), n
            )


# --- rep-line ----------------------------------------------------------------


class TestRepLine:
    def test_one_duplicate_of_three(self):
        assert rep_line("x = 1\ny = 2\nx = 1") == pytest.approx(100 * (1 - 2 / 3))

    def test_all_distinct(self):
        assert rep_line("a = 1\nb = 2\nc = 3") == 0.0

    def test_four_copies(self):
        assert rep_line("ping()\nping()\nping()\nping()") == pytest.approx(75.0)

    def test_empty_lines_removed(self):
        assert rep_line("x = 1\n\n\nx = 1") == pytest.approx(50.0)

    def test_identity_ignores_surrounding_whitespace(self):
        assert rep_line("x = 1\n    x = 1") == pytest.approx(50.0)

    def test_small_inputs(self):
        assert rep_line("") == 0.0
        assert rep_line("lonely()") == 0.0

    @given(st.lists(st.sampled_from(["x = 1", "y = 2", "z = 3", "w()"]), max_size=30))
    def test_matches_set_count_oracle(self, lines):
        code = "\n".join(lines)
        assert rep_line(code) == oracle_rep_line(code)


# --- line similarity ----------------------------------------------------------


def records(code: str):
    return split_lines(code, drop_empty=True)


class TestLineSimilarity:
    def test_identical(self):
        a, b = records("assert f(1)\nassert f(1)")
        assert line_similarity(a, b) == 1.0

    def test_one_substitution_of_four(self):
        a, b = records("assert count(0) == 1\nassert count(1) == 1")
        assert a.token_texts == ("assert", "count", "0", "1")
        assert line_similarity(a, b) == pytest.approx(0.75)

    def test_disjoint_equal_length(self):
        a, b = records("a b c\nx y z")
        assert line_similarity(a, b) == 0.0

    def test_both_empty_token_lists(self):
        a, b = records("###\n!!!")
        assert line_similarity(a, b) == 1.0

    @given(token_lists, token_lists)
    def test_symmetric_and_bounded(self, ta, tb):
        a = records(" ".join(ta) or "#")[0]
        b = records(" ".join(tb) or "#")[0]
        assert line_similarity(a, b) == pytest.approx(line_similarity(b, a))
        assert 0.0 <= line_similarity(a, b) <= 1.0

    @given(token_lists)
    def test_reflexive(self, tokens):
        rec = records(" ".join(tokens) or "#")[0]
        assert line_similarity(rec, rec) == 1.0

    @given(token_lists, token_lists)
    def test_edit_distance_matches_oracle(self, ta, tb):
        assert token_edit_distance(ta, tb) == oracle_edit_distance(ta, tb)


# --- sim-line ------------------------------------------------------------------


SIMILAR_PAIR_A = "res = func(aa, bb, cc, dd)\nres = func(aa, bb, cc, ee)"
SIMILAR_PAIR_B = "out = gather(kk, ll, mm, nn)\nout = gather(kk, ll, mm, pp)"


class TestSimLine:
    def test_all_identical(self):
        for k in (2, 3, 5):
            code = "\n".join(["total += 1"] * k)
            assert sim_line(code) == pytest.approx(100 * (1 - 1 / k))

    def test_pairwise_dissimilar(self):
        assert sim_line("a b c\nd e f\ng h i") == 0.0

    def test_two_similar_pairs(self):
        # four lines forming two similarity sets -> 100 * (1 - 2/4)
        code = SIMILAR_PAIR_A + "\n" + SIMILAR_PAIR_B
        first, second = records(SIMILAR_PAIR_A)
        assert line_similarity(first, second) > 0.8  # construction sanity
        assert sim_line(code) == pytest.approx(50.0)

    def test_small_inputs(self):
        assert sim_line("") == 0.0
        assert sim_line("one line only") == 0.0

    def test_greedy_first_fit_partition(self):
        # the partition count must match an order-respecting oracle that
        # assigns each line to the first set whose founder is similar
        code = SIMILAR_PAIR_A + "\n" + SIMILAR_PAIR_B + "\n" + SIMILAR_PAIR_A
        recs = records(code)
        founders = []
        for rec in recs:
            for f in founders:
                if line_similarity(rec, f) > 0.8:
                    break
            else:
                founders.append(rec)
        assert sim_line(code) == pytest.approx(100 * (1 - len(founders) / len(recs)))

    @given(st.lists(st.sampled_from(
        ["res = func(aa, bb, cc, dd)", "res = func(aa, bb, cc, ee)",
         "out = gather(kk, ll, mm, nn)", "zz = 1", "####"]), max_size=25))
    def test_never_below_rep_line(self, lines):
        code = "\n".join(lines)
        assert sim_line(code) >= rep_line(code) - 1e-9

    @given(st.lists(st.sampled_from(
        ["res = func(aa, bb, cc, dd)", "total += 1", "out = gather(kk)"]),
        min_size=1, max_size=15))
    def test_duplication_monotonicity(self, lines):
        code = "\n".join(lines)
        doubled = code + "\n" + code
        assert rep_line(doubled) >= rep_line(code) - 1e-9
        assert sim_line(doubled) >= sim_line(code) - 1e-9


# --- assembled report -----------------------------------------------------------


class TestComputeReport:
    def test_empty_snippet_all_zero(self):
        report = compute_report("")
        assert report.rep_n == {2: 0.0, 3: 0.0, 4: 0.0}
        assert report.rep_line == 0.0
        assert report.sim_line == 0.0
        assert report.rep_aggregate == 0.0
        assert report.token_count == 0
        assert report.line_count == 0

    def test_aggregate_is_mean_of_three(self):
        code = "\n".join(["total += 1"] * 4) + "\nfinal = total"
        report = compute_report(code)
        expected = (report.rep_n[3] + report.rep_line + report.sim_line) / 3
        assert report.rep_aggregate == pytest.approx(expected)

    def test_requires_n_three(self):
        with pytest.raises(ValueError):
            compute_report("x", n_values=[2, 4])
        with pytest.raises(ValueError):
            compute_report("x", n_values=[])

    def test_counts(self):
        report = compute_report("a b\n\nc")
        assert report.token_count == 3
        assert report.line_count == 2

    def test_percentages_in_range(self):
        rng = random.Random(3)
        vocab = ["alpha", "beta", "gamma", "1", "x"]
        for _ in range(50):
            tokens = [rng.choice(vocab) for _ in range(rng.randrange(0, 60))]
            report = compute_report(code_from_tokens(tokens))
            for value in (*report.rep_n.values(), report.rep_line,
                          report.sim_line, report.rep_aggregate):
                assert 0.0 <= value <= 100.0
