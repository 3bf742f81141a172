import itertools
import time
import unicodedata

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tilekit.combinatorics import (angle_systems, case_labels, check_tile_type,
                                   enumerate_vertex_words, smoothability_check)
from tilekit.prototile import EdgeType, partner

TYPES = ["α α β", "a ā β", "α α α", "α β γ", "a a ā"]


def _base(label: str) -> str:
    return "".join(ch for ch in unicodedata.normalize("NFD", label) if ch not in "\u0304~")


def brute_force_words(edge_type: EdgeType, degree: int) -> set[tuple[str, ...]]:
    """Letter patterns of every closed corner cycle, found by exhaustive product.

    Corner ``k`` lies between edge ``k`` (arriving) and ``k + 1`` (leaving); corner
    ``j`` may follow corner ``i`` anticlockwise when its leaving edge mates the
    arriving edge of ``i``.  A word is written with the base letters of leaving edges.
    """
    w = edge_type.word
    n = len(w)
    follows = {(i, j) for i in range(n) for j in range(n) if w[(j + 1) % n] == partner(w[i])}
    out = set()
    for seq in itertools.product(range(n), repeat=degree):
        if all((seq[i], seq[(i + 1) % degree]) in follows for i in range(degree)):
            lab = tuple(_base(w[(c + 1) % n]) for c in seq)
            out.add(max(lab[k:] + lab[:k] for k in range(degree)))
    return out


def labels_of(words):
    return {tuple(w.labels) for w in words}


def test_degree_five_words():
    words = enumerate_vertex_words(EdgeType.parse("α α β"), 5)
    assert {w.text for w in words} == {"ααααα", "βαααα", "βαβαα"}


def test_degree_four_words():
    words = enumerate_vertex_words(EdgeType.parse("α α β"), 4)
    assert {w.text for w in words} == {"αααα", "βαβα", "βααα"}


def test_three_distinct_edges_need_multiples_of_three():
    et = EdgeType.parse("α β γ")
    assert enumerate_vertex_words(et, 4) == []
    assert enumerate_vertex_words(et, 5) == []
    assert len(enumerate_vertex_words(et, 3)) == 1


@pytest.mark.parametrize("t", TYPES)
@pytest.mark.parametrize("d", range(2, 7))
def test_words_match_brute_force(t, d):
    et = EdgeType.parse(t)
    assert labels_of(enumerate_vertex_words(et, d)) == brute_force_words(et, d)


@pytest.mark.parametrize("t", TYPES)
def test_words_sorted_and_canonical(t):
    et = EdgeType.parse(t)
    for d in range(2, 7):
        words = enumerate_vertex_words(et, d)
        keys = [w.labels for w in words]
        assert keys == sorted(keys, reverse=True)
        for w in words:
            assert w.degree == d
            assert w.labels == max(w.labels[k:] + w.labels[:k] for k in range(d))


@settings(max_examples=30)
@given(st.integers(2, 9))
def test_no_consecutive_base_edges(d):
    for w in enumerate_vertex_words(EdgeType.parse("α α β"), d):
        lab = w.labels
        assert not any(lab[i] == "β" and lab[(i + 1) % d] == "β" for i in range(d))


def test_case_table_equations():
    systems = angle_systems(EdgeType.parse("α α β"), [4, 5])
    got = {}
    for s in systems:
        got.setdefault(s.label, []).append(str(s))
    assert got == {
        "Case 1": ["{5θ_a = 2π, 2θ_b + 2θ_c = 2π}"],
        "Case 2": ["{5θ_a = 2π, 2θ_a + θ_b + θ_c = 2π}"],
        "Case 3": ["{θ_a + 2θ_b + 2θ_c = 2π, 2θ_a + θ_b + θ_c = 2π}"],
        "Case 4": ["{θ_a + 2θ_b + 2θ_c = 2π, 4θ_a = 2π}"],
        "Case 5": ["{3θ_a + θ_b + θ_c = 2π, 2θ_b + 2θ_c = 2π}",
                   "{3θ_a + θ_b + θ_c = 2π, 4θ_a = 2π}"],
    }


def test_equation_coefficients_sum_to_degree():
    for s in angle_systems(EdgeType.parse("α α β"), [4, 5]):
        for e, w in zip(s.equations, s.source_words):
            assert sum(e.coeffs) == w.degree and min(e.coeffs) >= 0


def test_case_solutions():
    sols = {s.label: s.solution() for s in angle_systems(EdgeType.parse("α α β"), [4, 5])}
    assert sols["Case 1"] == ["θ_a = 2π/5", "θ_b + θ_c = π"]
    assert sols["Case 4"] == ["θ_a = π/2", "θ_b + θ_c = 3π/4"]


def test_single_word_system():
    systems = angle_systems(EdgeType.parse("α α β"), [4])
    assert "{4θ_a = 2π}" in [str(s) for s in systems]


def test_contradictory_systems_dropped():
    # one word per degree: 5θ_a = 2π together with 4θ_a = 2π must not survive
    for s in angle_systems(EdgeType.parse("α α β"), [4, 5]):
        assert not ({"5θ_a = 2π", "4θ_a = 2π"} <= {str(e) for e in s.equations})
    assert angle_systems(EdgeType.parse("α α α"), [4, 5]) == []


def test_mixed_case_five_both_words_inconsistent():
    systems = angle_systems(EdgeType.parse("α α β"), [4, 5], mixed=True)
    assert all(len(s.source_words) == 2 for s in systems)


def test_triaugmented_prism_infeasible():
    t0 = time.perf_counter()
    reports = smoothability_check(14, [4] * 3 + [5] * 6)
    assert time.perf_counter() - t0 < 1.0
    assert set(reports) == set(TYPES)
    assert all(r.overall == "Infeasible" for r in reports.values())
    aab = reports["α α β"]
    assert case_labels(aab) == ["Case 1", "Case 2", "Case 3", "Case 4", "Case 5"]
    counts = {}
    for c in aab.cases:
        counts.setdefault(c.label, []).append(c.corner_counts)
    # totals over all nine vertices, each counted by hand from the words
    assert counts["Case 1"] == [{"A": 30, "B": 6, "C": 6}]
    assert counts["Case 2"] == [{"A": 36, "B": 3, "C": 3}]
    assert counts["Case 3"] == [{"A": 12, "B": 15, "C": 15}]
    assert counts["Case 4"] == [{"A": 18, "B": 12, "C": 12}]
    assert sorted(c["A"] for c in counts["Case 5"]) == [18, 30]
    assert "30 ≠ 14" in aab.cases[0].reason
    assert reports["a ā β"].cases[0].corner_counts["A"] == 30
    assert "not an interior" in reports["a a ā"].reason


def test_corner_count_conservation():
    # every vertex slot is one tile corner: the totals add up to the slot count
    degrees = [4] * 3 + [5] * 6
    for r in smoothability_check(14, degrees).values():
        for c in r.cases:
            assert sum(c.corner_counts.values()) == sum(degrees)


def test_tetrahedral_pattern_feasible():
    r = check_tile_type(EdgeType.parse("α β γ"), 4, [3, 3, 3, 3])
    assert r.overall == "Feasible"
    ok = [c for c in r.cases if c.feasible]
    assert ok and all(set(c.corner_counts.values()) == {4} for c in ok)
    assert sum(ok[0].corner_counts.values()) == 3 * 4


def test_overall_iff_all_cases_infeasible():
    for faces, degrees in [(14, [4] * 3 + [5] * 6), (4, [3] * 4), (8, [4] * 6), (20, [5] * 12)]:
        for r in smoothability_check(faces, degrees).values():
            if r.cases:
                assert (r.overall == "Infeasible") == all(not c.feasible for c in r.cases)


def test_octahedral_and_icosahedral_patterns():
    assert smoothability_check(8, [4] * 6)["α α α"].overall == "Feasible"
    assert smoothability_check(20, [5] * 12)["α α α"].overall == "Feasible"
