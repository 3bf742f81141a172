"""Vertex words, angle-sum systems and corner counting for 3-edge tiles.

Corners are named by position: corner ``k`` sits between edge ``k`` (arriving)
and edge ``k+1`` (leaving), so for a word ``x y z`` corner ``A`` joins ``x``
and ``y``, ``B`` joins ``y`` and ``z``, and ``C`` joins ``z`` and ``x``.

Around a vertex the tiles are listed anticlockwise.  Each tile contributes
the edge leaving its corner; the edge arriving at its corner is shared with
the next tile, which must show the partner label there.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linprog

from .prototile import EdgeType, base_letter, partner

CORNER_NAMES = "ABCDEFGH"

# The five cases for an ααβ tile with vertices of degrees 4 and 5, keyed by
# their (degree-5, degree-4) canonical words.
CASE_TABLE_AAB = {
    ("ααααα", "βαβα"): "Case 1",
    ("ααααα", "βααα"): "Case 2",
    ("βαβαα", "βααα"): "Case 3",
    ("βαβαα", "αααα"): "Case 4",
    ("βαααα", "βαβα"): "Case 5",
    ("βαααα", "αααα"): "Case 5",
}

INTERIOR_TYPES = ("a ā β", "α α α", "α α β", "α β γ")
NON_INTERIOR_TYPES = ("a a ā",)


def canonical_rotation(seq: Sequence) -> tuple:
    """Lexicographically largest rotation."""
    seq = tuple(seq)
    return max(seq[k:] + seq[:k] for k in range(len(seq))) if seq else seq


@dataclass(frozen=True)
class VertexWord:
    """Anticlockwise edge letters around a vertex and the tile corners between them."""

    labels: tuple[str, ...]
    corners: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.labels)

    def __str__(self) -> str:
        return "(" + "".join(self.labels) + ")"

    @property
    def text(self) -> str:
        return "".join(self.labels)

    def corner_counts(self, n_corners: int) -> tuple[int, ...]:
        c = Counter(self.corners)
        return tuple(c.get(k, 0) for k in range(n_corners))


def _corner_edges(edge_type: EdgeType) -> list[tuple[str, str]]:
    """(arriving label, leaving label) for each corner."""
    w = edge_type.word
    n = len(w)
    return [(w[k], w[(k + 1) % n]) for k in range(n)]


def successors(edge_type: EdgeType) -> dict[int, list[int]]:
    """Corners that may follow each corner anticlockwise around a vertex."""
    ce = _corner_edges(edge_type)
    return {
        i: [j for j, (_, out_j) in enumerate(ce) if out_j == partner(in_i)]
        for i, (in_i, _) in enumerate(ce)
    }


def _symmetric(edge_type: EdgeType) -> bool:
    """All edges mutually congruent and self-congruent (the ααα case)."""
    letters = {base_letter(x) for x in edge_type.word}
    return len(letters) == 1 and not edge_type.pairings


def enumerate_vertex_words(edge_type: EdgeType, degree: int) -> list[VertexWord]:
    """All vertex words of ``degree`` up to rotation, largest canonical word first.

    Distinct corner cycles with the same letters are kept apart, since they
    give different angle sums.  For an ααα tile the corners are equivalent
    under its rotational symmetry, so one word per letter pattern is kept.
    """
    if degree < 1:
        return []
    succ = successors(edge_type)
    ce = _corner_edges(edge_type)
    found: dict[tuple, VertexWord] = {}

    def extend(path: list[int]):
        if len(path) == degree:
            if path[0] in succ[path[-1]]:
                rot = canonical_rotation(
                    [(base_letter(ce[c][1]), c) for c in path]
                )
                labels = tuple(x for x, _ in rot)
                corners = tuple(c for _, c in rot)
                key = labels if _symmetric(edge_type) else corners
                if key not in found:
                    found[key] = VertexWord(labels, corners)
            return
        for nxt in succ[path[-1]]:
            path.append(nxt)
            extend(path)
            path.pop()

    for start in range(len(ce)):
        extend([start])
    return sorted(found.values(), key=lambda v: (v.labels, v.corners), reverse=True)


@dataclass(frozen=True)
class Equation:
    """``Σ coeffs[k]·θ_k = 2π``."""

    coeffs: tuple[int, ...]
    word: VertexWord | None = None

    def __str__(self) -> str:
        terms = []
        for k, c in enumerate(self.coeffs):
            if c:
                sym = f"θ_{CORNER_NAMES[k].lower()}"
                terms.append(sym if c == 1 else f"{c}{sym}")
        return " + ".join(terms) + " = 2π"


@dataclass(frozen=True)
class AngleSystem:
    equations: tuple[Equation, ...]
    source_words: tuple[VertexWord, ...]
    n_corners: int = 3
    extra: tuple[Equation, ...] = ()
    label: str = ""

    def __str__(self) -> str:
        return "{" + ", ".join(str(e) for e in self.equations) + "}"

    def matrix(self) -> tuple[np.ndarray, np.ndarray]:
        rows = [e.coeffs for e in self.equations]
        rhs = [2.0] * len(rows)
        for e in self.extra:
            rows.append(e.coeffs)
            rhs.append(0.0)
        return np.array(rows, dtype=float).reshape(-1, self.n_corners), np.array(rhs)

    def is_consistent(self) -> bool:
        return self.margin() > 1e-9

    def margin(self) -> float:
        """Largest ``t`` with every angle in ``[t, 2π - t]`` (angles in units of π)."""
        a, b = self.matrix()
        n = self.n_corners
        c = np.zeros(n + 1)
        c[-1] = -1.0
        ub = np.zeros((2 * n, n + 1))
        for k in range(n):
            ub[k, k], ub[k, -1] = -1.0, 1.0
            ub[n + k, k], ub[n + k, -1] = 1.0, 1.0
        bub = np.concatenate([np.zeros(n), 2.0 * np.ones(n)])
        aeq = np.hstack([a, np.zeros((len(a), 1))]) if len(a) else None
        res = linprog(c, A_ub=ub, b_ub=bub, A_eq=aeq, b_eq=b if len(a) else None,
                      bounds=[(None, None)] * (n + 1), method="highs")
        return float(res.x[-1]) if res.status == 0 else -np.inf

    def solution(self) -> list[str]:
        """Reduced equations in multiples of π, e.g. ``θ_a = 2π/5``."""
        rows = [[Fraction(x) for x in e.coeffs] + [Fraction(2)] for e in self.equations]
        rows += [[Fraction(x) for x in e.coeffs] + [Fraction(0)] for e in self.extra]
        rref = _rref(rows, self.n_corners)
        out = []
        for row in rref:
            terms = []
            for k in range(self.n_corners):
                c = row[k]
                if c:
                    sym = f"θ_{CORNER_NAMES[k].lower()}"
                    if c == 1:
                        terms.append(sym)
                    elif c == -1:
                        terms.append("-" + sym)
                    else:
                        terms.append(f"{c}{sym}")
            if terms:
                out.append(" + ".join(terms).replace("+ -", "- ") + " = " + _pi(row[-1]))
        return out


def _pi(q: Fraction) -> str:
    if q == 0:
        return "0"
    num = "π" if q.numerator == 1 else ("-π" if q.numerator == -1 else f"{q.numerator}π")
    return num if q.denominator == 1 else f"{num}/{q.denominator}"


def _rref(rows: list[list[Fraction]], n_vars: int) -> list[list[Fraction]]:
    m = [list(r) for r in rows]
    r = 0
    for col in range(n_vars):
        piv = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][col]
        m[r] = [x / p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
    return [row for row in m if any(row)]


def _equal_angle_rule(edge_type: EdgeType) -> tuple[Equation, ...]:
    if not _symmetric(edge_type):
        return ()
    n = edge_type.n_edges
    return tuple(
        Equation(tuple(1 if j == k else (-1 if j == k + 1 else 0) for j in range(n)))
        for k in range(n - 1)
    )


def _case_label(edge_type: EdgeType, words_by_degree: dict[int, tuple[VertexWord, ...]]) -> str:
    if edge_type.cyclically_equal("α α β") and sorted(words_by_degree) == [4, 5]:
        w5, w4 = words_by_degree[5], words_by_degree[4]
        if len(w5) == 1 and len(w4) == 1:
            return CASE_TABLE_AAB.get((w5[0].text, w4[0].text), "")
    return ""


def _system(edge_type: EdgeType, words: Iterable[VertexWord], label: str = "") -> AngleSystem:
    n = edge_type.n_edges
    words = tuple(sorted(words, key=lambda w: -w.degree))
    eqs = []
    for w in words:
        e = Equation(w.corner_counts(n), w)
        if e.coeffs not in [x.coeffs for x in eqs]:
            eqs.append(e)
    return AngleSystem(tuple(eqs), words, n, _equal_angle_rule(edge_type), label)


def angle_systems(edge_type: EdgeType, degrees: Iterable[int],
                  mixed: bool = False) -> list[AngleSystem]:
    """Consistent systems choosing one word per degree.

    With ``mixed=True`` every nonempty subset of words per degree is tried.
    Systems numbered in the ααβ case table carry that label.
    """
    degrees = sorted(set(degrees))
    per_degree = []
    for d in degrees:
        words = enumerate_vertex_words(edge_type, d)
        if not words:
            return []
        if mixed:
            subsets = [c for r in range(1, len(words) + 1) for c in itertools.combinations(words, r)]
        else:
            subsets = [(w,) for w in words]
        per_degree.append(subsets)
    out = []
    for choice in itertools.product(*per_degree):
        by_degree = dict(zip(degrees, choice))
        flat = [w for ws in choice for w in ws]
        sys = _system(edge_type, flat, _case_label(edge_type, by_degree))
        if sys.is_consistent():
            out.append(sys)
    return sorted(out, key=lambda s: s.label or "~")


@dataclass
class CaseResult:
    label: str
    angle_system: AngleSystem
    corner_counts: dict[str, int]
    verdict: str
    reason: str = ""
    splits: list[dict] = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return self.verdict == "Feasible"


@dataclass
class FeasibilityReport:
    tile_type: str
    cases: list[CaseResult]
    overall: str
    reason: str = ""
    flags: list[str] = field(default_factory=list)


def _splits(n: int, k: int):
    """Compositions of ``n`` into ``k`` positive parts."""
    for cuts in itertools.combinations(range(1, n), k - 1):
        b = (0,) + cuts + (n,)
        yield tuple(b[i + 1] - b[i] for i in range(k))


def _counts_text(counts: dict[str, int]) -> str:
    return ", ".join(f"{k}={v}" for k, v in counts.items())


def check_tile_type(edge_type: EdgeType, face_count: int,
                    vertex_degrees: Sequence[int]) -> FeasibilityReport:
    """Smoothability verdict for one 3-edge tile type."""
    name = str(edge_type)
    n = edge_type.n_edges
    if any(edge_type.cyclically_equal(t) for t in NON_INTERIOR_TYPES):
        return FeasibilityReport(name, [], "Infeasible", "not an interior tile type",
                                 ["rule: a a ā never occurs as an interior tile"])
    deg_count = Counter(vertex_degrees)
    degrees = sorted(deg_count)
    words = {d: enumerate_vertex_words(edge_type, d) for d in degrees}
    missing = [d for d in degrees if not words[d]]
    if missing:
        return FeasibilityReport(name, [], "Infeasible",
                                 f"no vertex word of degree {', '.join(map(str, missing))}")
    flags = []
    if _symmetric(edge_type):
        flags.append("rule: corners of an α α α tile have equal angles")
    subsets = {
        d: [c for r in range(1, min(len(words[d]), deg_count[d]) + 1)
            for c in itertools.combinations(words[d], r)]
        for d in degrees
    }
    cases: list[CaseResult] = []
    numbered = 0
    for choice in itertools.product(*(subsets[d] for d in degrees)):
        by_degree = dict(zip(degrees, choice))
        flat = [w for ws in choice for w in ws]
        label = _case_label(edge_type, by_degree)
        system = _system(edge_type, flat, label)
        if not system.is_consistent():
            continue
        if not label:
            numbered += 1
            label = f"Case {numbered}"
        splits = []
        for parts in itertools.product(*(_splits(deg_count[d], len(by_degree[d])) for d in degrees)):
            total = np.zeros(n, dtype=int)
            assignment = {}
            for d, ws, ks in zip(degrees, choice, parts):
                for w, k in zip(ws, ks):
                    total += k * np.array(w.corner_counts(n))
                    assignment[str(w)] = k
            if _symmetric(edge_type):
                # corners are interchangeable: only the total is meaningful
                s = int(total.sum())
                total = np.array([s // n + (1 if i < s % n else 0) for i in range(n)])
            counts = {CORNER_NAMES[i]: int(total[i]) for i in range(n)}
            splits.append({"vertices": assignment, "corner_counts": counts})
        good = [s for s in splits if all(v == face_count for v in s["corner_counts"].values())]
        rep = good[0] if good else splits[0]
        if good:
            verdict, reason = "Feasible", ""
        else:
            bad = {k: v for k, v in rep["corner_counts"].items() if v != face_count}
            verdict = "Infeasible"
            reason = "; ".join(f"corner {k} count {v} ≠ {face_count}" for k, v in bad.items())
            if len(splits) > 1:
                reason += f" (and in every one of {len(splits)} splits)"
        cases.append(CaseResult(label, system, rep["corner_counts"],
                                verdict, reason, splits))
    if not cases:
        return FeasibilityReport(name, [], "Infeasible", "no consistent angle system", flags)
    cases.sort(key=lambda c: c.label)
    overall = "Feasible" if any(c.feasible for c in cases) else "Infeasible"
    return FeasibilityReport(name, cases, overall, "", flags)


def smoothability_check(face_count: int, vertex_degrees: Sequence[int],
                        types: Sequence[str] | None = None) -> dict[str, FeasibilityReport]:
    """Reports for every 3-edge tile type (or those named in ``types``)."""
    if face_count < 1:
        raise ValueError("face_count must be positive")
    names = list(types) if types is not None else list(NON_INTERIOR_TYPES + INTERIOR_TYPES)
    return {t: check_tile_type(EdgeType.parse(t), face_count, vertex_degrees) for t in names}


def case_labels(report: FeasibilityReport) -> list[str]:
    return sorted({c.label for c in report.cases})
