"""Prototiles: a cyclic list of edges plus a triangulated interior patch.

Corner ``i`` sits at the start of edge ``i`` (and the end of edge ``i-1``).
The boundary runs anticlockwise seen from the side the normals point to.
"""

from __future__ import annotations

import math
import unicodedata
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from . import config
from .edges import SampledEdge, find_congruence, involution_axis, reverse
from .errors import AmbiguousType, DegenerateCorner, ValidationError, WrongTileType
from .geom3 import Line3, RigidMotion, lines_classification

GREEK = "αβγδεζηθικλμνξοπρστυφχψω"
LATIN = "abcdefghijklmnopqrstuvwxyz"
BAR = "̄"


def bar(label: str) -> str:
    return unicodedata.normalize("NFC", label + BAR)


def base_letter(label: str) -> str:
    """Class letter of a label: ``ā -> a``, ``α -> α``."""
    return unicodedata.normalize("NFD", label)[0]


def is_barred(label: str) -> bool:
    return BAR in unicodedata.normalize("NFD", label)


def partner(label: str) -> str:
    """Label an adjacent tile must show on the shared edge."""
    b = base_letter(label)
    if b in GREEK:
        return label
    return b if is_barred(label) else bar(b)


@dataclass(frozen=True, eq=False)
class Prototile:
    edges: tuple[SampledEdge, ...]
    vertices: np.ndarray
    faces: np.ndarray
    name: str = "tile"

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(self.edges))
        v = np.array(self.vertices, dtype=float).reshape(-1, 3)
        f = np.array(self.faces, dtype=np.int64).reshape(-1, 3)
        v.setflags(write=False)
        f.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "faces", f)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.vertices.max(axis=0) - self.vertices.min(axis=0)))

    @property
    def corners(self) -> np.ndarray:
        """Corner points; empty for a one-edge (closed loop) tile."""
        if self.n_edges == 1 and self.edges[0].is_closed():
            return np.zeros((0, 3))
        return np.array([e.start for e in self.edges])

    def corner_normal(self, i: int) -> np.ndarray:
        """Average of the two incident edges' boundary normals at corner ``i``."""
        n = self.edges[i].normals[0] + self.edges[i - 1].normals[-1]
        return n / np.linalg.norm(n)

    def patch_corner_normal(self, i: int) -> np.ndarray:
        """Average of the patch face normals around the patch vertex at corner ``i``."""
        k = int(np.argmin(np.linalg.norm(self.vertices - self.corners[i], axis=1)))
        fn = face_normals(self.vertices, self.faces)
        inc = np.any(self.faces == k, axis=1)
        n = fn[inc].sum(axis=0)
        return n / np.linalg.norm(n)

    def transformed(self, m: RigidMotion) -> "Prototile":
        return Prototile(
            tuple(e.transformed(m) for e in self.edges), m.apply(self.vertices), self.faces, self.name
        )

    def with_edges(self, edges: Sequence[SampledEdge]) -> "Prototile":
        return Prototile(tuple(edges), self.vertices, self.faces, self.name)

    def rotated_start(self, k: int) -> "Prototile":
        """Same tile with edge ``k`` renumbered as edge 0."""
        e = self.edges[k:] + self.edges[:k]
        return self.with_edges(e)

    def validate(self) -> None:
        """Raise ``ValidationError`` if the tile invariants fail."""
        eps = config.TOL.eps_pos(self.diameter)
        n = self.n_edges
        for i in range(n):
            gap = np.linalg.norm(self.edges[i].end - self.edges[(i + 1) % n].start)
            if gap > eps:
                raise ValidationError(f"boundary does not close between edge {i} and {(i + 1) % n} (gap {gap:.3g})")
        if len(self.faces):
            if self.faces.min() < 0 or self.faces.max() >= len(self.vertices):
                raise ValidationError("face index out of range")
            bverts = boundary_vertices(self.faces)
            d = _polyline_distance(self.vertices[bverts], self.edges)
            if len(d) and d.max() > eps:
                raise ValidationError(f"patch boundary leaves the edge samples (worst {d.max():.3g})")
        for i, a in enumerate(corner_angles(self)):
            if not 0.0 < a < 2 * math.pi:
                raise ValidationError(f"corner {i} angle {a} outside (0, 2π)")


def _polyline_distance(points: np.ndarray, edges: Sequence[SampledEdge]) -> np.ndarray:
    """Distance from each point to the nearest boundary polyline segment."""
    a = np.vstack([e.points[:-1] for e in edges])
    b = np.vstack([e.points[1:] for e in edges])
    seg = b - a
    length2 = np.maximum((seg ** 2).sum(axis=1), 1e-300)
    # only segments near each point matter; use the nearest few segment midpoints
    tree = cKDTree((a + b) / 2)
    k = min(8, len(a))
    _, idx = tree.query(points, k=k)
    idx = idx.reshape(len(points), k)
    d = points[:, None, :] - a[idx]
    s = np.clip(np.einsum("pkj,pkj->pk", d, seg[idx]) / length2[idx], 0.0, 1.0)
    foot = a[idx] + s[..., None] * seg[idx]
    return np.linalg.norm(points[:, None, :] - foot, axis=2).min(axis=1)


def face_normals(vertices: np.ndarray, faces: np.ndarray) -> np.ndarray:
    a, b, c = (vertices[faces[:, k]] for k in range(3))
    n = np.cross(b - a, c - a)
    return n / np.linalg.norm(n, axis=1, keepdims=True)


def boundary_vertices(faces: np.ndarray) -> np.ndarray:
    e = np.sort(np.vstack([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]]), axis=1)
    uniq, counts = np.unique(e, axis=0, return_counts=True)
    return np.unique(uniq[counts == 1])


def corner_angles(t: Prototile) -> list[float]:
    """Interior angle at each corner, measured in the tangent plane there."""
    out = []
    eps_ang = config.TOL.eps_ang
    for i in range(len(t.corners)):
        n = t.corner_normal(i)
        u = t.edges[i].start_tangent()
        v = -t.edges[i - 1].end_tangent()
        u = u - np.dot(u, n) * n
        v = v - np.dot(v, n) * n
        u /= np.linalg.norm(u)
        v /= np.linalg.norm(v)
        s = float(np.dot(n, np.cross(u, v)))
        c = float(np.dot(u, v))
        if abs(s) < eps_ang and c > 0:
            raise DegenerateCorner(f"corner {i}: incident tangents parallel")
        out.append(math.atan2(s, c) % (2 * math.pi))
    return out


def corner_normal_lines(t: Prototile) -> list[Line3]:
    return [Line3(p, t.corner_normal(i)) for i, p in enumerate(t.corners)]


@dataclass(frozen=True)
class EdgeType:
    """Cyclic edge word; ``pairings`` maps each Latin label to its barred partner."""

    word: tuple[str, ...]
    pairings: dict = field(default_factory=dict)

    def __str__(self) -> str:
        return " ".join(self.word)

    @classmethod
    def parse(cls, text: str) -> "EdgeType":
        text = unicodedata.normalize("NFD", text.replace(" ", "").replace("~", BAR))
        labels: list[str] = []
        for ch in text:
            if ch == BAR:
                labels[-1] = bar(labels[-1])
            else:
                labels.append(ch)
        pairings = {base_letter(l): bar(base_letter(l)) for l in labels if base_letter(l) in LATIN}
        return cls(tuple(labels), pairings)

    @property
    def n_edges(self) -> int:
        return len(self.word)

    @staticmethod
    def _relabelled(word) -> tuple:
        """Letters renamed by first occurrence; the first-seen member of a pair is unbarred."""
        seen: dict[str, tuple[int, str]] = {}
        out = []
        for l in word:
            b = base_letter(l)
            if b not in seen:
                seen[b] = (len(seen), l)
            k, first = seen[b]
            out.append((b in GREEK, k, l != first))
        return tuple(out)

    def cyclically_equal(self, other: "EdgeType | str") -> bool:
        """Equal up to a cyclic shift and a consistent renaming of letters."""
        if isinstance(other, str):
            other = EdgeType.parse(other)
        w = list(self.word)
        if len(w) != other.n_edges:
            return False
        target = self._relabelled(other.word)
        return any(self._relabelled(w[k:] + w[:k]) == target for k in range(len(w)))

    def greek_edges(self) -> list[int]:
        return [i for i, l in enumerate(self.word) if base_letter(l) in GREEK]


def classify_edge_type(t: Prototile) -> EdgeType:
    """Label edges by congruence class, first occurrence from edge 0.

    The k-th class found takes the k-th letter: Greek for self-congruent
    classes, Latin (plain/barred) for reverse-congruent pairs.
    """
    n = t.n_edges
    same: dict[tuple[int, int], bool] = {}
    rev: dict[tuple[int, int], bool] = {}

    def check(c):
        if c is not None and not c.unique:
            raise AmbiguousType("edge congruence is not unique")
        return c is not None

    for i in range(n):
        for j in range(i, n):
            if j != i:
                same[i, j] = same[j, i] = check(find_congruence(t.edges[i], t.edges[j]))
            rev[i, j] = rev[j, i] = check(find_congruence(t.edges[i], reverse(t.edges[j])))
    labels: list[str | None] = [None] * n
    n_classes = 0
    for i in range(n):
        if labels[i] is not None:
            continue
        members = [j for j in range(n) if j == i or same.get((i, j)) or rev[i, j]]
        if rev[i, i]:
            letter = GREEK[n_classes]
            for j in members:
                labels[j] = letter
        else:
            letter = LATIN[n_classes]
            for j in members:
                labels[j] = letter if (j == i or same.get((i, j))) else bar(letter)
        n_classes += 1
    word = tuple(labels)  # type: ignore[arg-type]
    pairings = {base_letter(l): bar(base_letter(l)) for l in word if base_letter(l) in LATIN}
    return EdgeType(word, pairings)


def edge_symmetry_axes(t: Prototile, edge_type: EdgeType | None = None) -> dict[int, Line3]:
    """Half-turn axis of every self-congruent edge."""
    edge_type = classify_edge_type(t) if edge_type is None else edge_type
    out = {}
    for i in edge_type.greek_edges():
        ax = involution_axis(t.edges[i])
        if ax is not None:
            out[i] = ax
    return out


@dataclass(frozen=True, eq=False)
class NormalClassification:
    tag: str
    point: np.ndarray | None = None
    detail: str = ""

    def __repr__(self) -> str:
        if self.tag == "Concurrent":
            return f"Concurrent({np.array2string(self.point, precision=6)})"
        return self.tag


def tile_type(edge_type: EdgeType) -> tuple[int, int]:
    """Type number 1-4 of a 3-edge tile and the index of its corner ``A``.

    Corner ``A`` sits between the paired (Type 1) or the two equal (Type 2)
    edges; it is corner 0 for Types 3 and 4.
    """
    w = edge_type.word
    if len(w) != 3:
        raise WrongTileType(f"expected a 3-edge tile, got {len(w)} edges")
    b = [base_letter(x) for x in w]
    for k in range(3):
        prev, cur, nxt = w[k - 1], w[k], w[(k + 1) % 3]
        if b[k - 1] == b[k] and b[k] in LATIN and is_barred(prev) != is_barred(cur) and base_letter(nxt) in GREEK:
            return 1, k
    if all(x in GREEK for x in b):
        if len(set(b)) == 1:
            return 3, 0
        if len(set(b)) == 3:
            return 4, 0
        for k in range(3):
            if b[k - 1] == b[k]:
                return 2, k
    raise WrongTileType(f"edge type {' '.join(w)} is not an interior 3-edge type")


def normal_classification(t: Prototile, edge_type: EdgeType | None = None) -> NormalClassification:
    """Corner normal lines and the opposite-edge axis: parallel, concurrent or neither.

    For Types 2 and 3 the axes of the two edges at ``A`` must also be
    parallel/orthogonal to (parallel case) or pass through (concurrent case)
    the common configuration.
    """
    edge_type = classify_edge_type(t) if edge_type is None else edge_type
    kind, a = tile_type(edge_type)
    if kind == 4:
        raise WrongTileType("Type 4 (αβγ) tiles have no normal-line lemma")
    tol = config.TOL
    eps_pos, eps_ang = tol.eps_pos(t.diameter), tol.eps_ang
    lines = corner_normal_lines(t)
    opposite = (a + 1) % 3
    ax_opp = involution_axis(t.edges[opposite])
    if ax_opp is None:
        return NormalClassification("Inconsistent", detail="opposite edge has no half-turn")
    core = [lines[a], lines[(a + 1) % 3], lines[(a + 2) % 3], ax_opp]
    tag, point = lines_classification(core, eps_pos, eps_ang)
    if tag == "Inconsistent" or kind == 1:
        return NormalClassification(tag, point)
    extra = [involution_axis(t.edges[(a - 1) % 3]), involution_axis(t.edges[a])]
    if any(x is None for x in extra):
        return NormalClassification("Inconsistent", detail="α edge has no half-turn")
    d = core[0].direction
    if tag == "AllParallel":
        par = [np.linalg.norm(np.cross(d, x.direction)) < eps_ang for x in extra]
        orth = [abs(np.dot(d, x.direction)) < eps_ang for x in extra]
        ok = all(par) or (kind == 2 and all(orth))
        return NormalClassification(tag if ok else "Inconsistent", None,
                                    "" if ok else "α axes neither parallel nor orthogonal")
    if all(x.distance_to(point) < eps_pos for x in extra):
        return NormalClassification(tag, point)
    return NormalClassification("Inconsistent", detail="α axes miss the common point")
