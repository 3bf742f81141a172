"""Growing tilings from a prototile by composing edge-matching motions.

A placed tile is the prototile moved by a rigid motion.  Neighbouring copies
share one edge with opposite orientation, so the motion placing a neighbour
across edge ``i`` is ``M_X ∘ A`` where ``A`` takes edge ``j`` of the
prototile onto ``reverse(edge i)``.

Around a vertex the walk is: at corner ``k`` of a tile, cross edge ``k``;
if that lands on edge ``j`` of the neighbour, the vertex is the neighbour's
corner ``j + 1``.
"""

from __future__ import annotations

import copy
import itertools
import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import config
from .edges import find_congruence, reverse
from .errors import (AmbiguousPlacement, CapExceeded, NotClosed, OverlapDetected,
                     SeamFailure)
from .geom3 import RigidMotion, compose, compose_all, invert, motion_distance
from .mesh import MergedMesh, merge
from .overlap import PatchProxy, proxies_overlap
from .prototile import Prototile, corner_angles

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Adjacency:
    """Placing a copy by ``motion`` lays its edge ``other`` on ``edge`` reversed."""

    edge: int
    other: int
    motion: RigidMotion
    rms: float
    unique: bool


@dataclass
class PlacedTile:
    id: int
    motion: RigidMotion
    neighbors: list[tuple[int, int, int]] = field(default_factory=list)
    depth: int = 0

    def neighbor_on(self, edge: int) -> tuple[int, int] | None:
        for e, nid, ne in self.neighbors:
            if e == edge:
                return nid, ne
        return None


@dataclass
class TilingState:
    prototile: Prototile
    tiles: list[PlacedTile]
    frontier: list[tuple[int, int]] = field(default_factory=list)
    status: str = "Open"
    reason: str = ""
    log: list[dict] = field(default_factory=list)

    @property
    def m(self) -> int:
        return len(self.tiles)

    def motions(self) -> list[RigidMotion]:
        return [t.motion for t in self.tiles]

    def is_closed(self) -> bool:
        return self.status == "Closed" and not self.frontier

    def snapshot(self) -> "TilingState":
        return copy.deepcopy(self)

    def links(self) -> list[tuple[int, int, int, int]]:
        """Each shared edge once, as (tile, edge, tile, edge) with the first id smaller."""
        out = []
        for t in self.tiles:
            for e, nid, ne in t.neighbors:
                if (t.id, e) < (nid, ne):
                    out.append((t.id, e, nid, ne))
        return out

    def refresh_frontier(self) -> None:
        n = self.prototile.n_edges
        self.frontier = [(t.id, e) for t in self.tiles for e in range(n) if t.neighbor_on(e) is None]


@dataclass
class TileGroup:
    elements: list[RigidMotion]
    generators: list[RigidMotion]
    closed: bool

    def __len__(self) -> int:
        return len(self.elements)


class PointIndex:
    """Grid hash of points with cell size ``cell``; lookups probe the 27 nearby cells."""

    def __init__(self, cell: float):
        self.cell = cell
        self._cells: dict[tuple[int, int, int], list[tuple[int, object]]] = {}

    def _key(self, p: np.ndarray) -> tuple[int, int, int]:
        return tuple(np.floor(np.asarray(p) / self.cell).astype(np.int64).tolist())

    def add(self, key: int, point: np.ndarray, payload=None) -> None:
        self._cells.setdefault(self._key(point), []).append((key, payload))

    def candidates(self, point: np.ndarray):
        base = self._key(point)
        for d in itertools.product((-1, 0, 1), repeat=3):
            yield from self._cells.get((base[0] + d[0], base[1] + d[1], base[2] + d[2]), ())


class MotionIndex:
    """Motions hashed by translation, confirmed by ``motion_distance``."""

    def __init__(self, diameter: float, eps: float | None = None):
        self.diameter = diameter
        self.eps = config.TOL.eps_motion if eps is None else eps
        self._points = PointIndex(self.eps * diameter)

    def add(self, key: int, m: RigidMotion) -> None:
        self._points.add(key, m.translation, m)

    def find_all(self, m: RigidMotion) -> list[int]:
        return sorted(k for k, other in self._points.candidates(m.translation)
                      if motion_distance(m, other, self.diameter) < self.eps)

    def find(self, m: RigidMotion) -> int | None:
        hits = self.find_all(m)
        return hits[0] if hits else None


def adjacent_motions(t: Prototile) -> list[Adjacency]:
    """Every (edge i, edge j) pairing with ``edge j ≅ reverse(edge i)``."""
    out = []
    for i, ei in enumerate(t.edges):
        target = reverse(ei)
        for j, ej in enumerate(t.edges):
            c = find_congruence(ej, target)
            if c is not None:
                out.append(Adjacency(i, j, c.motion, c.rms_residual, c.unique))
    return out


def _by_edge(adj: Sequence[Adjacency], n: int) -> dict[int, list[Adjacency]]:
    return {i: [a for a in adj if a.edge == i] for i in range(n)}


def _choose(cands: list[Adjacency], policy, edge: int) -> Adjacency:
    if len(cands) == 1 and cands[0].unique:
        return cands[0]
    if policy is None:
        why = "several partner edges" if len(cands) > 1 else "a non-unique edge congruence"
        raise AmbiguousPlacement(
            f"edge {edge} has {why} ({[a.other for a in cands]}); pass a policy"
        )
    if policy == "first":
        return cands[0]
    if callable(policy):
        return policy(edge, cands)
    return cands[int(policy[edge]) % len(cands)]


def seam_deviation(t: Prototile, mx: RigidMotion, i: int, my: RigidMotion, j: int) -> float:
    """Largest angle between normals of tile X edge ``i`` and tile Y edge ``j`` reversed."""
    nx = mx.apply_vectors(t.edges[i].normals)
    ny = my.apply_vectors(t.edges[j].normals)[::-1]
    ang = np.arctan2(np.linalg.norm(np.cross(nx, ny), axis=1), np.einsum("ij,ij->i", nx, ny))
    return float(ang.max())


class _Proxies:
    def __init__(self, t: Prototile):
        self.t = t
        self.items: list[PatchProxy] = []
        self.tol = 1e-12 * max(t.diameter, 1.0)

    def make(self, m: RigidMotion) -> PatchProxy:
        return PatchProxy.build(m.apply(self.t.vertices), self.t.faces, config.TOL.overlap_shrink)

    def hits(self, p: PatchProxy) -> list[int]:
        return [k for k, q in enumerate(self.items) if proxies_overlap(p, q, self.tol)]


def propagate(t: Prototile, max_tiles: int = 1000, policy=None, max_depth: int | None = None,
              check_overlap: bool = True, adjacency: Sequence[Adjacency] | None = None,
              on_record: Callable[[dict], None] | None = None) -> TilingState:
    """Breadth-first growth from a seed copy at the identity.

    ``policy`` resolves edges with several admissible neighbours: ``"first"``,
    a per-edge list of candidate indices, or ``f(edge, candidates)``.
    Raises ``OverlapDetected`` or ``SeamFailure`` (with ``.state`` set to the
    aborted state), or ``AmbiguousPlacement`` when no policy is given.
    """
    n = t.n_edges
    adj = adjacent_motions(t) if adjacency is None else list(adjacency)
    by_edge = _by_edge(adj, n)
    diam = t.diameter
    tol = config.TOL
    proxies = _Proxies(t)
    state = TilingState(t, [PlacedTile(0, RigidMotion.identity())])
    if check_overlap:
        proxies.items.append(proxies.make(state.tiles[0].motion))

    def record(**kw):
        state.log.append(kw)
        if on_record is not None:
            on_record(kw)

    def abort(exc_type, reason):
        state.status, state.reason = "Aborted", reason
        state.refresh_frontier()
        record(event="aborted", reason=reason)
        exc = exc_type(reason)
        exc.state = state
        raise exc

    centroid = t.vertices.mean(axis=0)
    eps_pos = tol.eps_pos(diam) * 10
    regions = PointIndex(max(eps_pos, 1e-300))
    regions.add(0, centroid)

    def region_of(m: RigidMotion) -> int | None:
        c = m.apply(centroid)
        for k, _ in regions.candidates(c):
            if np.linalg.norm(state.tiles[k].motion.apply(centroid) - c) < eps_pos:
                return k
        return None

    def matching_edge(my: RigidMotion, target: np.ndarray) -> int | None:
        for j, e in enumerate(t.edges):
            if np.abs(my.apply(e.points) - target).max() < eps_pos:
                return j
        return None

    queue = deque((0, i) for i in range(n))
    while queue:
        x, i = queue.popleft()
        tx = state.tiles[x]
        if tx.neighbor_on(i) is not None:
            continue
        cands = by_edge[i]
        if not cands:
            state.status, state.reason = "Aborted", f"edge {i} matches no edge"
            break
        a = _choose(cands, policy, i)
        m = compose(tx.motion, a.motion)
        y = region_of(m)
        if y is not None:
            # same region reached again, possibly through a symmetry of the tile
            ty = state.tiles[y]
            if motion_distance(m, ty.motion, diam) < tol.eps_motion:
                j = a.other
            else:
                j = matching_edge(ty.motion, tx.motion.apply(t.edges[i].points)[::-1])
            if j is None:
                abort(OverlapDetected, f"tile across tile {x} edge {i} coincides with tile {y} "
                                       "but shares no edge with it")
            dev = seam_deviation(t, tx.motion, i, ty.motion, j)
            if dev > tol.eps_ang:
                abort(SeamFailure, f"normals differ by {dev:.3g} rad across tile {x} edge {i}")
            held = ty.neighbor_on(j)
            if held is not None and held != (x, i):
                abort(OverlapDetected, f"tile {y} edge {j} already joined to tile {held[0]}")
            if held is None:
                tx.neighbors.append((i, y, j))
                ty.neighbors.append((j, x, i))
            continue
        if len(state.tiles) >= max_tiles or (max_depth is not None and tx.depth >= max_depth):
            continue
        dev = seam_deviation(t, tx.motion, i, m, a.other)
        if dev > tol.eps_ang:
            abort(SeamFailure, f"normals differ by {dev:.3g} rad across tile {x} edge {i}")
        if check_overlap:
            p = proxies.make(m)
            hits = proxies.hits(p)
            if hits:
                abort(OverlapDetected, f"new tile across tile {x} edge {i} overlaps tile {hits[0]}")
            proxies.items.append(p)
        y = len(state.tiles)
        ty = PlacedTile(y, m, [(a.other, x, i)], tx.depth + 1)
        tx.neighbors.append((i, y, a.other))
        state.tiles.append(ty)
        regions.add(y, m.apply(centroid))
        record(event="place", tile=y, parent=x, edge=i, other=a.other)
        for k in range(n):
            if k != a.other:
                queue.append((y, k))
    state.refresh_frontier()
    if state.status != "Aborted":
        state.status = "Closed" if not state.frontier else "Open"
    record(event="done", status=state.status, tiles=state.m)
    return state


def vertex_closure_check(motions: Sequence[RigidMotion], diameter: float = 1.0) -> float:
    """Distance from identity of the composed tile-to-tile maps around a vertex."""
    return motion_distance(compose_all(motions), RigidMotion.identity(), diameter)


def _fans(t: Prototile, by_edge, corner: int, max_fan: int, diam: float):
    """Closed walks of copies around ``corner`` of the seed tile.

    Yields (steps, motions) with ``motions[k]`` the placement of the k-th
    copy; the last step returns to the seed.
    """
    ident = RigidMotion.identity()
    eps = config.TOL.eps_motion

    def walk(k: int, w: RigidMotion, steps: list, placed: list):
        for a in by_edge[k]:
            w2 = compose(w, a.motion)
            nxt = (a.other + 1) % t.n_edges
            if motion_distance(w2, ident, diam) < eps:
                if nxt == corner and placed:
                    yield steps + [a], placed
                continue
            if len(placed) + 1 >= max_fan:
                continue
            if any(motion_distance(w2, p, diam) < eps for p in placed):
                continue
            yield from walk(nxt, w2, steps + [a], placed + [w2])

    yield from walk(corner, ident, [], [])


def corner_fans(t: Prototile, max_fan: int = 24, adjacency=None) -> dict[int, list[dict]]:
    """All closed fans at each corner, with their closure and angle-sum residuals."""
    adj = adjacent_motions(t) if adjacency is None else adjacency
    by_edge = _by_edge(adj, t.n_edges)
    angles = corner_angles(t)
    out = {}
    for c in range(len(t.corners)):
        fans = []
        for steps, placed in _fans(t, by_edge, c, max_fan, t.diameter):
            corners = [c] + [(a.other + 1) % t.n_edges for a in steps[:-1]]
            fans.append({
                "steps": [(a.edge, a.other) for a in steps],
                "motions": placed,
                "closure": vertex_closure_check([a.motion for a in steps], t.diameter),
                "angle_sum": float(sum(angles[k] for k in corners)),
            })
        out[c] = fans
    return out


def build_coronas(t: Prototile, cap: int = 64, max_fan: int = 24,
                  check_overlap: bool = True) -> list[TilingState]:
    """Every way to surround the seed with copies, up to ``cap``.

    A corona picks one closed fan at every corner; fans at the two ends of an
    edge must agree on the neighbour across it.  Raises ``CapExceeded`` when
    more than ``cap`` coronas exist or an edge congruence is not unique.
    """
    adj = adjacent_motions(t)
    bad = [a for a in adj if not a.unique]
    if bad:
        raise CapExceeded(
            f"edge {bad[0].edge} meets edge {bad[0].other} in a continuum of placements"
        )
    diam = t.diameter
    eps = config.TOL.eps_motion
    n = t.n_edges
    if len(t.corners) == 0:
        tilesets = [[a.motion] for a in _by_edge(adj, n)[0]]
    else:
        fans = corner_fans(t, max_fan, adj)
        tilesets = []
        for combo in itertools.product(*(fans[c] for c in range(n))):
            ok = True
            for c in range(n):
                nxt = combo[(c + 1) % n]
                # corner c fan's first copy and corner c+1 fan's last copy share edge c
                if motion_distance(combo[c]["motions"][0], nxt["motions"][-1], diam) >= eps:
                    ok = False
                    break
            if ok:
                motions: list[RigidMotion] = []
                for f in combo:
                    for m in f["motions"]:
                        if not any(motion_distance(m, q, diam) < eps for q in motions):
                            motions.append(m)
                tilesets.append(motions)
    coronas: list[TilingState] = []
    seen: list[list[RigidMotion]] = []
    for motions in tilesets:
        if any(len(s) == len(motions) and all(any(motion_distance(m, q, diam) < eps for q in s)
                                                for m in motions) for s in seen):
            continue
        state = assemble_state(t, [RigidMotion.identity()] + motions)
        if check_overlap and _state_overlaps(state):
            continue
        seen.append(motions)
        coronas.append(state)
        if len(coronas) > cap:
            raise CapExceeded(f"more than {cap} coronas")
    return coronas


def _state_overlaps(state: TilingState) -> bool:
    p = _Proxies(state.prototile)
    for m in state.motions():
        q = p.make(m)
        if p.hits(q):
            return True
        p.items.append(q)
    return False


def assemble_state(t: Prototile, motions: Sequence[RigidMotion]) -> TilingState:
    """State from explicit placements, linking edges that coincide reversed."""
    tiles = [PlacedTile(k, m) for k, m in enumerate(motions)]
    n = t.n_edges
    eps = config.TOL.eps_pos(t.diameter) * 10
    world = {(k, e): m.apply(t.edges[e].points) for k, m in enumerate(motions) for e in range(n)}
    keys = list(world)
    if keys:
        from scipy.spatial import cKDTree

        mids = np.array([world[k][len(world[k]) // 2] for k in keys])
        tree = cKDTree(mids)
        for a, b in tree.query_pairs(eps):
            (x, i), (y, j) = keys[a], keys[b]
            if x == y:
                continue
            if np.abs(world[(x, i)] - world[(y, j)][::-1]).max() < eps:
                if tiles[x].neighbor_on(i) is None and tiles[y].neighbor_on(j) is None:
                    tiles[x].neighbors.append((i, y, j))
                    tiles[y].neighbors.append((j, x, i))
    for tl in tiles:
        tl.neighbors.sort()
    state = TilingState(t, tiles)
    state.refresh_frontier()
    state.status = "Closed" if not state.frontier else "Open"
    return state


def vertex_fans(state: TilingState, max_steps: int = 64) -> list[list[tuple[int, int, int, int]]]:
    """Closed vertex cycles in a state as lists of (tile, corner, edge crossed, landing edge)."""
    n = state.prototile.n_edges
    if len(state.prototile.corners) == 0:
        return []
    seen = set()
    out = []
    for tl in state.tiles:
        for c in range(n):
            if (tl.id, c) in seen:
                continue
            cycle = []
            x, k = tl.id, c
            closed = False
            for _ in range(max_steps):
                hop = state.tiles[x].neighbor_on(k)
                if hop is None:
                    break
                y, j = hop
                cycle.append((x, k, k, j))
                x, k = y, (j + 1) % n
                if (x, k) == (tl.id, c):
                    closed = True
                    break
            if closed:
                seen.update((a, b) for a, b, _, _ in cycle)
                out.append(cycle)
    return out


def interior_vertex_residuals(state: TilingState, adjacency=None) -> list[dict]:
    """Closure and angle-sum residual at every vertex with a closed cycle of tiles."""
    t = state.prototile
    adj = adjacent_motions(t) if adjacency is None else adjacency
    table = {(a.edge, a.other): a.motion for a in adj}
    angles = corner_angles(t)
    out = []
    for cycle in vertex_fans(state):
        try:
            ms = [table[(i, j)] for _, _, i, j in cycle]
            closure = vertex_closure_check(ms, t.diameter)
        except KeyError:
            closure = math.inf
        total = sum(angles[c] for _, c, _, _ in cycle)
        out.append({
            "tiles": [x for x, _, _, _ in cycle],
            "degree": len(cycle),
            "closure": closure,
            "angle_sum_error": abs(total - 2 * math.pi),
            "residual": max(closure, abs(total - 2 * math.pi)),
        })
    return out


def generate_group(generators: Sequence[RigidMotion], cap: int = 1000,
                   diameter: float = 1.0) -> TileGroup:
    """Closure of ``generators`` under composition, up to ``cap`` elements."""
    every = config.TOL.reorthonormalize_every
    gens = list(generators)
    elements = [RigidMotion.identity()]
    depth = [0]
    index = MotionIndex(diameter, config.TOL.eps_motion)
    index.add(0, elements[0])
    queue = deque([0])
    while queue:
        k = queue.popleft()
        for s in gens:
            h = compose(elements[k], s)
            d = depth[k] + 1
            if d % every == 0:
                h = h.orthonormalized()
            if index.find(h) is not None:
                continue
            if len(elements) >= cap:
                return TileGroup(elements, gens, False)
            index.add(len(elements), h)
            elements.append(h)
            depth.append(d)
            queue.append(len(elements) - 1)
    return TileGroup(elements, gens, True)


def state_generators(state: TilingState) -> list[RigidMotion]:
    """Motions taking the seed to each of its neighbours."""
    m0 = invert(state.tiles[0].motion)
    return [compose(m0, state.tiles[nid].motion) for _, nid, _ in state.tiles[0].neighbors]


def _group_index(group: TileGroup, diameter: float) -> MotionIndex:
    idx = MotionIndex(diameter)
    for k, g in enumerate(group.elements):
        idx.add(k, g)
    return idx


def transitivity_check(state: TilingState, group: TileGroup) -> bool:
    """Every tile is the image of the seed under some group element."""
    diam = state.prototile.diameter
    idx = _group_index(group, diam)
    m0 = invert(state.tiles[0].motion)
    return all(idx.find(compose(t.motion, m0)) is not None for t in state.tiles)


def placement_multiplicity(state: TilingState, group: TileGroup) -> tuple[int, int]:
    """Min and max, over ordered tile pairs, of group elements taking one to the other."""
    diam = state.prototile.diameter
    idx = _group_index(group, diam)
    counts = []
    for a in state.tiles:
        inv = invert(a.motion)
        for b in state.tiles:
            counts.append(len(idx.find_all(compose(b.motion, inv))))
    return min(counts), max(counts)


def merged_mesh(state: TilingState) -> MergedMesh:
    t = state.prototile
    parts = [(pt.motion.apply(t.vertices), t.faces) for pt in state.tiles]
    return merge(parts, config.TOL.eps_pos(t.diameter) * 10)


def gauss_bonnet_residual(state: TilingState) -> dict:
    """Per-tile curvature integral against ``2πχ/m``.

    The per-tile value is the angle defect of the welded mesh shared out by
    each tile's fraction of the corner angles at every vertex.
    """
    if state.frontier or state.status != "Closed":
        raise NotClosed(f"{len(state.frontier)} open edges")
    mesh = merged_mesh(state)
    chi = mesh.euler_characteristic()
    defects = mesh.angle_defects()
    v, f = mesh.vertices, mesh.faces
    share = np.zeros(len(v))
    total_angle = np.zeros(len(v))
    for k in range(3):
        p = v[f[:, k]]
        a = v[f[:, (k + 1) % 3]] - p
        b = v[f[:, (k + 2) % 3]] - p
        ang = np.arctan2(np.linalg.norm(np.cross(a, b), axis=1), np.einsum("ij,ij->i", a, b))
        np.add.at(total_angle, f[:, k], ang)
        np.add.at(share, f[:, k], np.where(mesh.face_tile == 0, ang, 0.0))
    frac = np.divide(share, total_angle, out=np.zeros_like(share), where=total_angle > 0)
    per_tile = float((defects * frac).sum())
    m = state.m
    expected = 2 * math.pi * chi / m
    return {
        "per_tile_integral": per_tile,
        "expected": expected,
        "residual": abs(per_tile - expected),
        "total_curvature": float(defects.sum()),
        "chi": chi,
        "m": m,
        "closed_manifold": mesh.is_closed_manifold(),
    }


def c1_seam_check(state: TilingState) -> float:
    """Largest normal mismatch (radians) over all shared edges."""
    t = state.prototile
    worst = 0.0
    for x, i, y, j in state.links():
        worst = max(worst, seam_deviation(t, state.tiles[x].motion, i, state.tiles[y].motion, j))
    return worst


def motion_power_order(r: RigidMotion, cap: int = 1000, diameter: float = 1.0) -> int | None:
    """Smallest ``k ≤ cap`` with ``r^k`` the identity, or ``None``."""
    ident = RigidMotion.identity()
    p = r
    for k in range(1, cap + 1):
        if motion_distance(p, ident, diameter) < config.TOL.eps_motion:
            return k
        p = compose(p, r)
        if k % config.TOL.reorthonormalize_every == 0:
            p = p.orthonormalized()
    return None


def edge_rotation_product(t: Prototile) -> RigidMotion:
    """``R_β ∘ R_γ ∘ R_α`` for an αβγ tile: its three edge half-turns."""
    adj = {(a.edge, a.other): a.motion for a in adjacent_motions(t)}
    ra, rb, rc = adj[(0, 0)], adj[(1, 1)], adj[(2, 2)]
    return compose(rb, compose(rc, ra))
