"""Constructors for example tiles and their reference tilings.

Lifted tilings are built on a smooth surface invariant under the symmetry
group of a base tiling: a radial graph ``r = 1 + h·g(u)`` over the unit
sphere, or a height graph ``z = h·g(x, y)`` over the plane.  ``g`` is a sum of
bumps ``P(s)`` centred on the face centres, ``s`` falling to zero on each
face's circumcircle with ``P(0) = P'(0) = 0``, so ``g`` is C¹.  The tile is the
lift of one face-centre/edge triangle; tile edges are lifted geodesics of the
base, sampled at uniform arc length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.spatial import ConvexHull

from . import config
from .edges import SampledEdge, reverse
from .errors import FoldOver, InvalidProfile, ValidationError
from .geom3 import RigidMotion, rotation_matrix
from .prototile import Prototile, classify_edge_type, tile_type

PHI = (1 + math.sqrt(5)) / 2
DENSE = 4097

SPHERE_BASES = ("Tetrahedron", "Cube", "Octahedron", "Dodecahedron", "Icosahedron", "Bipyramid")
PLANE_BASES = ("TriangleGrid", "SquareGrid", "HexGrid")


def _cubic(s):
    return 3 * s ** 2 - 2 * s ** 3, 6 * s - 6 * s ** 2


def _quintic(s):
    return 10 * s ** 3 - 15 * s ** 4 + 6 * s ** 5, 30 * s ** 2 - 60 * s ** 3 + 30 * s ** 4


PROFILES: dict[str, Callable] = {"cubic": _cubic, "quintic": _quintic}


def _unit_rows(a: np.ndarray) -> np.ndarray:
    return a / np.linalg.norm(a, axis=-1, keepdims=True)


def _up(xy: np.ndarray) -> np.ndarray:
    out = np.zeros(np.shape(xy)[:-1] + (3,))
    out[..., 2] = 1.0
    return out


# --- surfaces ---------------------------------------------------------------

@dataclass
class SphereBumps:
    """``r(u) = 1 + h·Σ P(s_c(u))`` with ``s_c = (u·c - τ_c) / (1 - τ_c)`` clipped at 0."""

    centers: np.ndarray
    taus: np.ndarray
    height: float
    profile: str = "cubic"
    weights: np.ndarray | None = None

    def _terms(self, u):
        s = (u @ self.centers.T - self.taus) / (1 - self.taus)
        active = s > 0
        s = np.where(active, s, 0.0)
        p, dp = PROFILES[self.profile](s)
        w = 1.0 if self.weights is None else self.weights
        return np.where(active, p, 0.0) * w, np.where(active, dp, 0.0) * w

    def radius(self, u: np.ndarray) -> np.ndarray:
        p, _ = self._terms(u)
        return 1.0 + self.height * p.sum(axis=-1)

    def point(self, u: np.ndarray) -> np.ndarray:
        u = _unit_rows(u)
        return self.radius(u)[..., None] * u

    def normal(self, u: np.ndarray) -> np.ndarray:
        u = _unit_rows(u)
        p, dp = self._terms(u)
        r = 1.0 + self.height * p.sum(axis=-1)
        grad = self.height * (dp / (1 - self.taus)) @ self.centers
        grad -= np.einsum("...i,...i->...", grad, u)[..., None] * u
        # r = 0 only on folded surfaces, which the fold check rejects
        with np.errstate(divide="ignore", invalid="ignore"):
            return _unit_rows(u - grad / r[..., None])

    def base_normal(self, u: np.ndarray) -> np.ndarray:
        return _unit_rows(u)

    @staticmethod
    def geodesic(p: np.ndarray, q: np.ndarray, t: np.ndarray) -> np.ndarray:
        omega = math.acos(np.clip(np.dot(p, q), -1.0, 1.0))
        t = np.asarray(t)[:, None]
        if omega < 1e-12:
            return np.repeat(p[None], len(t), axis=0)
        return (np.sin((1 - t) * omega) * p + np.sin(t * omega) * q) / math.sin(omega)

    @staticmethod
    def blend(weights: np.ndarray, corners: np.ndarray) -> np.ndarray:
        return _unit_rows(weights @ corners)


@dataclass
class PlaneBumps:
    """``z = h·Σ P(1 - |p - c|² / ρ²)`` over face centres ``c``."""

    centers: np.ndarray
    rho: float
    height: float
    profile: str = "cubic"

    def _terms(self, xy):
        d = xy[..., None, :] - self.centers
        s = 1.0 - (d ** 2).sum(axis=-1) / self.rho ** 2
        active = s > 0
        s = np.where(active, s, 0.0)
        p, dp = PROFILES[self.profile](s)
        return np.where(active, p, 0.0), np.where(active, dp, 0.0), d

    def point(self, xy: np.ndarray) -> np.ndarray:
        p, _, _ = self._terms(xy[..., :2])
        return np.concatenate([xy[..., :2], (self.height * p.sum(axis=-1))[..., None]], axis=-1)

    def normal(self, xy: np.ndarray) -> np.ndarray:
        _, dp, d = self._terms(xy[..., :2])
        grad = self.height * np.einsum("...k,...kj->...j", dp, -2.0 * d / self.rho ** 2)
        return _unit_rows(np.concatenate([-grad, np.ones(grad.shape[:-1] + (1,))], axis=-1))

    def base_normal(self, xy: np.ndarray) -> np.ndarray:
        return _up(xy)

    @staticmethod
    def geodesic(p: np.ndarray, q: np.ndarray, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t)[:, None]
        return (1 - t) * p + t * q

    @staticmethod
    def blend(weights: np.ndarray, corners: np.ndarray) -> np.ndarray:
        return weights @ corners


@dataclass
class HeightField:
    """``z = f(x, y)`` with analytic gradient, for tiles over a plane lattice."""

    f: Callable[[np.ndarray, np.ndarray], np.ndarray]
    grad: Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]

    def point(self, xy):
        return np.concatenate([xy[..., :2], self.f(xy[..., 0], xy[..., 1])[..., None]], axis=-1)

    def normal(self, xy):
        gx, gy = self.grad(xy[..., 0], xy[..., 1])
        return _unit_rows(np.stack([-gx, -gy, np.ones_like(gx)], axis=-1))

    def base_normal(self, xy):
        return _up(xy)

    geodesic = staticmethod(PlaneBumps.geodesic)
    blend = staticmethod(PlaneBumps.blend)


# --- sampling ---------------------------------------------------------------

def arc_length_params(curve: Callable[[np.ndarray], np.ndarray], n: int,
                      symmetric: bool = False) -> np.ndarray:
    """Parameters in [0, 1] placing ``n`` samples at uniform arc length along ``curve``.

    With ``symmetric`` the parameters satisfy ``t[k] = 1 - t[n-1-k]`` exactly.
    """
    t = np.linspace(0.0, 1.0, DENSE)
    p = curve(t)
    s = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(p, axis=0), axis=1))])
    tt = np.interp(np.linspace(0.0, s[-1], n), s, t)
    if symmetric:
        tt = 0.5 * (tt + 1.0 - tt[::-1])
    tt[0], tt[-1] = 0.0, 1.0
    return tt


def lifted_edge(surface, p: np.ndarray, q: np.ndarray, symmetric: bool = False,
                n: int | None = None) -> tuple[SampledEdge, np.ndarray]:
    """Lift of the base geodesic ``p -> q``; returns the edge and its base parameters."""
    n = config.TOL.samples if n is None else n
    base = lambda t: surface.geodesic(p, q, t)
    tt = arc_length_params(lambda t: surface.point(base(t)), n, symmetric)
    u = base(tt)
    return SampledEdge(surface.point(u), surface.normal(u)), u


def triangle_patch(surface, corners: np.ndarray, edges: Sequence[SampledEdge],
                   resolution: int) -> tuple[np.ndarray, np.ndarray]:
    """Barycentric grid over the base triangle whose boundary nodes are edge samples.

    ``corners[k]`` is the base point where edge ``k`` starts.
    """
    n_int = len(edges[0]) - 1
    if resolution < 1 or n_int % resolution:
        raise ValidationError(f"patch resolution {resolution} must divide {n_int}")
    step = n_int // resolution
    n = resolution
    index = {}
    verts = []
    for i in range(n + 1):
        for j in range(n + 1 - i):
            if j == 0:
                v = edges[0].points[i * step]
            elif i + j == n:
                v = edges[1].points[j * step]
            elif i == 0:
                v = edges[2].points[(n - j) * step]
            else:
                w = np.array([[n - i - j, i, j]], dtype=float) / n
                v = surface.point(surface.blend(w, corners))[0]
            index[i, j] = len(verts)
            verts.append(v)
    faces = []
    for i in range(n):
        for j in range(n - i):
            faces.append((index[i, j], index[i + 1, j], index[i, j + 1]))
            if i + j < n - 1:
                faces.append((index[i + 1, j], index[i + 1, j + 1], index[i, j + 1]))
    return np.array(verts), np.array(faces, dtype=np.int64)


def _check_fold(surface, params: np.ndarray, what: str) -> None:
    nrm = surface.normal(params)
    base = surface.base_normal(params)
    cosang = np.einsum("ij,ij->i", nrm, base)
    if np.any(cosang <= 0):
        raise FoldOver(f"{what}: surface normal turns {math.degrees(math.acos(cosang.min())):.1f}° from the base")
    if isinstance(surface, SphereBumps) and np.any(surface.radius(_unit_rows(params)) <= 0):
        raise FoldOver(f"{what}: radius reaches zero")


# --- base tilings -----------------------------------------------------------

def _solid_vertices(name: str) -> np.ndarray:
    if name == "Tetrahedron":
        v = [(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)]
    elif name == "Cube":
        v = [(x, y, z) for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)]
    elif name == "Octahedron":
        v = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]
    elif name == "Icosahedron":
        v = []
        for a in (-1, 1):
            for b in (-PHI, PHI):
                v += [(0, a, b), (a, b, 0), (b, 0, a)]
    elif name == "Dodecahedron":
        v = [(x, y, z) for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)]
        for a in (-1 / PHI, 1 / PHI):
            for b in (-PHI, PHI):
                v += [(0, a, b), (a, b, 0), (b, 0, a)]
    else:
        raise ValidationError(f"unknown solid {name!r}")
    return _unit_rows(np.array(v, dtype=float))


def polyhedron_faces(vertices: np.ndarray) -> list[list[int]]:
    """Faces of the convex hull, each listed anticlockwise seen from outside."""
    hull = ConvexHull(vertices)
    groups: dict[tuple, set] = {}
    for simplex, eq in zip(hull.simplices, hull.equations):
        key = tuple(np.round(eq, 6))
        groups.setdefault(key, set()).update(simplex.tolist())
    faces = []
    for key, idx in groups.items():
        nrm = np.array(key[:3])
        idx = list(idx)
        c = vertices[idx].mean(axis=0)
        ref = vertices[idx[0]] - c
        ref2 = np.cross(nrm, ref)
        ang = [math.atan2(np.dot(vertices[k] - c, ref2), np.dot(vertices[k] - c, ref)) for k in idx]
        faces.append([idx[k] for k in np.argsort(ang)])
    faces.sort(key=lambda f: tuple(-vertices[f].mean(axis=0)))
    return faces


@dataclass
class SphereBase:
    """Vertices on the unit sphere and faces (anticlockwise) with centre directions."""

    vertices: np.ndarray
    faces: list[list[int]]
    centers: np.ndarray
    taus: np.ndarray
    weights: np.ndarray | None = None


def sphere_base(name: str, n: int | None = None) -> SphereBase:
    if name == "Bipyramid":
        if n is None or n < 3:
            raise ValidationError("Bipyramid needs n >= 3")
        ang = 2 * math.pi * np.arange(n) / n
        v = np.column_stack([np.cos(ang), np.sin(ang), np.zeros(n)])
        faces = [list(range(n)), list(range(n - 1, -1, -1))]
        # polar caps plus small bulges on the equator edges, which would
        # otherwise be circle arcs that slide along themselves
        mid = ang + math.pi / n
        w = np.column_stack([np.cos(mid), np.sin(mid), np.zeros(n)])
        centers = np.vstack([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0], w])
        taus = np.concatenate([np.zeros(2), np.full(n, math.cos(math.pi / n))])
        weights = np.concatenate([np.ones(2), np.full(n, 0.5)])
        return SphereBase(v, faces, centers, taus, weights)
    v = _solid_vertices(name) if name != "Disphenoid" else disphenoid_vertices()
    faces = polyhedron_faces(v)
    centers = _unit_rows(np.array([np.cross(v[f[1]] - v[f[0]], v[f[2]] - v[f[0]]) for f in faces]))
    taus = np.array([np.dot(c, v[f[0]]) for c, f in zip(centers, faces)])
    return SphereBase(v, faces, centers, taus)


def disphenoid_vertices(a: float = 1.0, b: float = 0.8, c: float = 0.6) -> np.ndarray:
    v = np.array([(a, b, c), (a, -b, -c), (-a, b, -c), (-a, -b, c)], dtype=float)
    return _unit_rows(v)


@dataclass
class PlaneBase:
    face: np.ndarray        # seed face vertices (anticlockwise), shape (p, 2)
    center: np.ndarray
    centers: np.ndarray     # all face centres in a window around the seed
    rho: float


def plane_base(name: str, window: float = 4.0) -> PlaneBase:
    s3 = math.sqrt(3.0)
    if name == "SquareGrid":
        face = np.array([(0, 0), (1, 0), (1, 1), (0, 1)], dtype=float)
        lat, offsets, rho = np.array([(1, 0), (0, 1)], float), [(0.5, 0.5)], 1 / math.sqrt(2)
    elif name == "TriangleGrid":
        face = np.array([(0, 0), (1, 0), (0.5, s3 / 2)])
        lat = np.array([(1, 0), (0.5, s3 / 2)])
        offsets, rho = [(0.5, s3 / 6), (1.0, s3 / 3)], 1 / s3
    elif name == "HexGrid":
        ang = math.pi / 6 + np.arange(6) * math.pi / 3
        face = np.column_stack([np.cos(ang), np.sin(ang)])
        lat, offsets, rho = np.array([(s3, 0), (s3 / 2, 1.5)]), [(0.0, 0.0)], 1.0
    else:
        raise ValidationError(f"unknown plane base {name!r}")
    center = face.mean(axis=0)
    k = int(math.ceil(window / min(np.linalg.norm(lat, axis=1)))) + 2
    pts = [np.array(o) + a * lat[0] + b * lat[1]
           for a in range(-k, k + 1) for b in range(-k, k + 1) for o in offsets]
    pts = np.array([p for p in pts if np.linalg.norm(p - center) <= window])
    return PlaneBase(face, center, pts, rho)


# --- lifted tilings ---------------------------------------------------------

@dataclass(frozen=True)
class LiftSpec:
    base: str
    apex_height: float = 0.15
    patch_resolution: int = 32
    bump_profile: str = "cubic"
    n: int | None = None        # order of a Bipyramid base
    k_ring: int = 3             # BFS depth of plane references
    max_tiles: int = 5000

    def validate(self) -> None:
        if self.base not in SPHERE_BASES + PLANE_BASES:
            raise ValidationError(f"unknown base {self.base!r}")
        if self.bump_profile not in PROFILES:
            raise ValidationError(f"unknown bump profile {self.bump_profile!r}")
        if self.patch_resolution < 16:
            raise ValidationError("patch_resolution must be at least 16")
        if self.apex_height == 0:
            raise ValidationError("apex_height must be nonzero (negative excavates)")


@dataclass
class LiftedTiling:
    tile: Prototile
    reference: "object"
    surface: object = None
    center: np.ndarray | None = None
    kind: str = "sphere"

    def __getitem__(self, key):
        return getattr(self, key)


def _grid_weights(n: int) -> np.ndarray:
    return np.array([(n - i - j, i, j) for i in range(n + 1) for j in range(n + 1 - i)], float) / n


def _finish_triangle(surface, corners, edges, resolution, name) -> Prototile:
    verts, faces = triangle_patch(surface, corners, edges, resolution)
    params = surface.blend(_grid_weights(resolution), corners)
    _check_fold(surface, params, name)
    tile = Prototile(tuple(edges), verts, faces, name)
    _orient_check(tile, surface.normal(params))
    tile.validate()
    return tile


def _orient_check(tile: Prototile, normals: np.ndarray) -> None:
    v, f = tile.vertices, tile.faces
    fn = np.cross(v[f[:, 1]] - v[f[:, 0]], v[f[:, 2]] - v[f[:, 0]])
    if np.einsum("ij,ij->i", fn, normals[f[:, 0]]).mean() <= 0:
        raise ValidationError(f"{tile.name}: patch is not anticlockwise about its normals")


def _flank_tile(surface, c, v0, v1, order: int, axis_point, axis_dir, resolution, name):
    """Face-centre/edge triangle: edges C->A (a), A->B (ā), B->C (β) with A the centre."""
    corners = np.array([v1, c, v0])
    e0, _ = lifted_edge(surface, corners[0], corners[1])
    r = rotation_matrix(axis_dir, -2 * math.pi / order)
    g = RigidMotion(r, axis_point - r @ axis_point)
    e1 = reverse(e0.transformed(g))
    e2, _ = lifted_edge(surface, corners[2], corners[0], symmetric=True)
    gap = np.linalg.norm(e1.end - e2.start)
    if gap > 1e-9:
        raise ValidationError(f"{name}: rotated slant edge misses the base vertex by {gap:.3g}")
    return _finish_triangle(surface, corners, [e0, e1, e2], resolution, name)


def make_lift_tile(spec: LiftSpec) -> tuple[Prototile, object, np.ndarray | None]:
    """Prototile of a lift and the surface it lies on."""
    spec.validate()
    res = spec.patch_resolution
    name = f"{spec.base.lower()}{spec.n or ''}-lift"
    if spec.base in SPHERE_BASES:
        base = sphere_base(spec.base, spec.n)
        surface = SphereBumps(base.centers, base.taus, spec.apex_height, spec.bump_profile,
                              base.weights)
        f, c = base.faces[0], base.centers[0]
        tile = _flank_tile(surface, c, base.vertices[f[0]], base.vertices[f[1]], len(f),
                           np.zeros(3), c, res, name)
        return tile, surface, np.zeros(3)
    base = plane_base(spec.base)
    surface = PlaneBumps(base.centers, base.rho, spec.apex_height, spec.bump_profile)
    c = base.center
    apex = surface.point(c[None])[0]
    tile = _flank_tile(surface, c, base.face[0], base.face[1], len(base.face),
                       apex, np.array([0.0, 0.0, 1.0]), res, name)
    return tile, surface, None


def make_lifted_tiling(spec: LiftSpec) -> LiftedTiling:
    """Pyramid-flank prototile over a base tiling, plus its propagated reference.

    Sphere bases give a closed reference; plane bases give the ``k_ring``
    neighbourhood of the seed.
    """
    from .engine import propagate

    tile, surface, center = make_lift_tile(spec)
    if spec.base in SPHERE_BASES:
        ref = propagate(tile, max_tiles=spec.max_tiles)
        return LiftedTiling(tile, ref, surface, center, "sphere")
    ref = propagate(tile, max_tiles=spec.max_tiles, max_depth=spec.k_ring)
    return LiftedTiling(tile, ref, surface, None, "plane")


# --- whole-face tiles -------------------------------------------------------

@dataclass(frozen=True)
class FaceSpec:
    """Whole triangular faces of a polyhedron lifted as tiles (no subdivision).

    Icosahedron, Octahedron and Tetrahedron give ααα tiles; Disphenoid gives αβγ.
    """

    base: str = "Icosahedron"
    height: float = 0.1
    patch_resolution: int = 32
    bump_profile: str = "cubic"


def make_face_tiling(spec: FaceSpec) -> LiftedTiling:
    from .engine import propagate

    base = sphere_base(spec.base)
    if any(len(f) != 3 for f in base.faces):
        raise ValidationError(f"{spec.base} faces are not triangles")
    surface = SphereBumps(base.centers, base.taus, spec.height, spec.bump_profile)
    corners = base.vertices[base.faces[0]]
    edges = [lifted_edge(surface, corners[k], corners[(k + 1) % 3], symmetric=True)[0]
             for k in range(3)]
    tile = _finish_triangle(surface, corners, edges, spec.patch_resolution,
                            f"{spec.base.lower()}-face")
    ref = propagate(tile, policy="first")
    return LiftedTiling(tile, ref, surface, np.zeros(3), "sphere")


def make_isosceles_grid_tile(height: float = 0.05, patch_resolution: int = 32) -> Prototile:
    """ααβ tile over the right isosceles triangle (1,0), (½,½), (0,0) of the plane.

    The height ``h·(cos 2π(x+y) + cos 2π(x-y))`` is invariant under the
    quarter-turns about the lattice points and the half-turns at edge
    midpoints, so both legs are congruent and every edge is self-congruent.
    """
    tau = 2 * math.pi

    def f(x, y):
        return height * (np.cos(tau * (x + y)) + np.cos(tau * (x - y)))

    def grad(x, y):
        a, b = np.sin(tau * (x + y)), np.sin(tau * (x - y))
        return -height * tau * (a + b), -height * tau * (a - b)

    surface = HeightField(f, grad)
    corners = np.array([(1.0, 0.0), (0.5, 0.5), (0.0, 0.0)])
    edges = [lifted_edge(surface, corners[k], corners[(k + 1) % 3], symmetric=True)[0]
             for k in range(3)]
    return _finish_triangle(surface, corners, edges, patch_resolution, "isosceles-grid")


def make_isosceles_grid(k: int = 3, height: float = 0.05, patch_resolution: int = 32):
    """Tetrakis square patch of ``k × k`` unit squares, four copies of the tile in each."""
    from .engine import assemble_state

    tile = make_isosceles_grid_tile(height, patch_resolution)
    z = np.array([0.0, 0.0, 1.0])
    motions = []
    for i in range(k):
        for j in range(k):
            c = np.array([0.5 + i, 0.5 + j, 0.0])
            for q in range(4):
                r = rotation_matrix(z, q * math.pi / 2)
                motions.append(RigidMotion(r, c - r @ np.array([0.5, 0.5, 0.0])))
    return assemble_state(tile, motions)


# --- revolution and one-edge tiles ------------------------------------------

def _egg(c: float):
    def rho(t):
        return np.sin(t), np.cos(t)

    def zeta(t):
        return np.cos(t) + c * np.sin(t) ** 2, -np.sin(t) + 2 * c * np.sin(t) * np.cos(t)

    return rho, zeta


@dataclass
class RevolutionSpec:
    """Meridian profile ``(ρ(t), ζ(t))``, ``t`` in [0, π], rotated about the z axis.

    ``profile`` is ``"egg"`` (``ζ = cos t + c·sin² t``), ``"semicircle"``, or an
    array of ``(ρ, ζ)`` samples from the north pole to the south pole.
    """

    m: int = 6
    profile: object = "egg"
    asymmetry: float = 0.25
    patch_resolution: int = 16
    sectors: int = 8
    tangent_tol: float = 1e-2

    def functions(self):
        """``(ρ, ζ)`` callables each returning (value, derivative) in ``t``."""
        if isinstance(self.profile, str):
            if self.profile == "egg":
                return _egg(self.asymmetry), config.TOL.eps_ang
            if self.profile == "semicircle":
                return _egg(0.0), config.TOL.eps_ang
            raise InvalidProfile(f"unknown profile {self.profile!r}")
        pts = np.asarray(self.profile, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 4:
            raise InvalidProfile("profile samples must have shape (k >= 4, 2)")
        s = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(pts, axis=0), axis=1))])
        t = math.pi * s / s[-1]
        sr, sz = CubicSpline(t, pts[:, 0]), CubicSpline(t, pts[:, 1])
        return ((lambda u: (sr(u), sr(u, 1))), (lambda u: (sz(u), sz(u, 1)))), self.tangent_tol


def _check_profile(spec: RevolutionSpec, rho, zeta, tol: float) -> None:
    if spec.m < 3:
        raise InvalidProfile("rotational order m must be at least 3")
    ends = np.array([0.0, math.pi])
    r, dr = rho(ends)
    z, dz = zeta(ends)
    if np.abs(r).max() > 1e-6:
        raise InvalidProfile(f"profile ends are off the axis (ρ = {r})")
    ang = np.arctan2(np.abs(dz), np.abs(dr))
    if ang.max() > tol:
        raise InvalidProfile(f"end tangents are {ang.max():.3g} rad from perpendicular to the axis")
    inner = np.linspace(0, math.pi, 201)[1:-1]
    if np.any(rho(inner)[0] <= 0):
        raise InvalidProfile("profile touches the axis between the poles")


def make_revolution_tile(spec: RevolutionSpec) -> Prototile:
    """Gore between meridians ``φ = 0`` and ``φ = 2π/m``; edge type a ā."""
    (rho, zeta), tol = spec.functions()
    _check_profile(spec, rho, zeta, tol)
    theta = 2 * math.pi / spec.m

    def surf(t, phi):
        r = rho(t)[0]
        return np.stack([r * np.cos(phi), r * np.sin(phi), zeta(t)[0]], axis=-1)

    def normal(t, phi):
        dr, dz = rho(t)[1], zeta(t)[1]
        return _unit_rows(np.stack([-dz * np.cos(phi), -dz * np.sin(phi), dr], axis=-1))

    n = config.TOL.samples
    tt = math.pi * arc_length_params(lambda u: surf(math.pi * u, np.zeros_like(u)), n)
    tt[0], tt[-1] = 0.0, math.pi
    zero = np.zeros(n)
    e0 = SampledEdge(surf(tt, zero), normal(tt, zero))
    rot = RigidMotion(rotation_matrix([0, 0, 1], theta), np.zeros(3))
    e1 = reverse(e0.transformed(rot))
    res = spec.patch_resolution
    if (n - 1) % res:
        raise ValidationError(f"patch resolution {res} must divide {n - 1}")
    step = (n - 1) // res
    k = spec.sectors
    phis = theta * np.arange(k + 1) / k
    verts = [e0.points[0]]
    rows = []
    for r in range(1, res):
        row = []
        for l, ph in enumerate(phis):
            if l == 0:
                p = e0.points[r * step]
            elif l == k:
                p = e1.points[n - 1 - r * step]
            else:
                p = surf(np.array([tt[r * step]]), np.array([ph]))[0]
            row.append(len(verts))
            verts.append(p)
        rows.append(row)
    south = len(verts)
    verts.append(e0.points[-1])
    faces = []
    for l in range(k):
        faces.append((0, rows[0][l], rows[0][l + 1]))
        faces.append((south, rows[-1][l + 1], rows[-1][l]))
    for r in range(res - 2):
        a, b = rows[r], rows[r + 1]
        for l in range(k):
            faces.append((a[l], b[l], b[l + 1]))
            faces.append((a[l], b[l + 1], a[l + 1]))
    verts = np.array(verts)
    faces = np.array(faces, dtype=np.int64)
    name = f"revolution-m{spec.m}"
    tile = Prototile((e0, e1), verts, faces, name)
    nrm = np.vstack([[0, 0, 1.0]] + [
        normal(np.array([tt[r * step]] * (k + 1)), phis) for r in range(1, res)
    ] + [[0, 0, -1.0]])
    _orient_check(tile, nrm)
    tile.validate()
    return tile


def make_one_edge_tile(bump_amplitude: float = 0.1, rings: int = 16) -> Prototile:
    """Upper unit hemisphere pushed by ``ε·(y + xy)`` along z.

    The boundary is the closed curve ``(cos φ, sin φ, ε(sin φ + ½ sin 2φ))`` with
    horizontal radial normals.  A half-turn about the x axis maps it to its
    reverse, and for ``ε > 0`` no other motion does.
    """
    eps = float(bump_amplitude)
    if not 0 <= eps < 0.2:
        raise ValidationError("bump amplitude must lie in [0, 0.2)")

    def surf(u):
        x, y = u[..., 0], u[..., 1]
        return u + (eps * (y + x * y))[..., None] * np.array([0.0, 0.0, 1.0])

    def normal(u):
        x, y, z = u[..., 0], u[..., 1], u[..., 2]
        grad = np.stack([y, 1 + x, np.zeros_like(x)], axis=-1)
        return _unit_rows(u - (eps * z)[..., None] * grad)

    def ring(psi, phi):
        return np.stack([np.sin(psi) * np.cos(phi), np.sin(psi) * np.sin(phi),
                         np.cos(psi) * np.ones_like(phi)], axis=-1)

    n = config.TOL.samples
    loop = lambda s: surf(ring(math.pi / 2, 2 * math.pi * s))
    ss = arc_length_params(loop, n, symmetric=True)
    phi = 2 * math.pi * ss
    u_eq = ring(math.pi / 2, phi)
    u_eq[:, 2] = 0.0
    edge = SampledEdge(surf(u_eq), normal(u_eq))
    edge = SampledEdge(np.vstack([edge.points[:-1], edge.points[:1]]),
                       np.vstack([edge.normals[:-1], edge.normals[:1]]))
    ph = phi[:-1]
    verts = [surf(np.array([0.0, 0.0, 1.0]))]
    rows = []
    for r in range(1, rings + 1):
        psi = 0.5 * math.pi * r / rings
        if r == rings:
            pts = edge.points[:-1]
        else:
            pts = surf(ring(psi, ph))
        rows.append(list(range(len(verts), len(verts) + len(ph))))
        verts.extend(pts)
    faces = []
    k = len(ph)
    for l in range(k):
        faces.append((0, rows[0][l], rows[0][(l + 1) % k]))
    for r in range(rings - 1):
        a, b = rows[r], rows[r + 1]
        for l in range(k):
            l2 = (l + 1) % k
            faces.append((a[l], b[l], b[l2]))
            faces.append((a[l], b[l2], a[l2]))
    verts = np.array(verts)
    tile = Prototile((edge,), verts, np.array(faces, dtype=np.int64), f"one-edge-{eps:g}")
    # the push is vertical, so the hemisphere point is recovered from (x, y)
    xy = verts[:, :2]
    u = np.column_stack([xy, np.sqrt(np.clip(1 - (xy ** 2).sum(axis=1), 0, None))])
    _orient_check(tile, normal(u))
    tile.validate()
    return tile


# --- structure checks -------------------------------------------------------

def apex_corner(t: Prototile) -> int:
    kind, a = tile_type(classify_edge_type(t))
    return a


def verify_type1_structure(state, center: np.ndarray | None = None) -> dict:
    """Apex orbit coplanar (plane) or cospherical (sphere), with regular base polygons.

    ``center`` is the expected sphere centre; when omitted the shape of the
    orbit decides between the two cases.
    """
    t = state.prototile
    a = apex_corner(t)
    eps = config.TOL.eps_pos(t.diameter)
    corners = t.corners
    apex_local = corners[a]
    apexes = np.array([pt.motion.apply(apex_local) for pt in state.tiles])
    uniq = _unique_points(apexes, eps * 10)
    report: dict = {"apex_count": len(uniq), "violations": []}
    centred = uniq - uniq.mean(axis=0)
    sv = np.linalg.svd(centred, compute_uv=False) if len(uniq) > 1 else np.zeros(3)
    plane_resid = float(sv[-1] / math.sqrt(len(uniq))) if len(uniq) > 3 else 0.0
    normal_dir = np.linalg.svd(centred)[2][-1] if len(uniq) > 2 else np.array([0.0, 0.0, 1.0])
    planar = plane_resid < eps and (center is None)
    if planar:
        dist = np.abs(centred @ normal_dir)
        report.update(kind="plane", coplanar_residual=float(dist.max()))
        if dist.max() >= eps:
            report["violations"].append(f"apexes leave their plane by {dist.max():.3g}")
    else:
        if center is None:
            center = _fit_sphere(uniq)
        r = np.linalg.norm(uniq - center, axis=1)
        fit = _fit_sphere(uniq) if len(uniq) >= 4 else center
        report.update(kind="sphere", sphere_radius=float(r.mean()),
                      cosphere_residual=float(r.max() - r.min()),
                      fitted_center=fit.tolist(), center_offset=float(np.linalg.norm(fit - center)))
        if r.max() - r.min() >= eps:
            report["violations"].append(f"apex radii spread {r.max() - r.min():.3g}")
        if np.linalg.norm(fit - center) >= eps:
            report["violations"].append(f"apex sphere centre off by {np.linalg.norm(fit - center):.3g}")
    # base polygon around each apex
    others = [k for k in range(len(corners)) if k != a]
    # only apexes with a complete fan; boundary apexes of open patches are partial
    fans = [[pt for pt in state.tiles if np.linalg.norm(pt.motion.apply(apex_local) - p) < eps * 10]
            for p in uniq]
    full = max(len(f) for f in fans)
    worst = 0.0
    for p, fan in zip(uniq, fans):
        if len(fan) < full:
            continue
        ring = [pt.motion.apply(corners[k]) for pt in fan for k in others]
        ring = _unique_points(np.array(ring), eps * 10)
        axis = normal_dir if planar else (p - center) / np.linalg.norm(p - center)
        worst = max(worst, _polygon_irregularity(ring, p, axis))
    report["polygon_irregularity"] = worst
    if worst >= eps:
        report["violations"].append(f"base polygon irregular by {worst:.3g}")
    report["ok"] = not report["violations"]
    return report


def _unique_points(p: np.ndarray, eps: float) -> np.ndarray:
    from .mesh import weld

    if len(p) == 0:
        return p.reshape(0, 3)
    merged, _ = weld(p, eps)
    return merged


def _fit_sphere(p: np.ndarray) -> np.ndarray:
    a = np.hstack([2 * p, np.ones((len(p), 1))])
    b = (p ** 2).sum(axis=1)
    sol = np.linalg.lstsq(a, b, rcond=None)[0]
    return sol[:3]


def _polygon_irregularity(ring: np.ndarray, apex: np.ndarray, axis: np.ndarray) -> float:
    """Spread of radii and angular gaps of ``ring`` around the line through ``apex``."""
    if len(ring) < 3:
        return 0.0
    d = ring - apex
    d -= np.outer(d @ axis, axis)
    ref = d[0] / np.linalg.norm(d[0])
    ref2 = np.cross(axis, ref)
    ang = np.sort(np.arctan2(d @ ref2, d @ ref) % (2 * math.pi))
    gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * math.pi]]))
    rad = np.linalg.norm(d, axis=1)
    height = ring @ axis
    scale = rad.mean()
    return float(max(rad.max() - rad.min(), scale * (gaps.max() - gaps.min()),
                     height.max() - height.min()))


# --- unsmoothed control -------------------------------------------------------

def make_flat_square_tile(resolution: int = 16) -> Prototile:
    """Flat square face ``z = 1`` of the cube ``[-1, 1]^3``, normal ``+z``."""
    n = config.TOL.samples
    corners = np.array([[1.0, -1.0, 1.0], [1.0, 1.0, 1.0], [-1.0, 1.0, 1.0], [-1.0, -1.0, 1.0]])
    t = np.linspace(0.0, 1.0, n)[:, None]
    up = np.tile([0.0, 0.0, 1.0], (n, 1))
    edges = [SampledEdge(corners[k] + t * (corners[(k + 1) % 4] - corners[k]), up) for k in range(4)]
    g = np.linspace(-1.0, 1.0, resolution + 1)
    x, y = np.meshgrid(g, g, indexing="ij")
    verts = np.column_stack([x.ravel(), y.ravel(), np.ones(x.size)])
    idx = np.arange(verts.shape[0]).reshape(x.shape)
    a, b, c, d = idx[:-1, :-1], idx[1:, :-1], idx[1:, 1:], idx[:-1, 1:]
    faces = np.vstack([np.column_stack([a.ravel(), b.ravel(), c.ravel()]),
                       np.column_stack([a.ravel(), c.ravel(), d.ravel()])])
    tile = Prototile(tuple(edges), verts, faces, "flat-square")
    tile.validate()
    return tile


def make_flat_cube(resolution: int = 16):
    """Polyhedral cube assembled from six copies of the flat square: every seam is a crease."""
    from .engine import assemble_state

    tile = make_flat_square_tile(resolution)
    x, y = np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0])
    rots = [np.eye(3)] + [rotation_matrix(ax, ang) for ax, ang in
                          ((x, math.pi / 2), (x, -math.pi / 2), (y, math.pi / 2), (y, -math.pi / 2), (x, math.pi))]
    return assemble_state(tile, [RigidMotion(r, np.zeros(3)) for r in rots])
