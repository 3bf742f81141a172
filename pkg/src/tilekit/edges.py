"""Sampled boundary edges and their congruences.

An edge is an ordered polyline of samples at (near) uniform arc length, each
carrying the unit surface normal of the tile there.  Two edges are congruent
when a proper rigid motion maps samples to samples and normals to normals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import config
from .errors import DegenerateEdge, MismatchedSampling, ValidationError
from .geom3 import Line3, RigidMotion, rotation_about_line, rotation_axis


@dataclass(frozen=True, eq=False)
class SampledEdge:
    points: np.ndarray
    normals: np.ndarray

    def __post_init__(self):
        p = np.array(self.points, dtype=float)
        n = np.array(self.normals, dtype=float)
        if p.ndim != 2 or p.shape[1] != 3 or p.shape != n.shape:
            raise ValidationError(f"edge arrays must be (N, 3) and equal, got {p.shape} {n.shape}")
        if len(p) < 8:
            raise ValidationError(f"edge needs at least 8 samples, got {len(p)}")
        bad = np.abs(np.linalg.norm(n, axis=1) - 1.0)
        if bad.max() > 1e-9:
            raise ValidationError(f"edge normals not unit (worst deviation {bad.max():.3g})")
        p.setflags(write=False)
        n.setflags(write=False)
        object.__setattr__(self, "points", p)
        object.__setattr__(self, "normals", n)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def arc_length(self) -> float:
        return float(np.linalg.norm(np.diff(self.points, axis=0), axis=1).sum())

    @property
    def start(self) -> np.ndarray:
        return self.points[0]

    @property
    def end(self) -> np.ndarray:
        return self.points[-1]

    def is_closed(self) -> bool:
        return bool(np.linalg.norm(self.end - self.start) < config.TOL.eps_pos(self.arc_length))

    def spacing_uniformity(self) -> float:
        """Worst relative deviation of sample spacing from ``arc_length/(N-1)``."""
        seg = np.linalg.norm(np.diff(self.points, axis=0), axis=1)
        mean = self.arc_length / (len(self) - 1)
        return float(np.abs(seg - mean).max() / mean)

    def transformed(self, m: RigidMotion) -> "SampledEdge":
        return SampledEdge(m.apply(self.points), m.apply_vectors(self.normals))

    def start_tangent(self) -> np.ndarray:
        """Unit tangent leaving ``start`` (second-order one-sided difference)."""
        p = self.points
        t = -3.0 * p[0] + 4.0 * p[1] - p[2]
        return t / np.linalg.norm(t)

    def end_tangent(self) -> np.ndarray:
        """Unit tangent arriving at ``end``."""
        p = self.points
        t = 3.0 * p[-1] - 4.0 * p[-2] + p[-3]
        return t / np.linalg.norm(t)


@dataclass(frozen=True, eq=False)
class EdgeCongruence:
    motion: RigidMotion
    rms_residual: float
    unique: bool


def reverse(e: SampledEdge) -> SampledEdge:
    return SampledEdge(e.points[::-1], e.normals[::-1])


def resample(e: SampledEdge, n: int | None = None) -> SampledEdge:
    """Resample to ``n`` points at uniform chord arc length."""
    n = config.TOL.samples if n is None else n
    seg = np.linalg.norm(np.diff(e.points, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    target = np.linspace(0.0, s[-1], n)
    pts = np.column_stack([np.interp(target, s, e.points[:, k]) for k in range(3)])
    nrm = np.column_stack([np.interp(target, s, e.normals[:, k]) for k in range(3)])
    nrm /= np.linalg.norm(nrm, axis=1, keepdims=True)
    pts[0], pts[-1] = e.points[0], e.points[-1]
    return SampledEdge(pts, nrm)


def _augmented(e: SampledEdge, h: float) -> np.ndarray:
    return np.vstack([e.points, e.points + h * e.normals])


def register(a: np.ndarray, b: np.ndarray) -> tuple[RigidMotion, float]:
    """Least-squares proper motion taking rows of ``a`` onto rows of ``b``.

    Cross-covariance SVD with a determinant sign fix.  Returns the motion
    and the RMS residual.
    """
    ca, cb = a.mean(axis=0), b.mean(axis=0)
    h = (a - ca).T @ (b - cb)
    u, _, vt = np.linalg.svd(h)
    d = np.sign(np.linalg.det(vt.T @ u.T)) or 1.0
    r = vt.T @ np.diag([1.0, 1.0, d]) @ u.T
    t = cb - r @ ca
    res = a @ r.T + t - b
    return RigidMotion(r, t), float(np.sqrt((res ** 2).sum(axis=1).mean()))


def _collinear(pts: np.ndarray, eps: float) -> bool:
    sv = np.linalg.svd(pts - pts.mean(axis=0), compute_uv=False)
    return bool(sv[1] / math.sqrt(len(pts)) < eps)


def slides_along_itself(e: SampledEdge) -> bool:
    """True when a motion maps the edge one sample forward onto itself.

    Circles, helices and lines with co-moving normals pass: they admit a
    continuum of self-placements, so their congruences are never unique.
    """
    h = config.TOL.normal_offset_rel * e.arc_length
    if e.is_closed():
        a = np.vstack([e.points[:-1], e.points[:-1] + h * e.normals[:-1]])
        rolled_p = np.roll(e.points[:-1], -1, axis=0)
        rolled_n = np.roll(e.normals[:-1], -1, axis=0)
        b = np.vstack([rolled_p, rolled_p + h * rolled_n])
    else:
        a = np.vstack([e.points[:-1], e.points[:-1] + h * e.normals[:-1]])
        b = np.vstack([e.points[1:], e.points[1:] + h * e.normals[1:]])
    _, rms = register(a, b)
    return rms <= config.TOL.eps_cong(e.arc_length)


def _cyclic_shift(e: SampledEdge, k: int) -> SampledEdge:
    p = np.roll(e.points[:-1], -k, axis=0)
    n = np.roll(e.normals[:-1], -k, axis=0)
    return SampledEdge(np.vstack([p, p[:1]]), np.vstack([n, n[:1]]))


def find_congruence(e1: SampledEdge, e2: SampledEdge) -> EdgeCongruence | None:
    """Proper motion taking ``e1`` onto ``e2`` with normals, or ``None``.

    Closed loops are matched over every cyclic shift of ``e2``'s start.
    """
    if len(e1) != len(e2):
        raise MismatchedSampling(f"sample counts differ: {len(e1)} vs {len(e2)}")
    tol = config.TOL
    length = e1.arc_length
    if abs(length - e2.arc_length) > tol.eps_pos(length):
        return None
    h = tol.normal_offset_rel * length
    eps_cong = tol.eps_cong(length)
    a = _augmented(e1, h)
    loop = e1.is_closed() and e2.is_closed()
    shifts = range(len(e1) - 1) if loop else [0]
    best: tuple[float, RigidMotion] | None = None
    n_matches = 0
    for k in shifts:
        target = _cyclic_shift(e2, k) if loop and k else e2
        motion, rms = register(a, _augmented(target, h))
        if rms <= eps_cong:
            n_matches += 1
        if best is None or rms < best[0]:
            best = (rms, motion)
    rms, motion = best
    if rms > eps_cong:
        return None
    unique = n_matches == 1 and not _collinear(a, tol.eps_pos(length)) and not slides_along_itself(e1)
    return EdgeCongruence(motion, rms, unique)


def self_involution(e: SampledEdge) -> RigidMotion | None:
    """Half-turn about an axis through the chord midpoint taking ``e`` to ``reverse(e)``."""
    if e.is_closed():
        raise DegenerateEdge("edge endpoints coincide")
    c = find_congruence(e, reverse(e))
    if c is None:
        return None
    if abs(c.motion.rotation_angle() - math.pi) > 1e-6:
        return None
    mid = 0.5 * (e.start + e.end)
    axis = rotation_axis(c.motion)
    phi = rotation_about_line(Line3(mid, axis.direction), math.pi)
    h = config.TOL.normal_offset_rel * e.arc_length
    r = reverse(e)
    res = _augmented(e, h) @ phi.rotation.T + phi.translation - _augmented(r, h)
    if np.sqrt((res ** 2).sum(axis=1).mean()) > config.TOL.eps_cong(e.arc_length):
        return None
    return phi


def involution_axis(e: SampledEdge) -> Line3 | None:
    phi = self_involution(e)
    if phi is None:
        return None
    mid = 0.5 * (e.start + e.end)
    return Line3(mid, rotation_axis(phi).direction)


def pointwise_error(c: EdgeCongruence, e1: SampledEdge, e2: SampledEdge) -> tuple[float, float]:
    """Worst sample position error and worst normal error of ``c`` on ``e1 -> e2``."""
    dp = np.linalg.norm(c.motion.apply(e1.points) - e2.points, axis=1).max()
    dn = np.linalg.norm(c.motion.apply_vectors(e1.normals) - e2.normals, axis=1).max()
    return float(dp), float(dn)


__all__ = [
    "SampledEdge", "EdgeCongruence", "reverse", "resample", "register",
    "find_congruence", "self_involution", "involution_axis", "slides_along_itself",
    "pointwise_error",
]
