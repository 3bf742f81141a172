"""Rigid motions of 3-space, lines, and axis-relation predicates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import config


def _unit(v: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(v)
    if n == 0:
        raise ValueError("zero vector has no direction")
    return v / n


def orthonormalize(rotation: np.ndarray) -> np.ndarray:
    """Nearest proper rotation to ``rotation`` (polar decomposition)."""
    u, _, vt = np.linalg.svd(rotation)
    r = u @ vt
    if np.linalg.det(r) < 0:
        u[:, -1] *= -1
        r = u @ vt
    return r


@dataclass(frozen=True, eq=False)
class RigidMotion:
    """Proper rigid motion ``x -> rotation @ x + translation``."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        r = np.array(self.rotation, dtype=float).reshape(3, 3)
        t = np.array(self.translation, dtype=float).reshape(3)
        r.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "rotation", r)
        object.__setattr__(self, "translation", t)

    @classmethod
    def identity(cls) -> "RigidMotion":
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def from_translation(cls, d) -> "RigidMotion":
        return cls(np.eye(3), np.asarray(d, dtype=float))

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "RigidMotion":
        m = np.asarray(m, dtype=float)
        return cls(m[:3, :3], m[:3, 3])

    def matrix(self) -> np.ndarray:
        m = np.eye(4)
        m[:3, :3] = self.rotation
        m[:3, 3] = self.translation
        return m

    def apply(self, points) -> np.ndarray:
        """Transform points, shape ``(3,)`` or ``(n, 3)``."""
        p = np.asarray(points, dtype=float)
        return p @ self.rotation.T + self.translation

    def apply_vectors(self, vectors) -> np.ndarray:
        return np.asarray(vectors, dtype=float) @ self.rotation.T

    def rotation_angle(self) -> float:
        c = (np.trace(self.rotation) - 1.0) / 2.0
        return math.acos(min(1.0, max(-1.0, c)))

    def is_valid(self, eps: float | None = None) -> bool:
        eps = config.TOL.eps_num if eps is None else eps
        r = self.rotation
        return bool(
            np.abs(r.T @ r - np.eye(3)).max() < eps and abs(np.linalg.det(r) - 1.0) < eps
        )

    def orthonormalized(self) -> "RigidMotion":
        return RigidMotion(orthonormalize(self.rotation), self.translation)

    def __matmul__(self, other: "RigidMotion") -> "RigidMotion":
        return compose(self, other)

    def __repr__(self) -> str:
        return (
            f"RigidMotion(angle={self.rotation_angle():.6g}, "
            f"translation={np.array2string(self.translation, precision=6)})"
        )


@dataclass(frozen=True, eq=False)
class Line3:
    point: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        p = np.array(self.point, dtype=float).reshape(3)
        d = _unit(np.array(self.direction, dtype=float).reshape(3))
        p.setflags(write=False)
        d.setflags(write=False)
        object.__setattr__(self, "point", p)
        object.__setattr__(self, "direction", d)

    def distance_to(self, x) -> float:
        v = np.asarray(x, dtype=float) - self.point
        return float(np.linalg.norm(v - np.dot(v, self.direction) * self.direction))

    def transformed(self, m: RigidMotion) -> "Line3":
        return Line3(m.apply(self.point), m.apply_vectors(self.direction))


@dataclass(frozen=True, eq=False)
class AxisRelation:
    """One of ``Equal``, ``Parallel``, ``Intersecting`` (with ``point``) or ``Skew``."""

    tag: str
    point: np.ndarray | None = field(default=None)

    def __repr__(self) -> str:
        if self.tag == "Intersecting":
            return f"Intersecting({np.array2string(self.point, precision=6)})"
        return self.tag


def compose(m1: RigidMotion, m2: RigidMotion) -> RigidMotion:
    """``m1 ∘ m2``: apply ``m2`` first, then ``m1``."""
    return RigidMotion(m1.rotation @ m2.rotation, m1.rotation @ m2.translation + m1.translation)


def compose_all(motions: Iterable[RigidMotion]) -> RigidMotion:
    """Left-to-right product ``motions[0] ∘ motions[1] ∘ ...``.

    Rotations are re-orthonormalized every ``reorthonormalize_every`` factors.
    """
    every = config.TOL.reorthonormalize_every
    out = RigidMotion.identity()
    for k, m in enumerate(motions, start=1):
        out = compose(out, m)
        if k % every == 0:
            out = out.orthonormalized()
    return out


def invert(m: RigidMotion) -> RigidMotion:
    rt = m.rotation.T
    return RigidMotion(rt, -rt @ m.translation)


def rotation_matrix(direction, angle: float) -> np.ndarray:
    """Right-handed rotation by ``angle`` about unit ``direction`` (Rodrigues)."""
    k = _unit(np.asarray(direction, dtype=float))
    kx = np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])
    return np.eye(3) + math.sin(angle) * kx + (1.0 - math.cos(angle)) * (kx @ kx)


def rotation_about_line(axis: Line3, angle: float) -> RigidMotion:
    r = rotation_matrix(axis.direction, angle)
    return RigidMotion(r, axis.point - r @ axis.point)


def rotation_axis(m: RigidMotion) -> Line3:
    """Axis of a rotation (a motion with a fixed point); screw part is ignored.

    For a motion with a fixed line, the point returned is the least-squares
    fixed point closest to the origin.
    """
    r = m.rotation
    angle = m.rotation_angle()
    if angle < 1e-12:
        raise ValueError("identity rotation has no axis")
    w, v = np.linalg.eig(r)
    d = np.real(v[:, np.argmin(np.abs(w - 1.0))])
    d = _unit(d)
    if angle < math.pi - 1e-6:
        skew = np.array([r[2, 1] - r[1, 2], r[0, 2] - r[2, 0], r[1, 0] - r[0, 1]])
        if np.dot(skew, d) < 0:
            d = -d
    # (I - R) p = t restricted to the plane orthogonal to d
    a = np.eye(3) - r
    p, *_ = np.linalg.lstsq(np.vstack([a, d[None, :]]), np.append(m.translation, 0.0), rcond=None)
    return Line3(p, d)


def closest_points(l1: Line3, l2: Line3) -> tuple[np.ndarray, np.ndarray]:
    """Closest points on two lines; for parallel lines, ``l1.point`` and its foot on ``l2``."""
    d1, d2 = l1.direction, l2.direction
    w = l1.point - l2.point
    b = np.dot(d1, d2)
    denom = 1.0 - b * b
    if denom < 1e-15:
        return l1.point.copy(), l2.point + np.dot(d2, w) * d2
    s = (b * np.dot(d2, w) - np.dot(d1, w)) / denom
    t = (np.dot(d2, w) - b * np.dot(d1, w)) / denom
    return l1.point + s * d1, l2.point + t * d2


def axis_relation(l1: Line3, l2: Line3, eps_pos: float | None = None,
                  eps_ang: float | None = None) -> AxisRelation:
    eps_pos = config.TOL.eps_pos() if eps_pos is None else eps_pos
    eps_ang = config.TOL.eps_ang if eps_ang is None else eps_ang
    cross = np.cross(l1.direction, l2.direction)
    if np.linalg.norm(cross) < eps_ang:
        if l1.distance_to(l2.point) < eps_pos:
            return AxisRelation("Equal")
        return AxisRelation("Parallel")
    p1, p2 = closest_points(l1, l2)
    if np.linalg.norm(p1 - p2) < eps_pos:
        return AxisRelation("Intersecting", 0.5 * (p1 + p2))
    return AxisRelation("Skew")


def lines_classification(lines: Sequence[Line3], eps_pos: float, eps_ang: float):
    """Joint relation of several lines: ``("AllParallel", None)``,
    ``("Concurrent", point)`` or ``("Inconsistent", None)``.

    Concurrency uses the least-squares point minimizing summed squared
    distances to all lines.
    """
    d0 = lines[0].direction
    if all(np.linalg.norm(np.cross(d0, ln.direction)) < eps_ang for ln in lines[1:]):
        return "AllParallel", None
    a = np.zeros((3, 3))
    b = np.zeros(3)
    for ln in lines:
        proj = np.eye(3) - np.outer(ln.direction, ln.direction)
        a += proj
        b += proj @ ln.point
    point = np.linalg.lstsq(a, b, rcond=None)[0]
    if max(ln.distance_to(point) for ln in lines) < eps_pos:
        return "Concurrent", point
    return "Inconsistent", None


def motion_distance(m1: RigidMotion, m2: RigidMotion, diameter: float = 1.0) -> float:
    """Rotation angle between the two rotations plus translation gap over ``diameter``."""
    rel = m1.rotation.T @ m2.rotation
    c = (np.trace(rel) - 1.0) / 2.0
    angle = math.acos(min(1.0, max(-1.0, c)))
    # acos loses precision near 0; use the antisymmetric part there
    if angle < 1e-4:
        skew = np.array([rel[2, 1] - rel[1, 2], rel[0, 2] - rel[2, 0], rel[1, 0] - rel[0, 1]])
        angle = math.asin(min(1.0, np.linalg.norm(skew) / 2.0))
    gap = float(np.linalg.norm(m1.translation - m2.translation))
    return angle + gap / diameter


def random_motion(rng: np.random.Generator, scale: float = 1.0) -> RigidMotion:
    """Uniformly random rotation with a Gaussian translation."""
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    w, x, y, z = q
    r = np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
        [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
        [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
    ])
    return RigidMotion(r, rng.normal(scale=scale, size=3))
