"""Triangle-triangle intersection between placed tile patches.

Each patch is shrunk slightly toward its own centroid so that copies which
only touch along shared boundaries do not register as overlapping.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree


def _edges(t: np.ndarray) -> np.ndarray:
    return np.stack([t[:, 1] - t[:, 0], t[:, 2] - t[:, 1], t[:, 0] - t[:, 2]], axis=1)


def triangles_intersect(a: np.ndarray, b: np.ndarray, tol: float = 0.0) -> np.ndarray:
    """Pairwise test of triangles ``a[k]`` against ``b[k]``, arrays of shape ``(k, 3, 3)``.

    Separating-axis test over both face normals, the nine edge cross
    products and the six in-plane edge normals (needed when coplanar).
    Projections overlapping by at most ``tol`` count as separated.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if len(a) == 0:
        return np.zeros(0, dtype=bool)
    ea, eb = _edges(a), _edges(b)
    na = np.cross(ea[:, 0], -ea[:, 2])
    nb = np.cross(eb[:, 0], -eb[:, 2])
    cross = np.cross(ea[:, :, None, :], eb[:, None, :, :]).reshape(len(a), 9, 3)
    inplane_a = np.cross(na[:, None, :], ea)
    inplane_b = np.cross(nb[:, None, :], eb)
    axes = np.concatenate([na[:, None], nb[:, None], cross, inplane_a, inplane_b], axis=1)
    norm = np.linalg.norm(axes, axis=2)
    scale = max(np.abs(a).max(), np.abs(b).max(), 1e-300)
    valid = norm > 1e-12 * scale * scale
    axes = np.where(valid[..., None], axes / np.where(valid, norm, 1.0)[..., None], 0.0)
    pa = np.einsum("kij,kaj->kai", a, axes)
    pb = np.einsum("kij,kaj->kai", b, axes)
    sep = (pa.max(axis=2) <= pb.min(axis=2) + tol) | (pb.max(axis=2) <= pa.min(axis=2) + tol)
    sep &= valid
    return ~sep.any(axis=1)


@dataclass
class PatchProxy:
    """Shrunk world-space triangles of one placed tile with a centroid index."""

    triangles: np.ndarray
    center: np.ndarray
    radius: float
    reach: float
    tree: cKDTree
    lo: np.ndarray
    hi: np.ndarray

    @classmethod
    def build(cls, vertices: np.ndarray, faces: np.ndarray, shrink: float) -> "PatchProxy":
        center = vertices.mean(axis=0)
        v = center + shrink * (vertices - center)
        tris = v[faces]
        cents = tris.mean(axis=1)
        reach = float(np.linalg.norm(tris - cents[:, None], axis=2).max())
        radius = float(np.linalg.norm(v - center, axis=1).max())
        return cls(tris, center, radius, reach, cKDTree(cents), tris.min(axis=1), tris.max(axis=1))


def proxies_overlap(p: PatchProxy, q: PatchProxy, tol: float = 0.0) -> bool:
    if np.linalg.norm(p.center - q.center) > p.radius + q.radius:
        return False
    pairs = p.tree.query_ball_tree(q.tree, p.reach + q.reach)
    i = np.repeat(np.arange(len(pairs)), [len(x) for x in pairs])
    if len(i) == 0:
        return False
    j = np.concatenate([np.asarray(x, dtype=np.int64) for x in pairs if x])
    # bounding boxes first; SAT only on boxes that meet
    box = np.all((p.lo[i] <= q.hi[j] - tol) & (q.lo[j] <= p.hi[i] - tol), axis=1)
    i, j = i[box], j[box]
    if len(i) == 0:
        return False
    hit = triangles_intersect(p.triangles[i], q.triangles[j], tol)
    return bool(hit.any())
