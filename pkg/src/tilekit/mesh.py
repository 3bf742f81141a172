"""Welded triangle meshes: Euler characteristic, angle defects, manifold checks."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree


def weld(vertices: np.ndarray, eps: float) -> tuple[np.ndarray, np.ndarray]:
    """Merge vertices closer than ``eps``; returns (unique vertices, old -> new index)."""
    v = np.asarray(vertices, dtype=float)
    pairs = cKDTree(v).query_pairs(eps, output_type="ndarray")
    n = len(v)
    g = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
    _, labels = connected_components(g, directed=False)
    # number groups by first occurrence for stable output
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    order = np.argsort(first)
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    index = rank[inverse]
    merged = np.zeros((len(order), 3))
    counts = np.bincount(index, minlength=len(order)).astype(float)
    np.add.at(merged, index, v)
    return merged / counts[:, None], index


@dataclass
class MergedMesh:
    vertices: np.ndarray
    faces: np.ndarray
    face_tile: np.ndarray

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Unique undirected edges and the number of faces on each."""
        f = self.faces
        e = np.sort(np.vstack([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]]), axis=1)
        return np.unique(e, axis=0, return_counts=True)

    def euler_characteristic(self) -> int:
        e, _ = self.edges()
        used = np.unique(self.faces)
        return int(len(used) - len(e) + len(self.faces))

    def is_closed_manifold(self) -> bool:
        _, counts = self.edges()
        return bool(np.all(counts == 2))

    def is_manifold(self) -> bool:
        _, counts = self.edges()
        return bool(np.all(counts <= 2))

    def angle_defects(self) -> np.ndarray:
        """``2π`` minus the sum of corner angles at each vertex."""
        v, f = self.vertices, self.faces
        sums = np.zeros(len(v))
        for k in range(3):
            p = v[f[:, k]]
            a = v[f[:, (k + 1) % 3]] - p
            b = v[f[:, (k + 2) % 3]] - p
            cross = np.linalg.norm(np.cross(a, b), axis=1)
            dot = np.einsum("ij,ij->i", a, b)
            np.add.at(sums, f[:, k], np.arctan2(cross, dot))
        out = 2 * math.pi - sums
        unused = np.setdiff1d(np.arange(len(v)), np.unique(f))
        out[unused] = 0.0
        return out

    def total_curvature(self) -> float:
        return float(self.angle_defects().sum())


def merge(parts: list[tuple[np.ndarray, np.ndarray]], eps: float) -> MergedMesh:
    """Weld a list of (vertices, faces) meshes into one."""
    offsets = np.cumsum([0] + [len(v) for v, _ in parts])
    allv = np.vstack([v for v, _ in parts])
    allf = np.vstack([f + o for (_, f), o in zip(parts, offsets)])
    face_tile = np.concatenate([np.full(len(f), k) for k, (_, f) in enumerate(parts)])
    merged, index = weld(allv, eps)
    faces = index[allf]
    keep = (faces[:, 0] != faces[:, 1]) & (faces[:, 1] != faces[:, 2]) & (faces[:, 2] != faces[:, 0])
    return MergedMesh(merged, faces[keep], face_tile[keep])
