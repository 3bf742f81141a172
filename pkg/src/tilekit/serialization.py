"""JSON documents for tiles, states and run reports; OBJ mesh export."""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import config
from .edges import SampledEdge, resample
from .engine import PlacedTile, TilingState, merged_mesh
from .errors import IoError, ParseError, ValidationError
from .geom3 import RigidMotion
from .prototile import Prototile

SCHEMA_VERSION = 1


# --- helpers ----------------------------------------------------------------

def _read_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ParseError(f"{path}: top level must be an object")
    return data


def _write_text(path, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc.strerror or exc}") from exc


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=1, ensure_ascii=False, allow_nan=False) + "\n"


def _array(data, name: str, shape_tail: tuple[int, ...], dtype=float) -> np.ndarray:
    try:
        a = np.array(data, dtype=dtype)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{name}: not a numeric array") from exc
    if a.ndim != 1 + len(shape_tail) or a.shape[1:] != shape_tail:
        raise ParseError(f"{name}: expected shape (k, {', '.join(map(str, shape_tail))}), got {a.shape}")
    if dtype is float and not np.all(np.isfinite(a)):
        raise ParseError(f"{name}: non-finite values")
    return a


# --- tiles -------------------------------------------------------------------

def tile_to_dict(t: Prototile) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "name": t.name,
        "edges": [{"points": e.points.tolist(), "normals": e.normals.tolist()} for e in t.edges],
        "patch": {"vertices": t.vertices.tolist(), "faces": t.faces.tolist()},
    }


def tile_from_dict(data: dict) -> Prototile:
    if data.get("schema_version") != SCHEMA_VERSION:
        raise ParseError(f"unsupported schema_version {data.get('schema_version')!r}")
    edges_doc = data.get("edges")
    if not isinstance(edges_doc, list) or not edges_doc:
        raise ParseError("edges must be a nonempty list")
    patch = data.get("patch")
    if not isinstance(patch, dict):
        raise ParseError("patch must be an object with vertices and faces")
    edges = []
    for k, e in enumerate(edges_doc):
        if not isinstance(e, dict) or "points" not in e or "normals" not in e:
            raise ParseError(f"edge {k} needs points and normals")
        pts = _array(e["points"], f"edge {k} points", (3,))
        nrm = _array(e["normals"], f"edge {k} normals", (3,))
        edge = SampledEdge(pts, nrm)
        if len(edge) != config.TOL.samples:
            edge = resample(edge)
        edges.append(edge)
    verts = _array(patch.get("vertices", []), "patch vertices", (3,))
    faces = _array(patch.get("faces", []), "patch faces", (3,), dtype=np.int64)
    if len(faces) and (faces.min() < 0 or faces.max() >= len(verts)):
        raise ValidationError("face index out of range")
    tile = Prototile(tuple(edges), verts, faces, str(data.get("name", "tile")))
    tile.validate()
    return tile


def save_tile(t: Prototile, path) -> None:
    _write_text(path, dumps(tile_to_dict(t)))


def load_tile(path) -> Prototile:
    return tile_from_dict(_read_json(path))


# --- states ------------------------------------------------------------------

def state_to_dict(s: TilingState) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "state",
        "tile": tile_to_dict(s.prototile),
        "status": s.status,
        "reason": s.reason,
        "tiles": [{
            "id": pt.id,
            "rotation": pt.motion.rotation.tolist(),
            "translation": pt.motion.translation.tolist(),
            "depth": pt.depth,
            "neighbors": [list(x) for x in pt.neighbors],
        } for pt in s.tiles],
    }


def state_from_dict(data: dict) -> TilingState:
    if data.get("kind") != "state":
        raise ParseError("not a state document")
    tile = tile_from_dict(data.get("tile") or {})
    docs = data.get("tiles")
    if not isinstance(docs, list) or not docs:
        raise ParseError("state needs a nonempty tile list")
    tiles = []
    for k, d in enumerate(docs):
        try:
            m = RigidMotion(_array(d["rotation"], f"tile {k} rotation", (3,)), d["translation"])
            nbrs = [tuple(int(v) for v in x) for x in d.get("neighbors", [])]
            tiles.append(PlacedTile(int(d.get("id", k)), m, nbrs, int(d.get("depth", 0))))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"tile {k}: {exc}") from exc
    if [pt.id for pt in tiles] != list(range(len(tiles))):
        raise ValidationError("tile ids must be 0, 1, ... in order")
    for pt in tiles:
        if not np.allclose(pt.motion.rotation @ pt.motion.rotation.T, np.eye(3), atol=1e-9) \
                or np.linalg.det(pt.motion.rotation) < 0:
            raise ValidationError(f"tile {pt.id} motion is not a proper rotation")
        for e, nid, ne in pt.neighbors:
            if not (0 <= e < tile.n_edges and 0 <= ne < tile.n_edges and 0 <= nid < len(tiles)):
                raise ValidationError(f"tile {pt.id} neighbour entry out of range")
    state = TilingState(tile, tiles, status=str(data.get("status", "Open")),
                        reason=str(data.get("reason", "")))
    state.refresh_frontier()
    return state


def save_state(s: TilingState, path) -> None:
    _write_text(path, dumps(state_to_dict(s)))


def load_state(path) -> TilingState:
    return state_from_dict(_read_json(path))


# --- mesh export -------------------------------------------------------------

def export_mesh(state: TilingState, path, format: str = "obj") -> None:
    """Welded mesh as OBJ text, one ``g tile_<id>`` group per placed tile."""
    if format != "obj":
        raise ValidationError(f"unsupported mesh format {format!r}")
    if not state.tiles:
        raise ValidationError("state has no tiles")
    mesh = merged_mesh(state)
    lines = [f"# {state.prototile.name}: {state.m} tiles, status {state.status}"]
    lines += [f"v {x:.12g} {y:.12g} {z:.12g}" for x, y, z in mesh.vertices]
    for k in range(state.m):
        lines.append(f"g tile_{k}")
        lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in mesh.faces[mesh.face_tile == k]]
    _write_text(path, "\n".join(lines) + "\n")


@dataclass
class ObjMesh:
    vertices: np.ndarray
    faces: np.ndarray
    groups: dict[str, np.ndarray] = field(default_factory=dict)


def read_obj(path) -> ObjMesh:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc.strerror or exc}") from exc
    verts, faces, groups, current = [], [], {}, None
    for n, line in enumerate(text.splitlines(), 1):
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        try:
            if parts[0] == "v":
                verts.append([float(x) for x in parts[1:4]])
            elif parts[0] == "f":
                faces.append([int(x.split("/")[0]) - 1 for x in parts[1:4]])
                if current is not None:
                    groups[current].append(len(faces) - 1)
            elif parts[0] == "g":
                current = parts[1] if len(parts) > 1 else ""
                groups.setdefault(current, [])
        except ValueError as exc:
            raise ParseError(f"{path}:{n}: {exc}") from exc
    return ObjMesh(np.array(verts, dtype=float).reshape(-1, 3), np.array(faces, dtype=np.int64).reshape(-1, 3),
                   {k: np.array(v, dtype=np.int64) for k, v in groups.items()})


# --- reports -----------------------------------------------------------------

def inputs_digest(command: str, args: dict, files: list) -> str:
    """sha256 over the command, its arguments, the input files and the active tolerances."""
    h = hashlib.sha256()
    h.update(command.encode())
    h.update(dumps(args).encode())
    h.update(dumps(config.TOL.__dict__).encode())
    for f in files:
        try:
            h.update(Path(f).read_bytes())
        except OSError as exc:
            raise IoError(f"cannot read {f}: {exc.strerror or exc}") from exc
    return h.hexdigest()


@dataclass
class RunReport:
    command: str
    inputs_digest: str
    outcome: dict
    timing: float = 0.0

    def to_dict(self, timing: bool = True) -> dict:
        d = {"command": self.command, "inputs_digest": self.inputs_digest, "outcome": self.outcome}
        if timing:
            d["timing"] = round(self.timing, 6)
        return d


def jsonable(x):
    """Plain JSON values from numpy scalars, tuples and non-finite floats."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    return x


def ensure_dir(path) -> Path:
    p = Path(path)
    try:
        os.makedirs(p, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create {p}: {exc.strerror or exc}") from exc
    return p
