"""Numerical tolerances and their overrides.

All tolerances live in one :class:`Tolerances` record.  The active record is
``config.TOL``; it is read at call time so tests and the CLI can swap it.
A JSON file named by ``TILEKIT_CONFIG`` may override any field.
"""

from __future__ import annotations

import dataclasses
import json
import os
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

from .errors import ParseError, ValidationError

ENV_VAR = "TILEKIT_CONFIG"


@dataclass(frozen=True)
class Tolerances:
    eps_num: float = 1e-9        # pure algebra
    eps_pos_rel: float = 1e-6    # geometric coincidence, times model diameter
    eps_ang: float = 1e-6        # radians
    eps_cong_rel: float = 1e-5   # congruence RMS, times arc length
    normal_offset_rel: float = 0.1   # h in the augmented registration set
    samples: int = 65            # points per canonical edge (64 intervals)
    reorthonormalize_every: int = 64
    overlap_shrink: float = 0.999
    eps_motion: float = 1e-4     # placement dedup, motion_distance units
    seam_max: float = 5e-3       # C1 seam acceptance, radians

    def eps_pos(self, diameter: float = 1.0) -> float:
        return self.eps_pos_rel * diameter

    def eps_cong(self, arc_length: float) -> float:
        return self.eps_cong_rel * arc_length


TOL = Tolerances()


def load_config(path: str | os.PathLike | None = None) -> Tolerances:
    """Read overrides from ``path`` (or ``$TILEKIT_CONFIG``) and install them."""
    global TOL
    if path is None:
        path = os.environ.get(ENV_VAR)
    if not path:
        return TOL
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"config {path}: {exc}") from exc
    known = {f.name for f in dataclasses.fields(Tolerances)}
    unknown = set(data) - known
    if unknown:
        raise ValidationError(f"unknown config keys: {sorted(unknown)}")
    TOL = dataclasses.replace(Tolerances(), **data)
    return TOL


@contextmanager
def override(**changes):
    """Temporarily replace fields of the active tolerances."""
    global TOL
    saved = TOL
    TOL = dataclasses.replace(TOL, **changes)
    try:
        yield TOL
    finally:
        TOL = saved
