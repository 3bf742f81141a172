import math

import numpy as np
import pytest

from tilekit.engine import (c1_seam_check, gauss_bonnet_residual, interior_vertex_residuals,
                            merged_mesh, propagate)
from tilekit.errors import FoldOver, InvalidProfile, ValidationError
from tilekit.generators import (FaceSpec, LiftSpec, RevolutionSpec, make_face_tiling,
                                make_flat_cube, make_isosceles_grid, make_lift_tile,
                                make_lifted_tiling, make_one_edge_tile, make_revolution_tile,
                                verify_type1_structure)
from tilekit.geom3 import RigidMotion, compose
from tilekit.prototile import classify_edge_type, tile_type


@pytest.mark.parametrize("base,m", [("Tetrahedron", 12), ("Cube", 24), ("Octahedron", 24),
                                    ("Dodecahedron", 60), ("Icosahedron", 60)])
def test_platonic_lifts_close(base, m):
    lt = make_lifted_tiling(LiftSpec(base))
    assert lt.reference.status == "Closed" and lt.reference.m == m
    assert verify_type1_structure(lt.reference, lt.center)["ok"]


def test_excavated_lift():
    lt = make_lifted_tiling(LiftSpec("Tetrahedron", apex_height=-0.15))
    assert lt.reference.status == "Closed" and lt.reference.m == 12


@pytest.mark.parametrize("n", [3, 6, 12])
def test_bipyramid_lift(n):
    lt = make_lifted_tiling(LiftSpec("Bipyramid", n=n))
    assert lt.reference.status == "Closed" and lt.reference.m == 2 * n
    assert verify_type1_structure(lt.reference, lt.center)["ok"]


@pytest.mark.parametrize("base", ["SquareGrid", "TriangleGrid", "HexGrid"])
def test_plane_lifts(base):
    lt = make_lifted_tiling(LiftSpec(base))
    assert lt.reference.status == "Open"
    rep = verify_type1_structure(lt.reference)
    assert rep["kind"] == "plane" and rep["ok"]


def test_lift_word_and_type(icosa_lift):
    et = classify_edge_type(icosa_lift.tile)
    assert str(et) == "a ā β" and tile_type(et)[0] == 1


def test_icosa_apexes_cospherical(icosa_lift):
    rep = verify_type1_structure(icosa_lift.reference, icosa_lift.center)
    assert rep["kind"] == "sphere" and rep["apex_count"] == 20
    assert rep["center_offset"] < 1e-6


def test_moved_tile_is_flagged(icosa_lift):
    s = icosa_lift.reference.snapshot()
    s.tiles[5].motion = compose(RigidMotion.from_translation([0.01, 0, 0]), s.tiles[5].motion)
    assert not verify_type1_structure(s, icosa_lift.center)["ok"]


def test_invalid_lift_parameters():
    with pytest.raises(ValidationError):
        make_lift_tile(LiftSpec("Cube", apex_height=0.0))
    with pytest.raises(ValidationError):
        make_lift_tile(LiftSpec("Prism"))
    with pytest.raises(ValidationError):
        make_lift_tile(LiftSpec("Cube", patch_resolution=8))
    with pytest.raises(ValidationError):
        make_lift_tile(LiftSpec("Bipyramid"))


def test_deep_excavation_folds():
    with pytest.raises(FoldOver):
        make_lift_tile(LiftSpec("Cube", apex_height=-1.0))


def test_quintic_profile_closes():
    lt = make_lifted_tiling(LiftSpec("Cube", bump_profile="quintic"))
    assert lt.reference.m == 24 and c1_seam_check(lt.reference) < 5e-3


# --- whole faces ---------------------------------------------------------------

def test_face_tilings(icosa_faces, disphenoid_faces):
    assert icosa_faces.reference.m == 20 and icosa_faces.reference.status == "Closed"
    assert disphenoid_faces.reference.m == 4 and disphenoid_faces.reference.status == "Closed"
    assert str(classify_edge_type(disphenoid_faces.tile)) == "α β γ"


def test_octahedron_faces():
    lt = make_face_tiling(FaceSpec("Octahedron"))
    assert lt.reference.m == 8 and str(classify_edge_type(lt.tile)) == "α α α"


# --- surfaces of revolution -------------------------------------------------------

def test_revolution_word(rev6):
    assert str(classify_edge_type(rev6)) == "a ā"
    assert len(rev6.corners) == 2


@pytest.mark.parametrize("bad", [
    dict(m=2),
    dict(profile="torus"),
    dict(profile=np.array([[0.5, 1.0], [1.0, 0.0], [0.5, -1.0], [0.0, -1.2]])),
    dict(profile=np.array([[0.0, 1.0], [1.0, 0.0]])),
])
def test_invalid_profiles(bad):
    with pytest.raises(InvalidProfile):
        make_revolution_tile(RevolutionSpec(**bad))


def test_sampled_profile_closes():
    t = np.linspace(0, math.pi, 81)
    pts = np.column_stack([np.sin(t), np.cos(t) + 0.2 * np.sin(t) ** 2])
    s = propagate(make_revolution_tile(RevolutionSpec(m=5, profile=pts)))
    assert s.status == "Closed" and s.m == 5


# --- one edge, isosceles, polyhedral control -------------------------------------------

def test_one_edge_tiling():
    t = make_one_edge_tile()
    assert t.n_edges == 1 and len(t.corners) == 0
    s = propagate(t)
    assert s.status == "Closed" and s.m == 2
    assert merged_mesh(s).euler_characteristic() == 2
    assert gauss_bonnet_residual(s)["residual"] < 0.01 * 2 * math.pi
    assert interior_vertex_residuals(s) == []


def test_isosceles_grid():
    s = make_isosceles_grid(k=2)
    assert s.m == 16 and s.status == "Open"
    assert c1_seam_check(s) < 5e-3
    res = interior_vertex_residuals(s)
    assert res and max(r["residual"] for r in res) < 1e-6


def test_flat_cube_assembly():
    s = make_flat_cube()
    assert s.status == "Closed" and s.m == 6 and len(s.links()) == 12
    mesh = merged_mesh(s)
    assert mesh.euler_characteristic() == 2 and mesh.is_closed_manifold()
    # each cube corner holds a defect of π/2 spread over three faces
    assert gauss_bonnet_residual(s)["per_tile_integral"] == pytest.approx(2 * math.pi / 3, abs=1e-9)
