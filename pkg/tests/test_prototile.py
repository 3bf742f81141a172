import math

import numpy as np
import pytest
from _util import flat_polygon, regular_polygon, segment
from hypothesis import given, settings
from hypothesis import strategies as st

from tilekit.edges import SampledEdge, reverse
from tilekit.errors import AmbiguousType, ValidationError, WrongTileType
from tilekit.geom3 import RigidMotion, random_motion, rotation_matrix
from tilekit.prototile import (EdgeType, Prototile, bar, classify_edge_type, corner_angles,
                               corner_normal_lines, edge_symmetry_axes, normal_classification,
                               partner, tile_type)


def wiggle(p, q, amp, n=65):
    """Planar edge in z = 0 with an asymmetric sideways wiggle and upward normals."""
    p, q = np.asarray(p, float), np.asarray(q, float)
    t = np.linspace(0, 1, n)[:, None]
    side = np.cross([0, 0, 1.0], q - p)
    pts = p + t * (q - p) + amp * (np.sin(math.pi * t) * t) * side
    return SampledEdge(pts, np.tile([0, 0, 1.0], (n, 1)))


def translation_square():
    """Unit square whose opposite sides are translates: edge type a b ā b̄."""
    c = np.array([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]], dtype=float)
    e0 = wiggle(c[0], c[1], 0.2)
    e1 = wiggle(c[1], c[2], -0.15)
    e2 = reverse(e0.transformed(RigidMotion.from_translation(c[3] - c[0])))
    e3 = reverse(e1.transformed(RigidMotion.from_translation(c[0] - c[1])))
    edges = (e0, e1, e2, e3)
    ring = np.vstack([e.points[:-1:8] for e in edges])
    verts = np.vstack([[0.5, 0.5, 0.0], ring])
    m = len(ring)
    faces = [(0, 1 + j, 1 + (j + 1) % m) for j in range(m)]
    return Prototile(edges, verts, np.array(faces), "translation-square")


# --- labels -------------------------------------------------------------------

def test_bar_and_partner():
    assert partner("a") == bar("a") and partner(bar("a")) == "a"
    assert partner("α") == "α"


def test_edge_type_parse_forms():
    assert EdgeType.parse("aāβ").cyclically_equal(EdgeType.parse("a ā β"))
    assert EdgeType.parse("a a~ β").cyclically_equal(EdgeType.parse("β a ā"))
    assert EdgeType.parse("a ā β").cyclically_equal(EdgeType.parse("ā a β"))
    assert EdgeType.parse("a ā β").cyclically_equal(EdgeType.parse("α b b̄"))
    assert not EdgeType.parse("a ā β").cyclically_equal(EdgeType.parse("a a ā"))
    assert not EdgeType.parse("α α β").cyclically_equal(EdgeType.parse("α β γ"))


# --- corner angles ------------------------------------------------------------

def test_flat_equilateral_angles():
    assert corner_angles(flat_polygon(regular_polygon(3))) == pytest.approx([math.pi / 3] * 3, abs=1e-6)


def test_flat_square_corner():
    sq = flat_polygon([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]])
    assert corner_angles(sq) == pytest.approx([math.pi / 2] * 4, abs=1e-6)


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 10), st.integers(0, 2**32 - 1))
def test_flat_polygon_angle_sum(k, seed):
    rng = np.random.default_rng(seed)
    # convex polygon from sorted random angles
    ang = np.sort(rng.uniform(0, 2 * math.pi, k))
    ang[1:] = np.maximum(ang[1:], ang[:-1] + 0.2)
    if ang[-1] > 2 * math.pi - 0.2 + ang[0]:
        ang = 2 * math.pi * np.arange(k) / k
    c = np.column_stack([np.cos(ang), np.sin(ang), np.zeros(k)])
    t = flat_polygon(c).transformed(random_motion(rng))
    assert sum(corner_angles(t)) == pytest.approx((k - 2) * math.pi, abs=1e-6)


def test_cube_lift_apex_angle(cube_lift):
    t = cube_lift.tile
    _, a = tile_type(classify_edge_type(t))
    assert corner_angles(t)[a] == pytest.approx(math.pi / 2, abs=2e-3)


# --- normal lines ---------------------------------------------------------------

def test_planar_normal_lines_parallel():
    for ln in corner_normal_lines(flat_polygon(regular_polygon(5))):
        assert np.allclose(np.abs(ln.direction), [0, 0, 1])


def test_spherical_tile_lines_through_centre(icosa_faces):
    for ln in corner_normal_lines(icosa_faces.tile):
        assert ln.distance_to([0, 0, 0]) < 1e-6


# --- edge types -----------------------------------------------------------------

def test_translation_square_word():
    et = classify_edge_type(translation_square())
    assert et.cyclically_equal(EdgeType.parse("a b ā b̄"))
    assert str(et) == "a b ā b̄"


def test_equilateral_spherical_word(icosa_faces):
    assert str(classify_edge_type(icosa_faces.tile)) == "α α α"


def test_isosceles_word():
    from tilekit.generators import make_isosceles_grid_tile

    assert classify_edge_type(make_isosceles_grid_tile()).cyclically_equal(EdgeType.parse("α α β"))


def test_lift_word(cube_lift):
    assert str(classify_edge_type(cube_lift.tile)) == "a ā β"


def test_flat_polygon_is_ambiguous():
    with pytest.raises(AmbiguousType):
        classify_edge_type(flat_polygon(regular_polygon(3)))


@pytest.mark.parametrize("k", [1, 2])
def test_cyclic_shift_gives_equal_word(cube_lift, k):
    t = cube_lift.tile
    assert classify_edge_type(t.rotated_start(k)).cyclically_equal(classify_edge_type(t))


def test_cyclic_shift_four_edges():
    t = translation_square()
    words = [classify_edge_type(t.rotated_start(k)) for k in range(4)]
    assert all(w.cyclically_equal(words[0]) for w in words)


def test_tile_types(cube_lift, icosa_faces, disphenoid_faces):
    assert tile_type(classify_edge_type(cube_lift.tile))[0] == 1
    assert tile_type(classify_edge_type(icosa_faces.tile))[0] == 3
    assert tile_type(classify_edge_type(disphenoid_faces.tile))[0] == 4
    assert tile_type(EdgeType.parse("α α β"))[0] == 2
    with pytest.raises(WrongTileType):
        tile_type(EdgeType.parse("a a ā"))
    with pytest.raises(WrongTileType):
        tile_type(EdgeType.parse("a b ā b̄"))


# --- symmetry axes ---------------------------------------------------------------

def test_spherical_axes_through_centre(icosa_faces):
    axes = edge_symmetry_axes(icosa_faces.tile)
    assert len(axes) == 3
    for ax in axes.values():
        assert ax.distance_to([0, 0, 0]) < 1e-6


def test_flat_edge_axis_is_vertical():
    from tilekit.edges import involution_axis

    ax = involution_axis(segment([0, 0, 0], [2, 0, 0]))
    assert np.allclose(ax.point, [1, 0, 0])
    assert np.allclose(np.abs(ax.direction), [0, 0, 1])


def test_axes_lie_in_bisector_planes(cube_lift, icosa_faces):
    for t in (cube_lift.tile, icosa_faces.tile):
        for i, ax in edge_symmetry_axes(t).items():
            e = t.edges[i]
            for s in (-1.0, 0.7, 2.0):
                x = ax.point + s * ax.direction
                assert abs(np.linalg.norm(x - e.start) - np.linalg.norm(x - e.end)) < 1e-6


# --- normal classification ----------------------------------------------------------

def test_plane_lift_all_parallel(square_lift):
    assert normal_classification(square_lift.tile).tag == "AllParallel"


def test_platonic_lift_concurrent_at_centre(cube_lift, icosa_lift):
    for lt in (cube_lift, icosa_lift):
        nc = normal_classification(lt.tile)
        assert nc.tag == "Concurrent"
        assert np.linalg.norm(nc.point) < 1e-6


def test_perturbed_corner_normal_inconsistent(cube_lift):
    t = cube_lift.tile
    r = rotation_matrix(np.cross(t.corner_normal(0), [0.3, 0.1, 0.9]), 0.1)
    e0, e2 = t.edges[0], t.edges[2]
    n0 = e0.normals.copy()
    n0[0] = r @ n0[0]
    n2 = e2.normals.copy()
    n2[-1] = r @ n2[-1]
    bent = t.with_edges([SampledEdge(e0.points, n0), t.edges[1], SampledEdge(e2.points, n2)])
    assert normal_classification(bent, classify_edge_type(t)).tag == "Inconsistent"


def test_classification_invariant_under_motion(cube_lift, rng):
    m = random_motion(rng, 2.0)
    nc = normal_classification(cube_lift.tile.transformed(m))
    assert nc.tag == "Concurrent"
    assert np.allclose(nc.point, m.apply(np.zeros(3)), atol=1e-6)


def test_type4_is_wrong_type(disphenoid_faces):
    with pytest.raises(WrongTileType):
        normal_classification(disphenoid_faces.tile)


# --- validation ----------------------------------------------------------------------

def test_open_boundary_rejected():
    e = [segment([0, 0, 0], [1, 0, 0]), segment([1, 0, 0], [0, 1, 0]), segment([0, 1, 0], [0, 0.1, 0])]
    verts = np.vstack([x.points for x in e])
    with pytest.raises(ValidationError):
        Prototile(tuple(e), verts, np.zeros((0, 3), dtype=int)).validate()


def test_patch_off_boundary_rejected():
    t = flat_polygon(regular_polygon(4))
    v = t.vertices.copy()
    v[1] += [0, 0, 0.01]
    with pytest.raises(ValidationError):
        Prototile(t.edges, v, t.faces).validate()
