import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tilekit.geom3 import (Line3, RigidMotion, axis_relation, closest_points, compose, compose_all,
                           invert, lines_classification, motion_distance, random_motion,
                           rotation_about_line, rotation_axis, rotation_matrix)

seeds = st.integers(0, 2**32 - 1)


def motion_from(seed: int, scale: float = 2.0) -> RigidMotion:
    return random_motion(np.random.default_rng(seed), scale)


def close(m1, m2, tol=1e-9):
    return np.allclose(m1.rotation, m2.rotation, atol=tol) and np.allclose(m1.translation, m2.translation, atol=tol)


def test_identity_compose():
    i = RigidMotion.identity()
    assert close(compose(i, i), i, 0)


def test_half_turn_squares_to_identity():
    ax = Line3([1.0, 2.0, 3.0], [0.3, -0.2, 0.9])
    phi = rotation_about_line(ax, math.pi)
    assert close(compose(phi, phi), RigidMotion.identity())


@given(seeds, seeds)
def test_compose_matches_homogeneous_product(a, b):
    m1, m2 = motion_from(a), motion_from(b)
    assert np.abs(compose(m1, m2).matrix() - m1.matrix() @ m2.matrix()).max() < 1e-12


def test_compose_applies_second_first(rng):
    m1, m2 = random_motion(rng), random_motion(rng)
    x = rng.normal(size=(5, 3))
    assert np.allclose(compose(m1, m2).apply(x), m1.apply(m2.apply(x)))


def test_invert_identity():
    assert close(invert(RigidMotion.identity()), RigidMotion.identity(), 0)


def test_invert_rotation_is_negative_angle():
    ax = Line3([0.5, 0.0, -1.0], [1.0, 1.0, 0.0])
    assert close(invert(rotation_about_line(ax, 0.7)), rotation_about_line(ax, -0.7))


@given(seeds)
def test_inverse_composition_residual(seed):
    m = motion_from(seed)
    ident = RigidMotion.identity()
    assert np.abs(compose(m, invert(m)).matrix() - ident.matrix()).max() < 1e-12
    assert np.abs(compose(invert(m), m).matrix() - ident.matrix()).max() < 1e-12


def test_rotation_zero_angle_is_identity():
    assert close(rotation_about_line(Line3([1, 2, 3], [0, 1, 0]), 0.0), RigidMotion.identity())


def test_quarter_turn_about_z():
    m = rotation_about_line(Line3([0, 0, 0], [0, 0, 1]), math.pi / 2)
    assert np.allclose(m.apply([1.0, 0.0, 0.0]), [0.0, 1.0, 0.0])


def test_half_turn_about_midpoint_axis_swaps_endpoints():
    b, c = np.array([1.0, -0.5, 0.2]), np.array([-0.3, 0.8, 1.1])
    d = c - b
    perp = np.cross(d, [0.0, 0.0, 1.0])
    m = rotation_about_line(Line3((b + c) / 2, perp), math.pi)
    assert np.allclose(m.apply(b), c)
    assert np.allclose(m.apply(c), b)


@given(seeds, st.floats(-6, 6))
def test_rotation_fixes_axis_and_recovers_it(seed, angle):
    rng = np.random.default_rng(seed)
    ax = Line3(rng.normal(size=3), rng.normal(size=3))
    m = rotation_about_line(ax, angle)
    pts = ax.point + np.outer(rng.normal(size=4), ax.direction)
    assert np.allclose(m.apply(pts), pts, atol=1e-9)
    if 1e-3 < abs(math.remainder(angle, 2 * math.pi)):
        rec = rotation_axis(m)
        assert np.linalg.norm(np.cross(rec.direction, ax.direction)) < 1e-6
        assert ax.distance_to(rec.point) < 1e-6


@given(seeds, st.floats(0.1, 3.0))
def test_bisector_property(seed, angle):
    rng = np.random.default_rng(seed)
    ax = Line3(rng.normal(size=3), rng.normal(size=3))
    b = rng.normal(size=3)
    c = rotation_about_line(ax, angle).apply(b)
    for s in rng.normal(size=5):
        x = ax.point + s * ax.direction
        assert abs(np.linalg.norm(x - b) - np.linalg.norm(x - c)) < 1e-9


def test_axis_relation_examples():
    z = Line3([0, 0, 0], [0, 0, 1])
    assert axis_relation(z, Line3([0, 0, 5], [0, 0, -1])).tag == "Equal"
    assert axis_relation(z, Line3([1, 0, 0], [0, 0, 1])).tag == "Parallel"
    r = axis_relation(z, Line3([0, 0, 0], [1, 0, 0]))
    assert r.tag == "Intersecting" and np.allclose(r.point, 0)
    assert axis_relation(z, Line3([0, 1, 0], [1, 0, 0])).tag == "Skew"


def _oracle_relation(l1, l2, eps=1e-6):
    # triple-product distance between non-parallel lines
    n = np.cross(l1.direction, l2.direction)
    if np.linalg.norm(n) < 1e-6:
        return "Equal" if l2.distance_to(l1.point) < eps else "Parallel"
    d = abs(np.dot(l2.point - l1.point, n)) / np.linalg.norm(n)
    return "Intersecting" if d < eps else "Skew"


def test_axis_relation_agrees_with_oracle(rng):
    for _ in range(1000):
        l1 = Line3(rng.normal(size=3), rng.normal(size=3))
        kind = rng.integers(4)
        if kind == 0:
            l2 = Line3(l1.point + 2 * l1.direction, -l1.direction)
        elif kind == 1:
            l2 = Line3(l1.point + np.cross(l1.direction, rng.normal(size=3)), l1.direction)
        elif kind == 2:
            l2 = Line3(l1.point + rng.normal() * l1.direction, rng.normal(size=3))
        else:
            l2 = Line3(rng.normal(size=3) * 3, rng.normal(size=3))
        got = axis_relation(l1, l2)
        assert got.tag == axis_relation(l2, l1).tag
        assert got.tag == _oracle_relation(l1, l2)
        if got.tag == "Intersecting":
            assert l1.distance_to(got.point) < 1e-6 and l2.distance_to(got.point) < 1e-6
        p1, p2 = closest_points(l1, l2)
        if got.tag in ("Intersecting", "Skew"):
            assert np.dot(p2 - p1, l1.direction) == pytest.approx(0, abs=1e-9)
            assert np.dot(p2 - p1, l2.direction) == pytest.approx(0, abs=1e-9)


def test_lines_classification():
    up = [0.0, 0.0, 1.0]
    par = [Line3([x, y, 0.0], up) for x, y in [(0, 0), (1, 0), (0, 3)]]
    assert lines_classification(par, 1e-6, 1e-6)[0] == "AllParallel"
    c = np.array([0.3, -1.0, 2.0])
    conc = [Line3(c + d, d) for d in np.eye(3)]
    tag, pt = lines_classification(conc, 1e-6, 1e-6)
    assert tag == "Concurrent" and np.allclose(pt, c)
    bad = conc[:2] + [Line3(c + [0, 1, 0], [0, 0, 1])]
    assert lines_classification(bad, 1e-6, 1e-6)[0] == "Inconsistent"


def test_motion_distance_basic(rng):
    m = random_motion(rng)
    assert motion_distance(m, m) == 0.0
    d = np.array([0.3, -0.4, 1.2])
    i = RigidMotion.identity()
    assert motion_distance(i, RigidMotion.from_translation(d), 2.0) == pytest.approx(np.linalg.norm(d) / 2)
    assert motion_distance(i, RigidMotion.from_translation(2 * d)) == pytest.approx(2 * np.linalg.norm(d))


@settings(max_examples=200)
@given(seeds, seeds, seeds)
def test_motion_distance_triangle_inequality(a, b, c):
    x, y, z = motion_from(a), motion_from(b), motion_from(c)
    assert motion_distance(x, z) <= motion_distance(x, y) + motion_distance(y, z) + 1e-9


def test_motion_distance_small_angles():
    m = RigidMotion(rotation_matrix([0, 0, 1], 1e-7), np.zeros(3))
    assert motion_distance(RigidMotion.identity(), m) == pytest.approx(1e-7, rel=1e-6)


def test_long_chain_stays_orthonormal():
    r = RigidMotion(rotation_matrix([1, 2, 3], 0.1234567), [0.1, 0.0, 0.0])
    m = compose_all([r] * 5000)
    assert m.is_valid(1e-9)


def test_orthonormality_invariant(rng):
    for _ in range(50):
        m = random_motion(rng)
        assert np.allclose(m.rotation.T @ m.rotation, np.eye(3), atol=1e-9)
        assert np.linalg.det(m.rotation) == pytest.approx(1.0, abs=1e-9)
