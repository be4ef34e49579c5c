import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from frictionlab import geometry as geo
from frictionlab.rotation import quat_from_axis_angle, quat_to_matrix
from conftest import random_unit

PLANE = geo.Plane()
EYE = np.eye(3)


# -- sphere / plane and sphere / sphere ----------------------------------------

def test_sphere_touching_plane():
    g = geo.sphere_plane_contact([0, 0, 0.2], 0.2, PLANE)
    assert g.depth == 0.0
    assert np.allclose(g.point_i, [0, 0, 0]) and np.allclose(g.point_j, [0, 0, 0])
    assert np.allclose(g.normal, [0, 0, 1])


def test_sphere_penetrating_plane():
    g = geo.sphere_plane_contact([0, 0, 0.2 - 1e-4], 0.2, PLANE)
    assert math.isclose(g.depth, 1e-4, rel_tol=1e-9)


def test_sphere_separated_from_plane():
    assert geo.sphere_plane_contact([0, 0, 0.3], 0.2, PLANE) is None


def test_sphere_sphere_touching():
    g = geo.sphere_sphere_contact([0.3, 0, 0], 0.15, [0, 0, 0], 0.15)
    assert abs(g.depth) < 1e-15


def test_sphere_sphere_overlap_along_centre_line():
    g = geo.sphere_sphere_contact([0.29, 0, 0], 0.15, [0, 0, 0], 0.15)
    assert math.isclose(g.depth, 0.01, rel_tol=1e-9)
    assert np.allclose(g.normal, [1, 0, 0])


def test_stacking_gap_has_no_contact():
    assert geo.sphere_sphere_contact([2.3 * 0.15, 0, 0], 0.15, [0, 0, 0], 0.15) is None


def test_collide_flips_when_plane_is_first():
    g = geo.collide(PLANE, None, None, geo.Sphere(0.2), np.array([0, 0, 0.19]), EYE)
    assert np.allclose(g.normal, [0, 0, -1])
    assert math.isclose(g.depth, 0.01, rel_tol=1e-9)


def test_plane_plane_is_rejected():
    with pytest.raises(geo.GeometryError):
        geo.collide(PLANE, None, None, PLANE, None, None)


# -- ellipsoid --------------------------------------------------------------

AXES = np.array([0.2, 0.2, 0.5])


def test_upright_ellipsoid_touches_at_pole():
    g = geo.ellipsoid_plane_contact([0, 0, 0.5], EYE, AXES, PLANE)
    assert abs(g.depth) < 1e-15
    assert np.allclose(g.point_i, [0, 0, 0], atol=1e-15)


def test_lying_ellipsoid_touches_on_equator():
    rot = quat_to_matrix(quat_from_axis_angle((1, 0, 0), 0.5 * math.pi))
    g = geo.ellipsoid_plane_contact([0, 0, 0.2], rot, AXES, PLANE)
    assert abs(g.depth) < 1e-12
    assert np.allclose(g.point_i, [0, 0, 0], atol=1e-12)


def _brute_force_lowest(center, rot, axes):
    # sample the surface, then refine around the best sample
    best = None
    u0, v0, span = 0.0, 0.5 * math.pi, math.pi
    for _ in range(6):
        us = np.linspace(u0 - span, u0 + span, 121)
        vs = np.linspace(max(v0 - span, 0.0), min(v0 + span, math.pi), 121)
        uu, vv = np.meshgrid(us, vs)
        local = np.stack([axes[0] * np.cos(uu) * np.sin(vv), axes[1] * np.sin(uu) * np.sin(vv),
                          axes[2] * np.cos(vv)], axis=-1)
        world = local @ rot.T + center
        k = np.unravel_index(np.argmin(world[..., 2]), world.shape[:2])
        best = world[k]
        u0, v0 = uu[k], vv[k]
        span /= 20.0
    return best


def test_generic_ellipsoid_support_matches_brute_force(rng):
    for _ in range(5):
        axis = random_unit(rng)
        rot = quat_to_matrix(quat_from_axis_angle(axis, rng.uniform(0, math.pi)))
        center = np.array([0.1, -0.2, 0.3])
        g = geo.ellipsoid_plane_contact(center, rot, AXES, PLANE, tolerance=1.0)
        lowest = _brute_force_lowest(center, rot, AXES)
        assert abs(g.point_i[2] - lowest[2]) < 1e-8
        assert np.linalg.norm(g.point_i - lowest) < 1e-4


@given(st.floats(0.0, math.pi), st.floats(0.0, 2 * math.pi), st.floats(0.0, math.pi))
def test_contact_points_lie_on_surfaces(polar, azimuth, angle):
    axis = (math.sin(polar) * math.cos(azimuth), math.sin(polar) * math.sin(azimuth),
            math.cos(polar))
    rot = quat_to_matrix(quat_from_axis_angle(axis, angle))
    center = np.array([0.0, 0.0, 0.3])
    shape = geo.Ellipsoid(tuple(AXES))
    g = geo.collide(shape, center, rot, PLANE, None, None, tolerance=1.0)
    assert geo.surface_distance(shape, g.point_i, center, rot) < 1e-9
    assert abs(g.point_j[2]) < 1e-9


# -- box and disk -----------------------------------------------------------

def test_box_resting_on_plane():
    g = geo.box_plane_contact([0, 0, 0.05], EYE, (0.1, 0.05, 0.05), PLANE)
    assert abs(g.depth) < 1e-15
    assert np.allclose(g.point_i, [0, 0, 0])


def test_disk_touches_at_rim_bottom():
    g = geo.disk_plane_contact([0, 0, 0.2], EYE, 0.2, PLANE)
    assert abs(g.depth) < 1e-15
    assert np.allclose(g.point_i, [0, 0, 0], atol=1e-15)


# -- curvature --------------------------------------------------------------

def test_sphere_curvature(rng):
    s = geo.Sphere(0.2)
    for _ in range(10):
        n = random_unit(rng)
        t = np.cross(n, random_unit(rng))
        t /= np.linalg.norm(t)
        assert math.isclose(geo.normal_curvature(s, 0.2 * n, t), 5.0)


def test_plane_curvature():
    assert geo.normal_curvature(PLANE, [1.0, 2.0, 0.0], [1.0, 0.0, 0.0]) == 0.0
    assert geo.spin_curvature(PLANE, [0.0, 0.0, 0.0]) == 0.0


def test_ellipsoid_pole_curvature():
    e = geo.Ellipsoid((0.02, 0.02, 0.05))
    for ang in np.linspace(0, math.pi, 7):
        t = [math.cos(ang), math.sin(ang), 0.0]
        assert math.isclose(geo.normal_curvature(e, [0, 0, -0.05], t), 125.0, rel_tol=1e-12)


def test_equal_volume_sphere_mean_curvature():
    r = (0.02 * 0.02 * 0.05) ** (1.0 / 3.0)
    assert math.isclose(geo.spin_curvature(geo.Sphere(r), [0, 0, -r]), 36.84, rel_tol=5e-3)


def test_flat_ellipsoid_mean_curvature():
    e = geo.Ellipsoid((0.02, 0.02, 0.05))
    k = geo.spin_curvature(e, [0, -0.02, 0])
    assert math.isclose(k, 0.5 * (1 / 0.02 + 0.02 / 0.05 ** 2), rel_tol=1e-12)
    assert math.isclose(k, 29.0, rel_tol=1e-12)


def test_upright_ellipsoid_mean_curvature():
    e = geo.Ellipsoid((0.02, 0.02, 0.05))
    assert math.isclose(geo.spin_curvature(e, [0, 0, -0.05]), 125.0, rel_tol=1e-12)


def test_sphere_mean_curvature_is_average_of_orthogonal_directions():
    s = geo.Sphere(0.3)
    p = np.array([0.0, 0.0, -0.3])
    k1 = geo.normal_curvature(s, p, [1, 0, 0])
    k2 = geo.normal_curvature(s, p, [0, 1, 0])
    assert geo.spin_curvature(s, p) == 0.5 * (k1 + k2)


def test_point_off_surface_is_rejected():
    with pytest.raises(geo.GeometryError):
        geo.normal_curvature(geo.Sphere(0.2), [0, 0, 0.25], [1, 0, 0])


@given(st.floats(0.0, math.pi), st.floats(0.0, 2 * math.pi), st.floats(-math.pi, math.pi),
       st.floats(0.0, 2 * math.pi), st.floats(0.05, math.pi - 0.05), st.floats(0, 2 * math.pi))
def test_curvature_invariant_under_rigid_motion(polar, azimuth, angle, u, v, tangent_angle):
    e = geo.Ellipsoid((0.2, 0.3, 0.5))
    a = np.array(e.semi_axes)
    p = np.array([a[0] * math.cos(u) * math.sin(v), a[1] * math.sin(u) * math.sin(v),
                  a[2] * math.cos(v)])
    n = p / a ** 2
    n /= np.linalg.norm(n)
    e1 = np.cross(n, [0.0, 0.0, 1.0]) if abs(n[2]) < 0.9 else np.cross(n, [1.0, 0.0, 0.0])
    e1 /= np.linalg.norm(e1)
    t = math.cos(tangent_angle) * e1 + math.sin(tangent_angle) * np.cross(n, e1)
    k_body = geo.normal_curvature(e, p, t)

    axis = (math.sin(polar) * math.cos(azimuth), math.sin(polar) * math.sin(azimuth),
            math.cos(polar))
    rot = quat_to_matrix(quat_from_axis_angle(axis, angle))
    pos = np.array([1.0, -2.0, 0.5])
    k_world = geo.normal_curvature(e, pos + rot @ p, rot @ t, pos, rot)
    assert abs(k_body - k_world) < 1e-10 * max(1.0, abs(k_body))


# -- chord length -----------------------------------------------------------

def test_chord_examples():
    assert geo.chord_arc_length([0, 0, 0], [0, 0, 0]) == 0.0
    assert math.isclose(geo.chord_arc_length([0, 0, 0], [3e-5, 4e-5, 0]), 5e-5, rel_tol=1e-12)


def test_chord_of_rolling_step_matches_geodesic():
    r, dtheta = 0.2, 1e-4
    a = [0.0, 0.0, -r]
    b = [r * math.sin(dtheta), 0.0, -r * math.cos(dtheta)]
    chord = geo.chord_arc_length(a, b)
    assert math.isclose(chord, 2e-5, rel_tol=1e-8)
    assert abs(chord - r * dtheta) <= r * dtheta ** 3


pts = st.tuples(*[st.floats(-1, 1)] * 3)


@given(pts, pts, pts)
def test_chord_symmetric_and_triangle(a, b, c):
    ab = geo.chord_arc_length(a, b)
    assert ab == geo.chord_arc_length(b, a)
    assert ab <= geo.chord_arc_length(a, c) + geo.chord_arc_length(c, b) + 1e-12
