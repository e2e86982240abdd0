import math

import numpy as np
import pytest

from conelike.assembly import (RX, RY, T_ANGLE, FilmMesh, assemble_film, build_film,
                               cone_apex_heights, dihedral_along_edge, flat_cone,
                               mesh_dihedral, project_to_F, tpoint_angle_inequalities)
from conelike.errors import ClosureFailure, NoSharedEdge, NotOnF
from conelike.tetra import Region, TetraParams, make_params, quadratic_forms, tetra_vertices

ALL = ["theta_plus", "theta_minus", "c4", "c2_plus", "c2_minus"]


@pytest.mark.parametrize("fixture", ALL)
def test_closure(fixture, request):
    film = request.getfixturevalue(fixture).film
    assert film.closure_residual < 1e-4
    assert film.glue_gap < 1e-6


@pytest.mark.parametrize("fixture", ALL)
def test_reflection_symmetry(fixture, request):
    film = request.getfixturevalue(fixture).film
    n0 = len(film.patch.vertices)
    V = film.vertices
    base = V[:n0]
    assert np.array_equal(V[n0:2 * n0], base * RX)
    assert np.array_equal(V[2 * n0:3 * n0], base * RY)
    assert np.array_equal(V[3 * n0:4 * n0], base * RX * RY)
    assert set(film.group_names) == {"sheet", "sheet_rx", "sheet_ry", "sheet_rxry",
                                     "disk_top", "disk_bottom"}


@pytest.mark.parametrize("fixture", ALL)
def test_singular_curves_in_planes(fixture, request):
    film = request.getfixturevalue(fixture).film
    c = film.singular_curves
    assert np.all(c["Y1"][:, 0] == 0) and np.all(c["Y2"][:, 0] == 0)
    assert np.all(c["Y3"][:, 1] == 0) and np.all(c["Y4"][:, 1] == 0)
    assert np.allclose(c["Y2"][:, 1], -c["Y1"][:, 1])
    for k in ("Y1", "Y2", "Y3", "Y4"):
        assert np.array_equal(c[k][0], film.tpoint)
    assert np.all(film.tpoint[:2] == 0)


def test_theta_curve_ends_on_tetra_vertex(theta_plus):
    film = theta_plus.film
    V = film.tetra.vertices
    assert np.linalg.norm(film.singular_curves["Y1"][-1] - V[0]) < 1e-4
    assert np.linalg.norm(film.singular_curves["Y3"][-1] - V[2]) < 1e-4


def test_c4_curve_ends_inside_top_edge(c4):
    film = c4.film
    end = film.singular_curves["Y1"][-1]
    h = film.params.A / 2
    assert end[0] == 0 and abs(end[2] - h) < 1e-4
    assert abs(end[1]) < film.params.s - 1e-3
    assert "top" in film.edge_segments and "bottom" in film.edge_segments


def test_disks_lie_in_symmetry_planes(theta_plus):
    film = theta_plus.film
    top = np.unique(film.group("disk_top"))
    bottom = np.unique(film.group("disk_bottom"))
    assert np.all(film.vertices[top, 0] == 0)
    assert np.all(film.vertices[bottom, 1] == 0)


@pytest.mark.parametrize("fixture,segment", [("c4", "top"), ("c4", "bottom"),
                                             ("c2_plus", "bottom"), ("c2_minus", "top")])
def test_dihedral_at_least_120(fixture, segment, request):
    film = request.getfixturevalue(fixture).film
    assert math.degrees(dihedral_along_edge(film, segment).min()) >= 119.9


def test_no_shared_edge_in_theta(theta_plus):
    with pytest.raises(NoSharedEdge):
        dihedral_along_edge(theta_plus.film, "top")


def test_mesh_dihedral_of_coplanar_half_disks():
    # two half-disks in the plane z = 0 on either side of the x axis
    ang = np.linspace(0, math.pi, 9)
    edge = np.array([[x, 0.0, 0.0] for x in np.linspace(-1, 1, 5)])
    upper = np.c_[np.cos(ang), np.sin(ang), np.zeros(9)]
    V = np.vstack([edge, upper, upper * [1, -1, 1]])
    T = [(0, 1, 9), (1, 2, 9), (2, 3, 9), (3, 4, 9),
         (0, 1, 18), (1, 2, 18), (2, 3, 18), (3, 4, 18)]
    tet = tetra_vertices(make_params(0.3, 0.3))
    film = FilmMesh(make_params(0.3, 0.3), Region.C4, V, np.array(T),
                    np.array([0, 0, 0, 0, 1, 1, 1, 1]), ("a", "b"), {}, {"top": edge},
                    np.zeros(3), tet)
    assert np.allclose(np.degrees(mesh_dihedral(film, "top")), 180.0, atol=1e-10)
    assert np.allclose(np.degrees(dihedral_along_edge(film, "top")), 180.0, atol=1e-10)


def test_closure_failure_with_tiny_tolerance(theta_plus):
    with pytest.raises(ClosureFailure) as info:
        assemble_film(theta_plus.params, theta_plus.patch, tol=1e-300)
    assert info.value.args


@pytest.mark.parametrize("fixture,sign", [("theta_plus", 1), ("theta_minus", -1)])
def test_tpoint_angle_inequalities(fixture, sign, request):
    ang = tpoint_angle_inequalities(request.getfixturevalue(fixture).film)
    assert sign * (T_ANGLE - ang["top"]) > 0
    assert sign * (T_ANGLE - ang["bottom"]) > 0


# -- the flat cone on F ----------------------------------------------------------------

def test_regular_cone_apex_at_centre():
    cone = flat_cone(make_params(0.5, 0.5))
    assert cone.a == pytest.approx(0.0, abs=1e-15)
    assert np.allclose(cone.angles[np.triu_indices(4, 1)], T_ANGLE, atol=1e-12)
    assert cone.triangles.shape == (6, 3) and cone.vertices.shape == (5, 3)


def test_projected_cone():
    p = project_to_F(0.4)
    assert abs(quadratic_forms(p.s, p.t)[0]) < 1e-15
    assert p.t == pytest.approx(0.590852, abs=1e-6)
    a1, a2 = cone_apex_heights(p)
    assert abs(a1 - a2) < 1e-12
    cone = flat_cone(p)
    assert cone.a == pytest.approx(-0.067477, abs=1e-6)
    # the apex sees opposite edges under equal angles
    A = cone.angles
    assert A[0, 1] == pytest.approx(A[2, 3], abs=1e-12)


def test_rounded_F_point_rejected():
    with pytest.raises(NotOnF):
        flat_cone(TetraParams(0.4, 0.590852))


def test_build_film_returns_cone_on_F():
    cone = build_film(make_params(0.5, 0.5))
    assert abs(cone.a) < 1e-15
