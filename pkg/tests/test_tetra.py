import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from conelike.errors import Degenerate, NotAnIntersection, OutOfDomain
from conelike.tetra import (GAMMA1, GAMMA2, P1, P2, PSI0, X0, Y0, Position, Region,
                            TetraParams, circle_intersections, circle_position, classify,
                            classify_by_circles, corner_angles, gamma_circles, gamma_st,
                            make_params, orthogonality_invariant, quadratic_forms,
                            tetra_vertices)

SQ3 = math.sqrt(3)


@st.composite
def q_points(draw, margin=1e-3):
    s = draw(st.floats(margin, 1 - margin))
    t = draw(st.floats(margin, 1 - margin))
    assume(s * s + t * t < 1 - margin)
    return TetraParams(s, t)


def off_F(p, band=1e-9):
    return abs(quadratic_forms(p.s, p.t)[0]) > band


# -- parameters and tetrahedron ------------------------------------------------

def test_make_params_regular():
    assert make_params(0.5, 0.5).A == pytest.approx(math.sqrt(0.5), abs=1e-15)


def test_make_params_theta_plus_value():
    assert make_params(0.3, 0.3).A == pytest.approx(0.9055385, abs=1e-7)


@pytest.mark.parametrize("s,t", [(0.8, 0.8), (0.0, 0.5), (0.5, -0.1), (0.6, 0.8)])
def test_make_params_rejects_outside(s, t):
    with pytest.raises(OutOfDomain):
        make_params(s, t)


def test_regular_tetra_vertices():
    v = tetra_vertices(make_params(0.5, 0.5)).vertices
    h = 0.3535534
    expected = {(0, -0.5, h), (0, 0.5, h), (0.5, 0, -h), (-0.5, 0, -h)}
    got = {tuple(np.round(row, 7) + 0.0) for row in v}
    assert got == {tuple(np.round(np.array(e, float), 7)) for e in expected}


def test_top_edge_length():
    v = tetra_vertices(make_params(0.3, 0.3)).vertices
    assert np.linalg.norm(v[1] - v[0]) == pytest.approx(0.6, abs=1e-15)


@given(q_points())
def test_non_horizontal_edges_have_unit_length(p):
    tet = tetra_vertices(p)
    assert np.allclose(tet.non_horizontal_edge_lengths(), 1.0, atol=1e-14)
    assert np.allclose(tet.centroid(), 0.0, atol=1e-15)


# -- classification ------------------------------------------------------------

@pytest.mark.parametrize("s,t,region", [
    (0.5, 0.5, Region.F),
    (0.3, 0.3, Region.ThetaPlus),
    (0.6, 0.6, Region.ThetaMinus),
    (0.66, 0.66, Region.C4),
    (0.2, 0.85, Region.C2Plus),
    (0.85, 0.2, Region.C2Minus),
])
def test_classify_examples(s, t, region):
    assert classify(make_params(s, t)) is region


@pytest.mark.parametrize("s,t,region", [
    (0.3, 0.3, Region.ThetaPlus), (0.6, 0.6, Region.ThetaMinus), (0.66, 0.66, Region.C4),
    (0.2, 0.85, Region.C2Plus), (0.85, 0.2, Region.C2Minus), (0.5, 0.5, Region.F),
])
def test_classify_by_circles_examples(s, t, region):
    assert classify_by_circles(make_params(s, t)) is region


@settings(max_examples=300)
@given(q_points())
def test_classifiers_agree(p):
    assume(off_F(p))
    assume(min(abs(f) for f in quadratic_forms(p.s, p.t)[1:]) > 1e-9)
    assert classify(p) is classify_by_circles(p)


def test_theta_plus_distance_example():
    g = gamma_st(make_params(0.3, 0.3))
    assert abs(P2 - g.center) == pytest.approx(1.9457, abs=1e-4)
    assert g.radius == pytest.approx(1.1043, abs=1e-4)


# -- circles --------------------------------------------------------------------

def test_fixed_circles():
    g1, g2, _ = gamma_circles(make_params(0.4, 0.2))
    assert g1.center == 2 and g1.radius == pytest.approx(SQ3)
    assert g2.center == 2j and g2.radius == pytest.approx(SQ3)


def test_gamma_st_regular():
    g = gamma_st(make_params(0.5, 0.5))
    assert g.center == pytest.approx(0.7071068 * (1 + 1j), abs=1e-7)
    assert g.radius == pytest.approx(1.4142136, abs=1e-7)
    assert abs(P2 - g.center) == pytest.approx(g.radius, abs=1e-14)


def test_key_points():
    assert P1 == pytest.approx((1 - 1 / math.sqrt(2)) * (1 + 1j))
    assert P2 == pytest.approx((1 + 1 / math.sqrt(2)) * (1 + 1j))
    for z in (P1, P2):
        assert circle_position(z, GAMMA1) is Position.On
        assert circle_position(z, GAMMA2) is Position.On
    assert circle_position(X0, GAMMA1) is Position.On
    assert circle_position(Y0, GAMMA2) is Position.On


def test_circle_position_examples():
    assert circle_position(P1, gamma_st(make_params(0.5, 0.5))) is Position.Inside
    g = gamma_st(make_params(0.66, 0.66))
    assert abs(X0 - g.center) ** 2 == pytest.approx(6.9656, abs=1e-4)
    assert g.radius ** 2 == pytest.approx(7.7640, abs=1e-4)
    assert circle_position(X0, g) is Position.Inside


def test_circle_position_rejects_negative_tol():
    with pytest.raises(ValueError):
        circle_position(0j, GAMMA1, -1.0)


@given(q_points())
def test_p1_strictly_inside(p):
    assert circle_position(P1, gamma_st(p)) is Position.Inside


def test_boundary_ellipse_puts_x0_on_circle():
    t = 0.5
    s = math.sqrt((3 - 3 * t * t) / 4)
    assert circle_position(X0, gamma_st(TetraParams(s, t)), 1e-12) is Position.On


# -- angles ---------------------------------------------------------------------

def test_psi0():
    assert corner_angles(make_params(0.3, 0.3)).psi0 == pytest.approx(math.acos(1 / 3), abs=1e-15)
    assert PSI0 == pytest.approx(1.2309594, abs=1e-7)


def test_psi_at_regular_limit():
    a = corner_angles(make_params(0.5, 0.5 + 1e-9))
    assert a.psi1 == pytest.approx(math.acos(1 / math.sqrt(3)), abs=1e-7)
    assert a.psi2 == pytest.approx(math.acos(1 / math.sqrt(3)), abs=1e-7)


def test_psi_symmetric_on_diagonal():
    a = corner_angles(make_params(0.3, 0.3))
    assert a.psi1 == pytest.approx(a.psi2, abs=1e-15)
    assert 0 < a.psi1 < math.pi / 2


def test_corner_angles_degenerate_on_F():
    with pytest.raises(Degenerate):
        corner_angles(make_params(0.5, 0.5))


def test_corner_angles_need_intersections():
    with pytest.raises(NotAnIntersection):
        corner_angles(make_params(0.875, 0.25))


@given(q_points())
def test_corner_angle_ranges(p):
    assume(off_F(p))
    try:
        a = corner_angles(p)
    except NotAnIntersection:
        assume(False)
    assert abs(a.psi0 - math.acos(1 / 3)) < 1e-12
    assert 0 < a.psi1 < math.pi / 2 and 0 < a.psi2 < math.pi / 2


@pytest.mark.parametrize("s,t,value", [(0.5, 0.5, 1.4142136), (0.3, 0.3, 0.6625891)])
def test_orthogonality_examples(s, t, value):
    p = make_params(s, t)
    for z in circle_intersections(GAMMA1, gamma_st(p)):
        assert orthogonality_invariant(p, z) == pytest.approx(value, abs=1e-7)


def test_orthogonality_second_circle():
    p = make_params(0.3, 0.4)
    z = circle_intersections(GAMMA2, gamma_st(p))[0]
    assert orthogonality_invariant(p, z, which=2) == pytest.approx(2 * p.t / p.A, rel=1e-12)


def test_orthogonality_rejects_non_intersection():
    with pytest.raises(NotAnIntersection):
        orthogonality_invariant(make_params(0.3, 0.3), 0j)


@given(q_points())
def test_orthogonality_identity(p):
    for which, value in ((1, 2 * p.s / p.A), (2, 2 * p.t / p.A)):
        fixed = GAMMA1 if which == 1 else GAMMA2
        try:
            pts = circle_intersections(fixed, gamma_st(p))
        except NotAnIntersection:
            continue
        for z in pts:
            assert orthogonality_invariant(p, z, which) == pytest.approx(value, rel=1e-12)
