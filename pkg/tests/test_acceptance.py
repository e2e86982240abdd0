"""Acceptance criteria 1-10, each at its stated tolerance and time budget."""
import math
import time

import numpy as np

from conelike.assembly import cone_apex_heights, flat_cone, project_to_F
from conelike.developing import build_zeta
from conelike.domain import Mobius, polygon_from_points
from conelike.errors import NotAnIntersection
from conelike.extremal import ext_length
from conelike.targets import pentagon_target
from conelike.tetra import (GAMMA1, Region, TetraParams, circle_intersections, classify,
                            classify_by_circles, gamma_st, make_params, orthogonality_invariant,
                            quadratic_forms)
from conelike.verify import Tolerances, verify_film, y1_edge_angle
from conelike.weierstrass import weierstrass_data

from conftest import built, record

T_DEG = math.degrees(math.acos(-1 / 3))
TOL = Tolerances()


def _failed(rep, names):
    return [n for n in names if not rep.check(n).passed]


def test_criterion_01_region_equivalence():
    t0 = time.perf_counter()
    n = 100
    g = (np.arange(n) + 0.5) / n
    total = agree = 0
    for s in g:
        for t in g:
            if s * s + t * t >= 1 or abs(quadratic_forms(s, t)[0]) <= TOL.tol_F:
                continue
            p = TetraParams(float(s), float(t))
            total += 1
            agree += classify(p) is classify_by_circles(p)
    dt = time.perf_counter() - t0
    ok = agree == total and dt < 1.0
    record(1, ok, f"{agree}/{total} grid points agree in {dt:.2f} s")
    assert ok


def test_criterion_02_orthogonality_identity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst, done, skipped = 0.0, 0, 0
    while done < 1000:
        s, t = rng.uniform(0.01, 0.99, 2)
        if s * s + t * t >= 0.99:
            continue
        p = TetraParams(float(s), float(t))
        try:
            pts = circle_intersections(GAMMA1, gamma_st(p))
        except NotAnIntersection:
            skipped += 1
            continue
        exact = 2 * p.s / p.A
        worst = max(worst, max(abs(orthogonality_invariant(p, z) / exact - 1) for z in pts))
        done += 1
    dt = time.perf_counter() - t0
    ok = worst <= 1e-12 and dt < 1.0
    record(2, ok, f"max relative error {worst:.1e} on {done} samples "
                  f"({skipped} without intersection skipped) in {dt:.2f} s")
    assert ok


def test_criterion_03_flat_cone():
    cone = flat_cone(make_params(0.5, 0.5))
    off = cone.angles[np.triu_indices(4, 1)]
    angle_err = float(np.max(np.abs(off - math.acos(-1 / 3))))
    apex_err = float(np.linalg.norm(cone.vertex))
    h1, h2 = cone_apex_heights(project_to_F(0.4))
    ok = angle_err <= 1e-12 and apex_err <= 1e-12 and abs(h1 - h2) <= 1e-12
    record(3, ok, f"apex {apex_err:.1e} from origin, angle error {angle_err:.1e}, "
                  f"apex formulas differ by {abs(h1 - h2):.1e} at s = 0.4 on F")
    assert ok


THETA_CHECKS = ["tpoint_angle_table", "y1_planar", "y3_planar", "est_straightness",
                "est_direction", "closure", "y1_concavity", "y3_concavity",
                "tetra_angle_inequality"]


def _theta(number, b):
    t0 = time.perf_counter()
    rep = verify_film(b.params, b.film, TOL, 64)
    dt = b.seconds + time.perf_counter() - t0
    bad = _failed(rep, THETA_CHECKS)
    ok = not bad and dt < 60.0
    record(number, ok, f"{rep.region}: T-point {rep.solver['tpoint_angle_deg']:.5f} deg, "
                       f"closure {b.film.closure_residual:.1e}, {dt:.1f} s"
                       + (f"; failed {bad}" if bad else ""))
    assert ok, bad


def test_criterion_04_theta_plus(theta_plus):
    assert theta_plus.film.region is Region.ThetaPlus
    _theta(4, theta_plus)


def test_criterion_05_theta_minus(theta_minus):
    assert theta_minus.film.region is Region.ThetaMinus
    _theta(5, theta_minus)


def test_criterion_06_c4(c4):
    t0 = time.perf_counter()
    rep = verify_film(c4.params, c4.film, TOL, 64)
    dt = c4.seconds + time.perf_counter() - t0
    L = c4.zeta.lengths
    res = max(abs(r) for r in L.residual)
    names = ["lengths_in_D", "ex_interior_point", "ey_interior_point", "ex_on_edge",
             "ey_on_edge", "dihedral_min_deg", "surface_angle_w1", "surface_angle_w2"]
    bad = _failed(rep, names)
    ok = res <= 1e-6 and not bad and dt < 300.0
    record(6, ok, f"(l, m) = ({L.ell:.6f}, {L.m:.6f}), residual {res:.1e}, dihedral min "
                  f"{rep.solver['dihedral_min_deg']:.4f} deg, {dt:.1f} s"
                  + (f"; failed {bad}" if bad else ""))
    assert ok, bad


def test_criterion_07_c2(c2_plus, c2_minus):
    lines, ok = [], True
    for b, extra, missing in ((c2_plus, "Ey", "Ex"), (c2_minus, "Ex", "Ey")):
        labels = b.zeta.poly.labels
        rep = verify_film(b.params, b.film, TOL, 64)
        key = extra.lower()
        bad = _failed(rep, [f"{key}_interior_point", f"{key}_on_edge", "dihedral_min_deg"])
        good = extra in labels and missing not in labels and not bad
        ok &= good
        lines.append(f"{rep.region} edge {extra}, dihedral min "
                     f"{rep.solver['dihedral_min_deg']:.4f} deg" + (f" failed {bad}" if bad else ""))
    record(7, ok, "; ".join(lines))
    assert ok


def test_criterion_08_extremal_length():
    tol = 1e-6
    rect_err = 0.0
    for aspect in np.geomspace(1 / 8, 8, 7):
        rect = polygon_from_points([0, 1, 1 + 1j * aspect, 1j * aspect])
        rect_err = max(rect_err, abs(ext_length(rect, "B1", "B3", tol) / aspect - 1))
    quad = polygon_from_points([0, 2, 1.6 + 1.1j, 0.3 + 0.7j])
    recip = abs(ext_length(quad, "B1", "B3", tol) * ext_length(quad, "B2", "B4", tol) - 1)
    pent = pentagon_target(1.0, 1.0).as_polygon()
    image = Mobius(0j, 1 + 0j, 1 + 0j, -(4 + 4j)).image_polygon(pent)
    a, b = ext_length(pent, "Y1", "Est", tol), ext_length(image, "Y1", "Est", tol)
    mob = abs(a - b)
    ok = rect_err <= 1e-3 and recip <= 5e-3 and mob <= 2 * tol * max(a, 1.0)
    record(8, ok, f"rectangle error {rect_err:.1e}, reciprocity {recip:.1e}, "
                  f"Moebius change {mob:.1e}")
    assert ok


def test_criterion_09_refinement(theta_plus, theta_minus):
    ok, lines = True, []
    for b in (theta_plus, theta_minus):
        coarse = verify_film(b.params, b.film, TOL, 64)
        fine_b = built(b.params.s, b.params.t, 128)
        fine = verify_film(fine_b.params, fine_b.film, TOL, 128)
        c0, h0 = (coarse.solver["fd_residuals"][k][0] for k in ("conformality", "harmonicity"))
        c1, h1 = (fine.solver["fd_residuals"][k][0] for k in ("conformality", "harmonicity"))
        path = max(coarse.check("path_independence").value, fine.check("path_independence").value)
        good = c0 / c1 >= 2 and h0 / h1 >= 2 and path <= 1e-9
        ok &= good
        lines.append(f"({b.params.s}, {b.params.t}) ratios {c0 / c1:.2f}/{h0 / h1:.2f}, "
                     f"path {path:.1e}")
    record(9, ok, "; ".join(lines))
    assert ok


def test_criterion_10_tangency_limit():
    t = 0.55
    s_b = math.sqrt((3 - 3 * t * t) / 4)
    angles = []
    for eps in (0.04, 0.02, 0.01, 0.005):
        p = make_params(s_b - eps, t)
        assert classify(p) is Region.ThetaMinus
        W = weierstrass_data(build_zeta(p))
        angles.append(math.degrees(y1_edge_angle(W)))
    decreasing = all(b < a for a, b in zip(angles, angles[1:]))
    # linear vanishing in the offset: the ratio of consecutive angles tends to 1/2
    ok = decreasing and angles[-1] < 0.25 * angles[0] and angles[-1] < 2.0
    record(10, ok, "Y1/top edge angle " + ", ".join(f"{a:.3f}" for a in angles)
                   + " deg at offsets 0.04 .. 0.005")
    assert ok
