import json
import math

import numpy as np
import pytest

from conelike.assembly import flat_cone
from conelike.tetra import Region, classify_by_circles, make_params
from conelike.verify import (Tolerances, VerificationReport, diagonal_points, grid_points,
                             line_fit, pool_size, second_differences, summarize, sweep,
                             verify_film, verify_params)

CANON = ["theta_plus", "theta_minus", "c4", "c2_plus", "c2_minus"]


def test_report_schema_and_json():
    rep = VerificationReport(0.3, 0.4, "ThetaPlus")
    rep.upper("a", 1e-9, 1e-6)
    rep.lower("b", 120.0, 119.9)
    rep.add("c", 2.0, 0.0, False)
    d = json.loads(rep.to_json())
    assert set(d) == {"s", "t", "region", "pass", "checks", "solver", "mesh", "error"}
    assert [c["name"] for c in d["checks"]] == ["a", "b", "c"]
    assert set(d["checks"][0]) == {"name", "value", "tol", "pass"}
    assert d["pass"] is False and rep.check("a").passed
    with pytest.raises(ValueError):
        rep.upper("a", 0.0, 1.0)
    with pytest.raises(KeyError):
        rep.check("missing")


def test_error_fails_report():
    rep = VerificationReport(0.1, 0.1, "ThetaPlus", error="NoConvergence: stalled")
    assert not rep.passed


def test_numpy_values_serialise():
    rep = VerificationReport(0.3, 0.3, "ThetaPlus")
    rep.solver = {"x": np.float64(1.5), "v": np.arange(3), "z": 1 + 2j}
    assert json.loads(rep.to_json())["solver"] == {"v": [0, 1, 2], "x": 1.5, "z": [1.0, 2.0]}


def test_helpers():
    x = np.linspace(0, 1, 11)
    assert np.allclose(second_differences(x, x ** 2), 2.0)
    pts = np.c_[x, 2 * x, -x] + [1, 2, 3]
    resid, d = line_fit(pts)
    assert resid < 1e-14
    assert abs(abs(np.dot(d, [1, 2, -1])) / math.sqrt(6) - 1) < 1e-14


def test_empty_sweep():
    assert sweep([]) == []
    assert summarize([]) == {"total": 0, "passed": 0, "failed": []}


def test_grid_points_inside_quarter_disk():
    pts = grid_points(5)
    assert len(pts) == 25
    assert all(s > 0 and t > 0 and s * s + t * t < 1 for s, t in pts)


def test_classify_only_sweep_matches_circles():
    reports = sweep(grid_points(5), build=False, workers=1)
    assert len(reports) == 25
    for rep in reports:
        assert rep.passed
        assert rep.region == str(classify_by_circles(make_params(rep.s, rep.t)))


def test_diagonal_region_order():
    regions = [r.region for r in sweep(diagonal_points(), build=False)]
    order = [str(x) for x in (Region.ThetaPlus, Region.F, Region.ThetaMinus, Region.C4)]
    collapsed = [r for k, r in enumerate(regions) if k == 0 or regions[k - 1] != r]
    assert collapsed == order


def test_pool_size_env(monkeypatch):
    monkeypatch.setenv("CONELIKE_THREADS", "3")
    assert pool_size() == 3
    monkeypatch.setenv("CONELIKE_THREADS", "many")
    assert pool_size() == 1


def test_cone_report():
    p = make_params(0.5, 0.5)
    rep = verify_film(p, flat_cone(p))
    assert rep.passed and rep.region == str(Region.F)
    assert {c.name for c in rep.checks} == {"classification_agrees", "cone_apex_formulas",
                                            "f_angle_table"}


@pytest.mark.filterwarnings("ignore::conelike.weierstrass.MeshQualityWarning")
def test_verify_params_records_errors():
    # resolution too coarse for the closure tolerance is a failure, not an exception
    rep = verify_params(0.3, 0.3, Tolerances(tol_geom=1e-300), resolution=8)
    assert rep.error and rep.error.startswith("ClosureFailure")
    assert not rep.passed


@pytest.fixture(scope="module")
def canonical_reports(request):
    out = {}
    for name in CANON:
        b = request.getfixturevalue(name)
        out[name] = verify_film(b.params, b.film, Tolerances(), 64)
    return out


@pytest.mark.parametrize("name", CANON)
def test_canonical_points_pass(name, canonical_reports):
    rep = canonical_reports[name]
    failed = [c.name for c in rep.checks if not c.passed]
    assert rep.passed, failed


def test_region_specific_checks(canonical_reports):
    names = {k: {c.name for c in r.checks} for k, r in canonical_reports.items()}
    assert "y1_concavity" in names["theta_plus"] and "ex_on_edge" not in names["theta_plus"]
    assert {"ex_on_edge", "ey_on_edge", "surface_angle_w1"} <= names["c4"]
    assert "ey_on_edge" in names["c2_plus"] and "ex_on_edge" not in names["c2_plus"]
    assert "ex_on_edge" in names["c2_minus"] and "ey_on_edge" not in names["c2_minus"]


def test_tpoint_angle_recorded(canonical_reports):
    for rep in canonical_reports.values():
        assert rep.solver["tpoint_angle_deg"] == pytest.approx(109.4712206, abs=0.01)


def test_report_is_deterministic(theta_plus):
    a = verify_film(theta_plus.params, theta_plus.film).to_json()
    b = verify_film(theta_plus.params, theta_plus.film).to_json()
    assert a == b
