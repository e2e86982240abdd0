"""Invariant suite over assembled films, and parameter sweeps."""
from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import combinations

import numpy as np

from .assembly import (RX, RY, ConeFilm, FilmMesh, T_ANGLE, cone_apex_heights,
                       dihedral_along_edge, tpoint_angle_inequalities)
from .errors import ConelikeError
from .paths import INVERSE, MOBIUS
from .quadrature import integrate, segment_path
from .tetra import Region, TetraParams, classify, classify_by_circles
from .weierstrass import (_ray_exit, aitken, edge_curve, integrate_point,
                          surface_vertex_angle)

DEG = 180.0 / math.pi


@dataclass
class Tolerances:
    tol_conformal: float = 1e-6
    tol_geom: float = 1e-4
    tol_F: float = 1e-10
    planar: float = 1e-6
    straight: float = 1e-6
    direction: float = 1e-4
    normal: float = 1e-3
    tpoint_deg: float = 0.01
    dihedral_min_deg: float = 119.9
    w_angle_deg: float = 0.1
    path: float = 1e-9
    cone: float = 1e-12


@dataclass
class Check:
    name: str
    value: float
    tol: float
    passed: bool

    def as_record(self) -> dict:
        return {"name": self.name, "value": self.value, "tol": self.tol, "pass": bool(self.passed)}


@dataclass
class VerificationReport:
    s: float
    t: float
    region: str
    checks: list = field(default_factory=list)
    solver: dict = field(default_factory=dict)
    mesh: dict = field(default_factory=dict)
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(c.passed for c in self.checks)

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def add(self, name, value, tol, passed):
        if any(c.name == name for c in self.checks):
            raise ValueError(f"duplicate check {name}")
        self.checks.append(Check(name, float(value), float(tol), bool(passed)))

    def upper(self, name, value, tol):
        self.add(name, value, tol, value <= tol)

    def lower(self, name, value, tol):
        self.add(name, value, tol, value >= tol)

    def to_dict(self) -> dict:
        return {"s": self.s, "t": self.t, "region": self.region, "pass": self.passed,
                "checks": [c.as_record() for c in self.checks],
                "solver": self.solver, "mesh": self.mesh, "error": self.error}

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, default=_jsonable, **kw)


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, complex):
        return [x.real, x.imag]
    return str(x)


# -- individual measurements ---------------------------------------------------

def _unit(v):
    return v / np.linalg.norm(v)


def _angle(u, v) -> float:
    return math.acos(max(-1.0, min(1.0, float(np.dot(_unit(u), _unit(v))))))


def second_differences(x, f) -> np.ndarray:
    d1 = np.diff(f) / np.diff(x)
    xm = 0.5 * (x[1:] + x[:-1])
    return np.diff(d1) / np.diff(xm)


def unit_normal(W, z) -> np.ndarray:
    phi = W.form(z)
    n = np.cross(phi.real, -phi.imag)
    return n / np.linalg.norm(n, axis=-1)[..., None]


def line_fit(points: np.ndarray):
    """Best-fit line; returns (max distance, unit direction)."""
    c = points.mean(axis=0)
    d = np.linalg.svd(points - c)[2][0]
    off = points - c
    dist = np.linalg.norm(off - np.outer(off @ d, d), axis=1)
    return float(dist.max()), d


def tpoint_tangents(W, levels: int = 8) -> list:
    """Unit tangents of Y1, Y2, Y3, Y4 at the T-point, by extrapolated chords."""
    poly = W.poly
    y1, y3 = poly.edge("Y1"), poly.edge("Y3")
    eps = 0.02 * 0.5 ** np.arange(levels)
    c1 = np.array([_unit(integrate_point(W, complex(y1.at(e)))) for e in eps])
    c3 = np.array([_unit(integrate_point(W, complex(y3.at(1 - e)))) for e in eps])
    t1 = _unit(np.array([aitken(c1[:, i]) for i in range(3)]))
    t3 = _unit(np.array([aitken(c3[:, i]) for i in range(3)]))
    return [t1, t1 * RY, t3, t3 * RX]


def y1_edge_angle(W, levels: int = 8) -> float:
    """Angle at X(v1) between the image of Y1 and the top edge, by extrapolated chords."""
    poly = W.poly
    e = poly.edge("Y1")
    x0 = integrate_point(W, poly.vertex("v1"))
    angs = []
    for ep in 0.02 * 0.5 ** np.arange(levels):
        d = integrate_point(W, complex(e.at(1 - ep))) - x0
        angs.append(math.acos(max(-1.0, min(1.0, d[1] / np.linalg.norm(d)))))
    return aitken(np.array(angs))


def lattice_points(W, n_theta: int = 4, fracs=(0.3, 0.6, 0.85)) -> list:
    poly = W.poly
    th0 = float(np.angle(MOBIUS(poly.edge("Y1").at(0.5))))
    chain = [(k, MOBIUS.image_edge(e)) for k, e in enumerate(poly.edges)
             if e.label not in ("Y1", "Y3")]
    pts = []
    for th in th0 + poly.interior_angles[0] * np.linspace(0.2, 0.8, n_theta):
        r, _ = _ray_exit(chain, th)
        pts.extend(complex(INVERSE(f * r * np.exp(1j * th))) for f in fracs)
    return pts


def fd_residuals(W, points, h: float) -> tuple:
    """Five-point conformality and harmonicity residuals of X at spacing h."""
    diam = W.poly.diameter()

    def step(z, dz):
        path, dpath = segment_path(z, z + dz)
        return integrate(W.form, path, dpath, 0.0, 1.0, ()).real

    conf, harm = [], []
    for z in points:
        dp, dm, ip, im = step(z, h), step(z, -h), step(z, 1j * h), step(z, -1j * h)
        xu, xv = (dp - dm) / (2 * h), (ip - im) / (2 * h)
        lap = (dp + dm + ip + im) / h ** 2
        E, G, F = xu @ xu, xv @ xv, xu @ xv
        conf.append(max(abs(E - G), 2 * abs(F)) / (E + G))
        harm.append(np.linalg.norm(lap) * diam / math.sqrt(E))
    return max(conf), max(harm)


def isotropy_residual(W, points) -> float:
    phi = W.form(np.array(points))
    return float(np.max(np.abs(np.sum(phi * phi, axis=-1)) / np.sum(np.abs(phi) ** 2, axis=-1)))


def fd_spacing(W, resolution: int) -> float:
    return 0.25 * W.poly.diameter() / resolution


def edge_image_vector(W, label: str) -> np.ndarray:
    e = W.poly.edge(label)
    return integrate(W.form, e.at, e.dat, 0.0, 1.0, W.singularities()).real


def rado_counts(patch) -> tuple:
    V = patch.vertices[:, :2]
    T = patch.triangles
    a, b = V[T[:, 1]] - V[T[:, 0]], V[T[:, 2]] - V[T[:, 0]]
    area = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    return int(np.sum(area > 0)), int(np.sum(area < 0))


# -- report --------------------------------------------------------------------

def _classification(rep: VerificationReport, p: TetraParams, tol: Tolerances):
    a, b = classify(p, tol.tol_F), classify_by_circles(p)
    rep.add("classification_agrees", float(a == b or a is Region.F), 0.0, a == b or a is Region.F)


def verify_cone(p: TetraParams, cone: ConeFilm, tol: Tolerances = Tolerances()) -> VerificationReport:
    rep = VerificationReport(p.s, p.t, str(Region.F))
    _classification(rep, p, tol)
    h1, h2 = cone_apex_heights(p)
    rep.upper("cone_apex_formulas", abs(h1 - h2), tol.cone)
    off = cone.angles[np.triu_indices(4, 1)]
    rep.upper("f_angle_table", float(np.max(np.abs(off - T_ANGLE))), tol.cone)
    rep.solver = {"a": cone.a, "tpoint_angle_deg": float(cone.angles[0, 1] * DEG)}
    return rep


def verify_film(p: TetraParams, film, tol: Tolerances = Tolerances(),
                resolution: int | None = None) -> VerificationReport:
    if isinstance(film, ConeFilm):
        return verify_cone(p, film, tol)
    assert isinstance(film, FilmMesh)
    W, patch, region = film.weierstrass, film.patch, film.region
    poly = W.poly
    res = resolution or (patch.grid_shape[1] - 1)
    rep = VerificationReport(p.s, p.t, str(region))
    _classification(rep, p, tol)
    ts = np.linspace(0.0, 1.0, 65)
    y1 = edge_curve(W, "Y1", ts) + [0, 0, film.translation]
    y3 = edge_curve(W, "Y3", ts)[::-1] + [0, 0, film.translation]

    # planarity
    rep.upper("y1_planar", float(np.max(np.abs(y1[:, 0]))), tol.planar)
    rep.upper("y3_planar", float(np.max(np.abs(y3[:, 1]))), tol.planar)

    # monotonicity and concavity: x3 as a graph over y (Y1) and over x (Y3)
    rep.add("y1_monotone", 0.0, 0.0, bool(np.all(np.diff(y1[:, 1]) < 0) and np.all(np.diff(y1[:, 2]) > 0)))
    rep.add("y3_monotone", 0.0, 0.0, bool(np.all(np.diff(y3[:, 0]) > 0) and np.all(np.diff(y3[:, 2]) < 0)))
    if region in (Region.ThetaPlus, Region.ThetaMinus):
        up = 1.0 if region is Region.ThetaPlus else -1.0
        k1 = second_differences(y1[:, 1], y1[:, 2]) * up
        k3 = second_differences(y3[:, 0], y3[:, 2]) * -up
        rep.add("y1_concavity", float(k1.min()), 0.0, k1.min() > 0)
        rep.add("y3_concavity", float(k3.min()), 0.0, k3.min() > 0)

    # Est image
    est = edge_curve(W, "Est", np.linspace(0.0, 1.0, 257)) + [0, 0, film.translation]
    dist, d = line_fit(est)
    v_st = _unit(p.v_st)
    rep.upper("est_straightness", dist, tol.straight)
    rep.upper("est_direction", 1.0 - abs(float(d @ v_st)), tol.direction)

    # normal laws
    tau = np.linspace(0.05, 0.95, 19)
    n1 = unit_normal(W, poly.edge("Y1").at(tau))
    n3 = unit_normal(W, poly.edge("Y3").at(tau))
    ne = unit_normal(W, poly.edge("Est").at(tau))
    rep.upper("normal_y1_60deg", float(np.max(np.abs(np.abs(n1[:, 0]) - 0.5))), tol.normal)
    rep.upper("normal_y3_60deg", float(np.max(np.abs(np.abs(n3[:, 1]) - 0.5))), tol.normal)
    rep.upper("normal_est_90deg", float(np.max(np.abs(ne @ v_st))), tol.normal)

    # T-point
    tang = tpoint_tangents(W)
    angles = np.array([_angle(tang[i], tang[j]) for i, j in combinations(range(4), 2)]) * DEG
    rep.solver["tpoint_angle_deg"] = float(angles[0])
    rep.upper("tpoint_angle_y1_y2", abs(angles[0] - T_ANGLE * DEG), tol.tpoint_deg)
    rep.upper("tpoint_angle_y3_y4", abs(angles[5] - T_ANGLE * DEG), tol.tpoint_deg)
    rep.upper("tpoint_angle_table", float(np.max(np.abs(angles - T_ANGLE * DEG))), tol.tpoint_deg)
    ends = [film.singular_curves[k][0] for k in ("Y1", "Y2", "Y3", "Y4")]
    spread = max(np.linalg.norm(a - b) for a, b in combinations(ends, 2))
    rep.upper("tpoint_incidence", float(spread), tol.planar)
    if region in (Region.ThetaPlus, Region.ThetaMinus):
        ang = tpoint_angle_inequalities(film)
        margin = min(T_ANGLE - ang["top"], T_ANGLE - ang["bottom"])
        if region is Region.ThetaMinus:
            margin = min(ang["top"] - T_ANGLE, ang["bottom"] - T_ANGLE)
        rep.add("tetra_angle_inequality", margin * DEG, 0.0, margin > 0)

    # Rado graph property
    pos, neg = rado_counts(patch)
    rep.add("rado_projection", min(pos, neg), 0.0, min(pos, neg) == 0)

    # conformality, harmonicity and path independence
    pts = lattice_points(W)
    rep.upper("conformality_analytic", isotropy_residual(W, pts), tol.tol_conformal)
    h = fd_spacing(W, res)
    c_h, h_h = fd_residuals(W, pts, h)
    c_2, h_2 = fd_residuals(W, pts, h / 2)
    rep.solver["fd_residuals"] = {"h": h, "conformality": [c_h, c_2], "harmonicity": [h_h, h_2]}
    rep.lower("conformality_refinement", c_h / c_2, 2.0)
    rep.lower("harmonicity_refinement", h_h / h_2, 2.0)
    mid = patch.z[len(patch.z) // 2]
    diff = np.linalg.norm(integrate_point(W, mid, "ray") - integrate_point(W, mid, "alt"))
    rep.upper("path_independence", float(diff), tol.path)

    # closure
    rep.upper("closure", film.closure_residual, tol.tol_geom)

    # C regions: extra edges, dihedral bound, lengths
    if region in (Region.C4, Region.C2Plus, Region.C2Minus):
        top, bottom = film.tetra.top_minus, film.tetra.bottom_plus
        # Ex runs w1 -> v1, Ey runs v2 -> w2; d points from the tetra vertex to the w-vertex
        for label, flip, axis, vertex in (("Ex", -1.0, 1, top), ("Ey", 1.0, 0, bottom)):
            if label not in poly.labels:
                continue
            d = flip * edge_image_vector(W, label)
            inward = -np.sign(vertex[axis]) * np.eye(3)[axis]
            along = float(d @ inward) / np.linalg.norm(d)
            rep.add(f"{label.lower()}_interior_point", float(np.linalg.norm(d)), 0.0, np.linalg.norm(d) > 0)
            rep.upper(f"{label.lower()}_on_edge", 1.0 - along, tol.direction)
        dmin = min(float(np.min(dihedral_along_edge(film, s))) for s in film.edge_segments)
        rep.solver["dihedral_min_deg"] = dmin * DEG
        rep.lower("dihedral_min_deg", dmin * DEG, tol.dihedral_min_deg)
        L = W.zeta.lengths
        if L is not None:
            rep.upper("length_residual", float(np.max(np.abs(L.residual))), tol.tol_conformal)
            rep.solver.update({"ell": L.ell, "m": L.m, "length_residual": list(L.residual),
                               "iterations": L.iterations, "ext_domain": L.ext_domain})
        if region is Region.C4:
            from .targets import in_D
            rep.add("lengths_in_D", 0.0, 0.0, in_D(L.ell, L.m))
            for v in ("w1", "w2"):
                a = surface_vertex_angle(W, v) * DEG
                rep.upper(f"surface_angle_{v}", abs(a - 180.0), tol.w_angle_deg)
    rep.solver.update({"lambda": W.lam, "sign": W.sign, "translation": film.translation,
                       "edge_fit_residual": float(W.zeta.emap.check_residual)})
    rep.mesh = dict(patch.stats)
    return rep


# -- sweeps ----------------------------------------------------------------------

def grid_points(n: int) -> list:
    """n x n polar grid of the open quarter disk (radii 0.95 k/(n+1), centred angles)."""
    out = []
    for i in range(n):
        r = 0.95 * (i + 1) / (n + 1)
        for j in range(n):
            phi = 0.5 * math.pi * (j + 0.5) / n
            out.append((r * math.cos(phi), r * math.sin(phi)))
    return out


def diagonal_points(values=(0.3, 0.4, 0.5, 0.55, 0.6, 0.64, 0.66)) -> list:
    return [(v, v) for v in values]


def verify_params(s: float, t: float, tol: Tolerances = Tolerances(), resolution: int = 64,
                  build: bool = True) -> VerificationReport:
    """Build and verify one film, recording failures in the report instead of raising."""
    from .assembly import build_film
    from .tetra import make_params
    p = make_params(s, t)
    region = classify(p, tol.tol_F)
    if not build:
        rep = VerificationReport(p.s, p.t, str(region))
        _classification(rep, p, tol)
        return rep
    try:
        film = build_film(p, resolution, tol)
        return verify_film(p, film, tol, resolution)
    except ConelikeError as exc:
        rep = VerificationReport(p.s, p.t, str(region), error=f"{type(exc).__name__}: {exc}")
        for attr in ("residual", "x"):
            if hasattr(exc, attr):
                rep.solver[attr] = getattr(exc, attr)
        return rep


def _worker(args):
    s, t, tol_dict, resolution, build = args
    return verify_params(s, t, Tolerances(**tol_dict), resolution, build)


def pool_size() -> int:
    try:
        return max(1, int(os.environ.get("CONELIKE_THREADS", "1")))
    except ValueError:
        return 1


def sweep(params_grid, tol: Tolerances = Tolerances(), resolution: int = 64,
          build: bool = True, workers: int | None = None) -> list:
    jobs = [(float(s), float(t), asdict(tol), resolution, build) for s, t in params_grid]
    if not jobs:
        return []
    workers = workers or pool_size()
    if workers == 1:
        return [_worker(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(_worker, jobs))


def summarize(reports) -> dict:
    failed = [(r.s, r.t) for r in reports if not r.passed]
    return {"total": len(reports), "passed": len(reports) - len(failed), "failed": failed}
