"""The developing map zeta: Omega_st -> target polygon, and the pentagon length solve."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import targets
from .domain import CurvilinearPolygon, build_gauss_domain
from .edgemap import EdgeDirectionMap
from .errors import NearDegenerate, NoConvergence, OutOfD, WrongRegion
from .extremal import ext_length
from .halfplane import HalfPlaneMap, SCMap, sc_for_target
from .paths import ray_path
from .quadrature import cumulative, integrate
from .tetra import SQRT2, Region, TetraParams

EXT_TOL = 1e-8
CROWDING_LIMIT = 1e12


def solve_halfplane_map(poly: CurvilinearPolygon, tol: float = 1e-6) -> HalfPlaneMap:
    path = ray_path if poly.region is not None else None
    hp = HalfPlaneMap(poly, path_from_base=path)
    finite = [x for x in hp.prevertices if math.isfinite(x)]
    gaps = np.diff(finite)
    if finite[-1] > CROWDING_LIMIT or np.min(gaps) < 1.0 / CROWDING_LIMIT:
        raise NearDegenerate(f"prevertex crowding: {hp.prevertices}")
    if hp.accuracy > tol:
        from .errors import SolverDiverged
        raise SolverDiverged(f"boundary fit residual {hp.accuracy:.2e} exceeds {tol:.1e}")
    return hp


@dataclass
class LengthSolution:
    ell: float | None
    m: float | None
    residual: tuple
    iterations: int
    ext_domain: dict = field(default_factory=dict)


def _pentagon_residual(ell, m, e_ey, e_est):
    P = targets.pentagon_target(ell, m)
    return np.array([ext_length(P, "Y1", "Ey", EXT_TOL) - e_ey,
                     ext_length(P, "Y1", "Est", EXT_TOL) - e_est])


def _inside(y, step, frac=0.5):
    """Largest damped step in (log l, m) keeping m inside its D-interval with a margin."""
    alpha = 1.0
    for _ in range(60):
        u, m = y + alpha * step
        lo, hi = 1 / SQRT2, math.exp(u) + SQRT2
        lo0, hi0 = 1 / SQRT2, math.exp(y[0]) + SQRT2
        if m - lo > (1 - frac) * (y[1] - lo0) and hi - m > (1 - frac) * (hi0 - y[1]) \
                and abs(alpha * step[0]) < 3.0:
            return alpha
        alpha *= 0.5
    return 0.0


def solve_pentagon_lengths(poly: CurvilinearPolygon, tol: float = 1e-6, seed=(1.0, 1.0),
                           max_iter: int = 40) -> LengthSolution:
    region = poly.region
    if region is Region.C4:
        return _solve_c4(poly, tol, seed, max_iter)
    if region in (Region.C2Plus, Region.C2Minus):
        return _solve_c2(poly, tol)
    raise WrongRegion(f"no length problem for region {region}")


def _solve_c4(poly, tol, seed, max_iter):
    """Damped Newton in (log l, m); l > 0 holds automatically, m is kept inside D."""
    e_ey = ext_length(poly, "Y1", "Ey", EXT_TOL)
    e_est = ext_length(poly, "Y1", "Est", EXT_TOL)
    if not targets.in_D(*seed):
        raise OutOfD(f"seed {seed} outside D")

    def resid(y):
        return _pentagon_residual(math.exp(y[0]), y[1], e_ey, e_est)

    y = np.array([math.log(seed[0]), seed[1]])
    r = resid(y)
    for it in range(max_iter):
        if np.max(np.abs(r)) <= tol:
            return LengthSolution(math.exp(y[0]), float(y[1]), tuple(r), it,
                                  {"Y1-Ey": e_ey, "Y1-Est": e_est})
        J = np.empty((2, 2))
        for j in range(2):
            h = 1e-6
            yp = y.copy()
            yp[j] += h
            J[:, j] = (resid(yp) - r) / h
        step = -np.linalg.solve(J, r)
        alpha = _inside(y, step)
        while alpha > 1e-8:
            y_new = y + alpha * step
            r_new = resid(y_new)
            if np.linalg.norm(r_new) < np.linalg.norm(r):
                break
            alpha *= 0.5
        else:
            raise NoConvergence("pentagon solve stalled", tuple(r), (math.exp(y[0]), y[1]))
        y, r = y_new, r_new
    raise NoConvergence("pentagon solve hit the iteration cap", tuple(r), (math.exp(y[0]), y[1]))


def _solve_c2(poly, tol):
    if poly.region is Region.C2Plus:
        other = "Ey"

        def make(u):  # u = log(sqrt2 - m)
            return targets.quad_target(Region.C2Plus, SQRT2 - math.exp(u))
        hi = math.log(SQRT2 - 1 / SQRT2) - 0.05
    else:
        other = "Est"

        def make(u):  # u = log(l)
            return targets.quad_target(Region.C2Minus, math.exp(u))
        hi = math.log(10.0)
    e_dom = ext_length(poly, "Y1", other, EXT_TOL)

    def f(u):
        return ext_length(make(u), "Y1", other, EXT_TOL) - e_dom

    lo = hi - 1.0
    f_hi, f_lo = f(hi), f(lo)
    while f_hi * f_lo > 0:
        hi, f_hi = lo, f_lo
        lo -= 2.0
        if lo < math.log(1e-13):
            raise NoConvergence("no sign change for the C2 length", (f_lo,), (lo,))
        f_lo = f(lo)
    u = brentq(f, lo, hi, xtol=1e-14, rtol=1e-14)
    P = make(u)
    res = f(u)
    if abs(res) > tol:
        raise NoConvergence("C2 length residual above tolerance", (res,), (u,))
    return LengthSolution(P.ell, P.m, (res,), 0, {"Y1-" + other: e_dom})


class DevelopingMap:
    """zeta with zeta(p2) = 0, |zeta(Y1)| = 1 and every edge on its target edge."""

    def __init__(self, params: TetraParams, poly: CurvilinearPolygon, emap: EdgeDirectionMap,
                 target: targets.TargetPolygon, lengths: LengthSolution | None = None):
        self.params = params
        self.poly = poly
        self.emap = emap
        self.target = target
        self.lengths = lengths

    def derivative(self, z):
        return self.emap.derivative(z)

    def singularities(self, power: float = 1.0, extra: float = 0.0):
        return self.emap.singularities(power, extra)

    def __call__(self, z):
        z = np.atleast_1d(np.asarray(z, complex))
        out = np.empty(z.shape, complex)
        for i, v in np.ndenumerate(z):
            if abs(v - self.poly.vertices[0]) == 0:
                out[i] = 0j
                continue
            path, dpath = ray_path(complex(v))
            out[i] = complex(integrate(self.derivative, path, dpath, 0.0, 1.0, self.singularities()))
        return out

    def edge_image(self, label: str, n: int = 65) -> np.ndarray:
        """zeta at n points of an edge, integrated along the edge from its start vertex."""
        k = self.poly.edge_index(label)
        e = self.poly.edges[k]
        start = self.target.vertices[k]
        ts = np.linspace(0.0, 1.0, n)
        vals = cumulative(self.derivative, e.at, e.dat, ts, self.singularities())
        return start + vals

    def via_halfplane(self) -> "ComposedMap":
        hp = solve_halfplane_map(self.poly)
        sc = sc_for_target(hp.prevertices, targets.target_angles(self.poly),
                           self.target.vertices[1] - self.target.vertices[0])
        return ComposedMap(hp, sc)


@dataclass
class ComposedMap:
    halfplane: HalfPlaneMap
    sc: SCMap

    def __call__(self, z):
        return self.sc(complex(self.halfplane.inverse(z)[0]))


def build_zeta(p: TetraParams, tol: float = 1e-6, solve_lengths: bool = True) -> DevelopingMap:
    poly = build_gauss_domain(p)
    emap = EdgeDirectionMap(poly, targets.target_directions(poly), targets.target_angles(poly))
    y1 = emap.edge_image_length(poly.edge_index("Y1"))
    emap.scale = 1.0 / y1
    measured = {e.label: emap.edge_image_length(k) for k, e in enumerate(poly.edges)}
    target = targets.target_from_lengths(poly.region, measured)
    lengths = None
    if solve_lengths and poly.region in (Region.C4, Region.C2Plus, Region.C2Minus):
        lengths = solve_pentagon_lengths(poly, tol)
    return DevelopingMap(p, poly, emap, target, lengths)
