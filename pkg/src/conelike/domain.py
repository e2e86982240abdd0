"""Curvilinear polygons: the Gauss image Omega_st and synthetic test domains.

A polygon is a cyclic list of edges traversed counterclockwise (interior on
the left).  Each edge lies on a circle or a line and carries its own
parameter ``w``: the polar angle about the center for arcs, the signed
abscissa along the line for segments.  ``w`` may decrease along the
traversal (clockwise arcs).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import tetra
from .errors import DegenerateDomain, NearDegenerate, OutOfRange
from .tetra import GAMMA1, GAMMA2, P1, P2, X0, Y0, Circle, Region, TetraParams

MIN_EDGE_LENGTH = 1e-8

PRINCIPAL = "principal"
ASYMPTOTIC = "asymptotic"
_CURVE_CLASS = {"Y1": PRINCIPAL, "Y3": PRINCIPAL, "Est": ASYMPTOTIC,
                "Ex": ASYMPTOTIC, "Ey": ASYMPTOTIC}


@dataclass(frozen=True)
class Line:
    origin: complex
    direction: complex  # unit

    def point(self, w):
        return self.origin + np.asarray(w) * self.direction


def _support_point(support, w):
    return support.point(w)


def _support_dpoint(support, w):
    w = np.asarray(w)
    if isinstance(support, Circle):
        return 1j * support.radius * np.exp(1j * w)
    return np.broadcast_to(support.direction, np.shape(w)).astype(complex)


@dataclass(frozen=True)
class BoundaryEdge:
    label: str
    support: object  # Circle or Line
    w_start: float
    w_end: float
    curve_class: str | None = None

    @property
    def endpoints(self):
        return complex(self.point(self.w_start)), complex(self.point(self.w_end))

    @property
    def param_range(self):
        return (min(self.w_start, self.w_end), max(self.w_start, self.w_end))

    @property
    def is_arc(self) -> bool:
        return isinstance(self.support, Circle)

    def point(self, w):
        return _support_point(self.support, w)

    def at(self, tau):
        """Point at fraction tau in [0, 1] of the traversal."""
        return self.point(self.w_start + np.asarray(tau) * (self.w_end - self.w_start))

    def dat(self, tau):
        """d(point)/d(tau) along the traversal."""
        w = self.w_start + np.asarray(tau) * (self.w_end - self.w_start)
        return _support_dpoint(self.support, w) * (self.w_end - self.w_start)

    def tangent(self, tau):
        d = self.dat(tau)
        return d / np.abs(d)

    @property
    def length(self) -> float:
        if self.is_arc:
            return abs(self.w_end - self.w_start) * self.support.radius
        return abs(self.w_end - self.w_start)


def boundary_param(e: BoundaryEdge, w: float, slack: float = 1e-12):
    lo, hi = e.param_range
    if not (lo - slack <= w <= hi + slack):
        raise OutOfRange(f"w = {w} outside [{lo}, {hi}] for edge {e.label}")
    return complex(e.point(w))


@dataclass(frozen=True)
class CurvilinearPolygon:
    edges: tuple
    vertex_names: tuple = ()
    region: Region | None = None
    interior_angles: tuple = field(default=())

    def __post_init__(self):
        if not self.interior_angles:
            object.__setattr__(self, "interior_angles", tuple(_angles(self.edges)))
        if not self.vertex_names:
            object.__setattr__(self, "vertex_names",
                               tuple(f"V{k}" for k in range(len(self.edges))))

    @property
    def vertices(self):
        """Vertex k is the start of edge k."""
        return tuple(e.endpoints[0] for e in self.edges)

    def vertex(self, name: str) -> complex:
        return self.vertices[self.vertex_names.index(name)]

    def edge(self, label: str) -> BoundaryEdge:
        for e in self.edges:
            if e.label == label:
                return e
        raise KeyError(label)

    def edge_index(self, label: str) -> int:
        return [e.label for e in self.edges].index(label)

    @property
    def labels(self):
        return tuple(e.label for e in self.edges)

    def closure_error(self) -> float:
        n = len(self.edges)
        return max(abs(self.edges[k].endpoints[1] - self.edges[(k + 1) % n].endpoints[0])
                   for k in range(n))

    def polyline(self, per_edge: int = 200) -> np.ndarray:
        tau = np.linspace(0.0, 1.0, per_edge, endpoint=False)
        return np.concatenate([e.at(tau) for e in self.edges])

    def contains(self, z, per_edge: int = 400) -> np.ndarray:
        """Even-odd test against a dense boundary polyline."""
        poly = self.polyline(per_edge)
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        x, y = z.real[:, None], z.imag[:, None]
        a = poly[None, :]
        b = np.roll(poly, -1)[None, :]
        ay, by = a.imag, b.imag
        cond = (ay > y) != (by > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = a.real + (y - ay) * (b.real - a.real) / (by - ay)
        hits = cond & (x < xint)
        return (hits.sum(axis=1) % 2) == 1

    def diameter(self) -> float:
        pts = self.polyline(64)
        return float(np.max(np.abs(pts[:, None] - pts[None, :])))


def _angles(edges):
    n = len(edges)
    out = []
    for k in range(n):
        t_in = complex(edges[k - 1].tangent(1.0))
        t_out = complex(edges[k].tangent(0.0))
        a = float(np.angle(-t_in / t_out)) % (2 * math.pi)
        out.append(a)
    return out


def vertex_angles(poly: CurvilinearPolygon):
    return list(_angles(poly.edges))


def _arc(label, circle: Circle, z_start, z_end, ccw: bool):
    a0 = circle.angle_of(z_start)
    a1 = circle.angle_of(z_end)
    if ccw:
        while a1 <= a0:
            a1 += 2 * math.pi
    else:
        while a1 >= a0:
            a1 -= 2 * math.pi
    return BoundaryEdge(label, circle, a0, a1, _CURVE_CLASS.get(label))


def _first_crossing(fixed: Circle, g: Circle, ccw: bool) -> complex:
    """First point of fixed ∩ g met when leaving P2 along fixed in the given sense."""
    a_p2 = fixed.angle_of(P2)
    best = None
    for z in tetra.circle_intersections(fixed, g):
        d = (fixed.angle_of(z) - a_p2) % (2 * math.pi)
        if not ccw:
            d = (2 * math.pi - d) % (2 * math.pi)
        if best is None or d < best[0]:
            best = (d, z)
    return best[1]


def build_gauss_domain(p: TetraParams, tol_F: float = tetra.TOL_F,
                       min_edge: float = MIN_EDGE_LENGTH) -> CurvilinearPolygon:
    region = tetra.classify(p, tol_F)
    g = tetra.gamma_st(p)
    if region is Region.F:
        raise DegenerateDomain("the Gauss image is a point on F")
    if region is Region.ThetaPlus:
        v1 = _first_crossing(GAMMA1, g, ccw=True)
        v2 = _first_crossing(GAMMA2, g, ccw=False)
        edges = (_arc("Y1", GAMMA1, P2, v1, ccw=True),
                 _arc("Est", g, v1, v2, ccw=False),
                 _arc("Y3", GAMMA2, v2, P2, ccw=True))
        names = ("p2", "v1", "v2")
    else:
        has_ex = region in (Region.C2Minus, Region.C4)
        has_ey = region in (Region.C2Plus, Region.C4)
        edges = []
        names = ["p2"]
        if has_ex:
            x_st = max(tetra.circle_line_intersections(g, 0j, 1 + 0j))
            edges.append(_arc("Y1", GAMMA1, P2, X0, ccw=False))
            edges.append(BoundaryEdge("Ex", Line(0j, 1 + 0j), X0.real, x_st, ASYMPTOTIC))
            v1 = complex(x_st, 0.0)
            names += ["w1", "v1"]
        else:
            v1 = _first_crossing(GAMMA1, g, ccw=False)
            edges.append(_arc("Y1", GAMMA1, P2, v1, ccw=False))
            names += ["v1"]
        if has_ey:
            y_st = max(tetra.circle_line_intersections(g, 0j, 1j))
            v2 = complex(0.0, y_st)
            edges.append(_arc("Est", g, v1, v2, ccw=True))
            edges.append(BoundaryEdge("Ey", Line(0j, 1j), y_st, Y0.imag, ASYMPTOTIC))
            edges.append(_arc("Y3", GAMMA2, Y0, P2, ccw=False))
            names += ["v2", "w2"]
        else:
            v2 = _first_crossing(GAMMA2, g, ccw=True)
            edges.append(_arc("Est", g, v1, v2, ccw=True))
            edges.append(_arc("Y3", GAMMA2, v2, P2, ccw=False))
            names += ["v2"]
        edges = tuple(edges)
        names = tuple(names)
    short = [e.label for e in edges if e.length < min_edge]
    if short:
        raise NearDegenerate(f"edges {short} shorter than {min_edge}")
    return CurvilinearPolygon(edges, names, region)


def polygon_from_points(points, labels=None) -> CurvilinearPolygon:
    """Straight-edged polygon through the given CCW vertices."""
    pts = [complex(z) for z in points]
    n = len(pts)
    labels = labels or [f"B{k + 1}" for k in range(n)]
    edges = []
    for k in range(n):
        a, b = pts[k], pts[(k + 1) % n]
        d = b - a
        edges.append(BoundaryEdge(labels[k], Line(a, d / abs(d)), 0.0, abs(d)))
    return CurvilinearPolygon(tuple(edges))


@dataclass(frozen=True)
class Mobius:
    a: complex
    b: complex
    c: complex
    d: complex

    def __call__(self, z):
        z = np.asarray(z)
        return (self.a * z + self.b) / (self.c * z + self.d)

    def derivative(self, z):
        z = np.asarray(z)
        det = self.a * self.d - self.b * self.c
        return det / (self.c * z + self.d) ** 2

    def inverse(self) -> "Mobius":
        return Mobius(self.d, -self.b, -self.c, self.a)

    def image_edge(self, e: BoundaryEdge) -> BoundaryEdge:
        z0, zm, z1 = (complex(self(e.at(tau))) for tau in (0.0, 0.5, 1.0))
        cross = ((zm - z0) * (z1 - z0).conjugate()).imag
        scale = abs(z1 - z0) * max(abs(zm - z0), abs(z1 - zm))
        if abs(cross) <= 1e-13 * scale:
            d = z1 - z0
            return BoundaryEdge(e.label, Line(z0, d / abs(d)), 0.0, abs(d), e.curve_class)
        circ = circle_through(z0, zm, z1)
        a0, am, a1 = (circ.angle_of(z) for z in (z0, zm, z1))
        span = (a1 - a0) % (2 * math.pi)
        mid = (am - a0) % (2 * math.pi)
        end = a0 + span if mid < span else a0 - (2 * math.pi - span)
        return BoundaryEdge(e.label, circ, a0, end, e.curve_class)

    def image_polygon(self, poly: CurvilinearPolygon) -> CurvilinearPolygon:
        return CurvilinearPolygon(tuple(self.image_edge(e) for e in poly.edges),
                                  poly.vertex_names, poly.region)


def circle_through(z1: complex, z2: complex, z3: complex) -> Circle:
    a = z2 - z1
    b = z3 - z1
    den = 2 * (a.real * b.imag - a.imag * b.real)
    ux = (b.imag * abs(a) ** 2 - a.imag * abs(b) ** 2) / den
    uy = (a.real * abs(b) ** 2 - b.real * abs(a) ** 2) / den
    c = z1 + complex(ux, uy)
    return Circle(c, abs(z1 - c))


def normalizing_mobius() -> Mobius:
    """Send p2 to 0 and p1 to infinity; Gamma_1 and Gamma_2 become rays."""
    return Mobius(1 + 0j, -P2, 1 + 0j, -P1)
