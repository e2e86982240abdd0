"""Tetrahedron family T_st, region classification and Gauss-image circles.

Every quantity here is closed form.  Points in the plane are Python/numpy
complex numbers throughout the package.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import Degenerate, Inconsistent, NotAnIntersection, OutOfDomain

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)

TOL_F = 1e-10
POSITION_RTOL = 1e-12

# Gamma_1 and Gamma_2 meet at P1 and P2; X0, Y0 are their outer axis crossings.
P1 = complex(1 - 1 / SQRT2, 1 - 1 / SQRT2)
P2 = complex(1 + 1 / SQRT2, 1 + 1 / SQRT2)
X0 = complex(2 + SQRT3, 0.0)
Y0 = complex(0.0, 2 + SQRT3)

PSI0 = math.acos(1.0 / 3.0)
T_ANGLE = math.acos(-1.0 / 3.0)


class Region(str, enum.Enum):
    ThetaPlus = "ThetaPlus"
    F = "F"
    ThetaMinus = "ThetaMinus"
    C2Plus = "C2Plus"
    C2Minus = "C2Minus"
    C4 = "C4"

    def __str__(self):
        return self.value


class Position(str, enum.Enum):
    Inside = "Inside"
    On = "On"
    Outside = "Outside"


@dataclass(frozen=True)
class TetraParams:
    s: float
    t: float
    A: float = field(init=False)

    def __post_init__(self):
        s, t = float(self.s), float(self.t)
        if not (s > 0 and t > 0 and s * s + t * t < 1):
            raise OutOfDomain(f"(s, t) = ({s}, {t}) is outside Q")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "A", math.sqrt(1.0 - s * s - t * t))

    @property
    def v_st(self) -> np.ndarray:
        """Direction of the edge E_st."""
        return np.array([self.s, self.t, -self.A])


def make_params(s: float, t: float) -> TetraParams:
    return TetraParams(s, t)


@dataclass(frozen=True)
class Tetrahedron:
    vertices: np.ndarray  # rows: top (0,-t), top (0,t), bottom (s,0), bottom (-s,0)

    @property
    def top_minus(self):
        return self.vertices[0]

    @property
    def top_plus(self):
        return self.vertices[1]

    @property
    def bottom_plus(self):
        return self.vertices[2]

    @property
    def bottom_minus(self):
        return self.vertices[3]

    def non_horizontal_edge_lengths(self) -> np.ndarray:
        top, bottom = self.vertices[:2], self.vertices[2:]
        return np.array([np.linalg.norm(a - b) for a in top for b in bottom])

    @property
    def edge_length_nonhorizontal(self) -> float:
        return float(self.non_horizontal_edge_lengths().mean())

    def centroid(self) -> np.ndarray:
        return self.vertices.mean(axis=0)


def tetra_vertices(p: TetraParams) -> Tetrahedron:
    h = p.A / 2
    v = np.array(
        [
            [0.0, -p.t, h],
            [0.0, p.t, h],
            [p.s, 0.0, -h],
            [-p.s, 0.0, -h],
        ]
    )
    return Tetrahedron(v)


def quadratic_forms(s, t):
    """The three ellipse forms, each shifted so that zero is the ellipse."""
    flat = 3 * s * s + 3 * t * t + 2 * s * t - 2
    top = 4 * s * s + 3 * t * t - 3
    bottom = 3 * s * s + 4 * t * t - 3
    return flat, top, bottom


def classify(p: TetraParams, tol_F: float = TOL_F) -> Region:
    flat, top, bottom = quadratic_forms(p.s, p.t)
    if abs(flat) <= tol_F:
        return Region.F
    if flat < 0:
        return Region.ThetaPlus
    if top <= 0 and bottom <= 0:
        return Region.ThetaMinus
    if top <= 0:
        return Region.C2Plus
    if bottom <= 0:
        return Region.C2Minus
    return Region.C4


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be positive")

    def point(self, w):
        return self.center + self.radius * np.exp(1j * np.asarray(w))

    def angle_of(self, z) -> float:
        return float(np.angle(z - self.center))


GAMMA1 = Circle(2 + 0j, SQRT3)
GAMMA2 = Circle(2j, SQRT3)


def gamma_st(p: TetraParams) -> Circle:
    return Circle(complex(p.s, p.t) / p.A, 1.0 / p.A)


def gamma_circles(p: TetraParams):
    return GAMMA1, GAMMA2, gamma_st(p)


def circle_position(z: complex, c: Circle, tol: float | None = None) -> Position:
    if tol is None:
        tol = POSITION_RTOL * c.radius
    if tol < 0:
        raise ValueError("tol must be non-negative")
    d = abs(z - c.center) - c.radius
    if abs(d) <= tol:
        return Position.On
    return Position.Inside if d < 0 else Position.Outside


def classify_by_circles(p: TetraParams, tol: float | None = None) -> Region:
    """Region from the positions of p2, x0, y0 relative to Gamma_st alone."""
    g = gamma_st(p)
    at_p2 = circle_position(P2, g, tol)
    at_x0 = circle_position(X0, g, tol)
    at_y0 = circle_position(Y0, g, tol)
    if at_p2 is Position.On:
        return Region.F
    if at_p2 is Position.Outside:
        if Position.Inside in (at_x0, at_y0):
            raise Inconsistent(f"p2 outside Gamma_st but x0/y0 inside at ({p.s}, {p.t})")
        return Region.ThetaPlus
    x_in = at_x0 is Position.Inside
    y_in = at_y0 is Position.Inside
    if x_in and y_in:
        return Region.C4
    if y_in:
        return Region.C2Plus
    if x_in:
        return Region.C2Minus
    return Region.ThetaMinus


def circle_intersections(c1: Circle, c2: Circle):
    """Both intersection points, from the radical line."""
    d = c2.center - c1.center
    dist = abs(d)
    if dist == 0:
        raise NotAnIntersection("concentric circles")
    # distance from c1.center to the radical line along d
    a = (c1.radius**2 - c2.radius**2 + dist**2) / (2 * dist)
    h2 = c1.radius**2 - a * a
    if h2 < 0:
        raise NotAnIntersection("circles do not meet")
    u = d / dist
    base = c1.center + a * u
    h = math.sqrt(h2)
    return base + 1j * u * h, base - 1j * u * h


def circle_line_intersections(c: Circle, origin: complex, direction: complex):
    """Parameters w with |origin + w*direction - center| = radius (direction unit)."""
    q = origin - c.center
    b = (q * direction.conjugate()).real
    cc = abs(q) ** 2 - c.radius**2
    disc = b * b - cc
    if disc < 0:
        raise NotAnIntersection("line misses circle")
    r = math.sqrt(disc)
    return -b - r, -b + r


def circle_angle_cos(c1: Circle, c2: Circle) -> float:
    """Cosine of the angle between the radius vectors at an intersection point."""
    d2 = abs(c1.center - c2.center) ** 2
    return (c1.radius**2 + c2.radius**2 - d2) / (2 * c1.radius * c2.radius)


@dataclass(frozen=True)
class CornerAngles:
    psi0: float
    psi1: float
    psi2: float


def corner_angles(p: TetraParams, tol_F: float = TOL_F) -> CornerAngles:
    if classify(p, tol_F) is Region.F:
        raise Degenerate("v1 = v2 = p2 on F")
    g = gamma_st(p)
    c1, c2 = circle_angle_cos(GAMMA1, g), circle_angle_cos(GAMMA2, g)
    if abs(c1) > 1 or abs(c2) > 1:
        raise NotAnIntersection(f"Gamma_st misses a fixed circle at ({p.s}, {p.t})")
    psi0 = math.pi - math.acos(circle_angle_cos(GAMMA1, GAMMA2))
    return CornerAngles(psi0, math.acos(c1), math.acos(c2))


def orthogonality_invariant(p: TetraParams, intersection: complex, which: int = 1,
                            rtol: float = 1e-9) -> float:
    """Scalar product of the two radius vectors at a point of Gamma_st and Gamma_which."""
    fixed = GAMMA1 if which == 1 else GAMMA2
    g = gamma_st(p)
    for c in (fixed, g):
        if abs(abs(intersection - c.center) - c.radius) > rtol * c.radius:
            raise NotAnIntersection(f"{intersection} is not on both circles")
    a = intersection - fixed.center
    b = intersection - g.center
    return (a * b.conjugate()).real
