"""Euclidean target polygons for the developing map.

Every target has its right angle corner (image of p2) at the origin and a
unit first edge Y1.  Principal edges are axis parallel, asymptotic edges
run at odd multiples of 45 degrees.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .domain import CurvilinearPolygon, polygon_from_points
from .errors import OutOfD, WrongRegion
from .tetra import SQRT2, Region

PI = math.pi

# edge directions (radians) of the C-region targets, keyed by label
C_DIRECTIONS = {"Y1": 0.0, "Ex": PI / 4, "Est": 3 * PI / 4, "Ey": 5 * PI / 4, "Y3": 3 * PI / 2}
THETA_PLUS_DIRECTIONS = (PI / 2, 5 * PI / 4, 0.0)
THETA_MINUS_DIRECTIONS = (0.0, 3 * PI / 4, 3 * PI / 2)


@dataclass(frozen=True)
class TargetPolygon:
    vertices: tuple
    labels: tuple
    directions: tuple
    region: Region
    ell: float | None = None
    m: float | None = None

    @property
    def lengths(self) -> dict:
        v = self.vertices
        n = len(v)
        return {self.labels[k]: abs(v[(k + 1) % n] - v[k]) for k in range(n)}

    @property
    def angles(self) -> tuple:
        """Interior angles, vertex k between edge k-1 and edge k."""
        d = self.directions
        return tuple(PI - (d[k] - d[k - 1]) % (2 * PI) for k in range(len(d)))

    @property
    def y3_length(self) -> float:
        return self.lengths["Y3"]

    @property
    def ey_length(self) -> float:
        return self.lengths.get("Ey", 0.0)

    def as_polygon(self) -> CurvilinearPolygon:
        return polygon_from_points(self.vertices, list(self.labels))

    def edge_points(self, label: str, n: int = 64) -> np.ndarray:
        k = self.labels.index(label)
        a, b = self.vertices[k], self.vertices[(k + 1) % len(self.vertices)]
        return a + (b - a) * np.linspace(0.0, 1.0, n)


def _walk(labels, lengths, directions):
    z = [0j]
    for lab, d in zip(labels[:-1], directions[:-1]):
        z.append(z[-1] + lengths[lab] * cmath.exp(1j * d))
    return tuple(z)


def triangle_target(region: Region) -> TargetPolygon:
    if region is Region.ThetaPlus:
        dirs = THETA_PLUS_DIRECTIONS
    elif region is Region.ThetaMinus:
        dirs = THETA_MINUS_DIRECTIONS
    else:
        raise WrongRegion(f"no triangle target for region {region}")
    labels = ("Y1", "Est", "Y3")
    verts = _walk(labels, {"Y1": 1.0, "Est": SQRT2}, dirs)
    return TargetPolygon(verts, labels, dirs, region)


def in_D(ell: float, m: float) -> bool:
    return ell > 0 and 1 / SQRT2 < m < ell + SQRT2


def pentagon_target(ell: float, m: float) -> TargetPolygon:
    if not in_D(ell, m):
        raise OutOfD(f"(l, m) = ({ell}, {m}) is outside D")
    labels = ("Y1", "Ex", "Est", "Ey", "Y3")
    lengths = {"Y1": 1.0, "Ex": ell, "Est": m, "Ey": ell - m + SQRT2}
    dirs = tuple(C_DIRECTIONS[k] for k in labels)
    return TargetPolygon(_walk(labels, lengths, dirs), labels, dirs, Region.C4, ell, m)


def quad_target(region: Region, x: float) -> TargetPolygon:
    """C2 targets; x is |Est| for C2Plus and |Ex| for C2Minus."""
    if region is Region.C2Plus:
        if not 1 / SQRT2 < x < SQRT2:
            raise OutOfD(f"m = {x} outside (1/sqrt2, sqrt2)")
        labels = ("Y1", "Est", "Ey", "Y3")
        lengths = {"Y1": 1.0, "Est": x, "Ey": SQRT2 - x}
        ell, m = None, x
    elif region is Region.C2Minus:
        if not x > 0:
            raise OutOfD(f"l = {x} must be positive")
        labels = ("Y1", "Ex", "Est", "Y3")
        lengths = {"Y1": 1.0, "Ex": x, "Est": SQRT2 + x}
        ell, m = x, SQRT2 + x
    else:
        raise WrongRegion(f"no quadrilateral target for region {region}")
    dirs = tuple(C_DIRECTIONS[k] for k in labels)
    return TargetPolygon(_walk(labels, lengths, dirs), labels, dirs, region, ell, m)


def target_directions(poly: CurvilinearPolygon) -> tuple:
    if poly.region is Region.ThetaPlus:
        return THETA_PLUS_DIRECTIONS
    if poly.region is Region.ThetaMinus:
        return THETA_MINUS_DIRECTIONS
    return tuple(C_DIRECTIONS[e.label] for e in poly.edges)


def target_angles(poly: CurvilinearPolygon) -> tuple:
    d = target_directions(poly)
    return tuple(PI - (d[k] - d[k - 1]) % (2 * PI) for k in range(len(d)))


def target_from_lengths(region: Region, lengths: dict) -> TargetPolygon:
    """Target with the shape read off measured (normalised) edge lengths."""
    if region in (Region.ThetaPlus, Region.ThetaMinus):
        return triangle_target(region)
    if region is Region.C4:
        return pentagon_target(lengths["Ex"], lengths["Est"])
    if region is Region.C2Plus:
        return quad_target(region, lengths["Est"])
    if region is Region.C2Minus:
        return quad_target(region, lengths["Ex"])
    raise WrongRegion(f"no target for region {region}")
