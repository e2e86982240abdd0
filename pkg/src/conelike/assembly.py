"""Full soap film from the fundamental patch, and the flat cone on F."""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import ClosureFailure, NoSharedEdge, NotOnF
from .tetra import TOL_F, Region, Tetrahedron, TetraParams, quadratic_forms, tetra_vertices
from .weierstrass import SurfacePatch, WeierstrassData, integrate_point

T_ANGLE = math.acos(-1.0 / 3.0)
TOL_CLOSURE = 1e-4
COINCIDE = 1e-7

RX = np.array([-1.0, 1.0, 1.0])
RY = np.array([1.0, -1.0, 1.0])


@dataclass
class FilmMesh:
    params: TetraParams
    region: Region
    vertices: np.ndarray
    triangles: np.ndarray
    face_group: np.ndarray          # index into group_names per triangle
    group_names: tuple
    singular_curves: dict           # Y1..Y4 -> (k, 3) polylines starting at the T-point
    edge_segments: dict             # "top"/"bottom" -> (k, 3) polyline on the tetra edge
    tpoint: np.ndarray
    tetra: Tetrahedron
    translation: float = 0.0
    closure_residual: float = 0.0
    patch: SurfacePatch | None = None
    weierstrass: WeierstrassData | None = None
    curve_indices: dict | None = None   # Y1..Y4 -> vertex indices
    glue_gap: float = 0.0

    def group(self, name: str) -> np.ndarray:
        return self.triangles[self.face_group == self.group_names.index(name)]


@dataclass
class ConeFilm:
    params: TetraParams
    vertex: np.ndarray
    a: float
    tetra: Tetrahedron
    faces: np.ndarray               # (6, 3, 3) triangles P, V_i, V_j
    angles: np.ndarray              # (4, 4) pairwise angles between P->V_k

    @property
    def vertices(self) -> np.ndarray:
        return np.vstack([self.vertex, self.tetra.vertices])

    @property
    def triangles(self) -> np.ndarray:
        return np.array([(0, i + 1, j + 1) for i, j in combinations(range(4), 2)])

    @property
    def tpoint(self) -> np.ndarray:
        return self.vertex


def project_to_F(s: float) -> TetraParams:
    """The point (s, t) of F for the given s (positive root of the flat form)."""
    t = (-s + math.sqrt(6.0 - 8.0 * s * s)) / 3.0
    return TetraParams(s, t)


def _angle(u, v) -> float:
    c = float(np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v)))
    return math.acos(max(-1.0, min(1.0, c)))


def angle_table(apex: np.ndarray, pts: np.ndarray) -> np.ndarray:
    n = len(pts)
    out = np.zeros((n, n))
    for i, j in combinations(range(n), 2):
        out[i, j] = out[j, i] = _angle(pts[i] - apex, pts[j] - apex)
    return out


def flat_cone(p: TetraParams, tol_F: float = TOL_F) -> ConeFilm:
    flat = quadratic_forms(p.s, p.t)[0]
    if abs(flat) > tol_F:
        raise NotOnF(f"3s^2+3t^2+2st-2 = {flat:.3e} at ({p.s}, {p.t})")
    a = p.A / 2 - p.t / math.sqrt(2.0)
    apex = np.array([0.0, 0.0, a])
    tet = tetra_vertices(p)
    V = tet.vertices
    faces = np.array([[apex, V[i], V[j]] for i, j in combinations(range(4), 2)])
    return ConeFilm(p, apex, a, tet, faces, angle_table(apex, V))


def cone_apex_heights(p: TetraParams) -> tuple:
    """Both closed forms for the cone apex height; they agree exactly on F."""
    return p.A / 2 - p.t / math.sqrt(2.0), p.s / math.sqrt(2.0) - p.A / 2


def _fan(centre_index: int, loop: list) -> list:
    return [(centre_index, a, b) for a, b in zip(loop[:-1], loop[1:])]


def assemble_film(p: TetraParams, patch: SurfacePatch, tol: float = TOL_CLOSURE) -> FilmMesh:
    W = patch.weierstrass
    poly = W.poly
    tet = tetra_vertices(p)
    top_minus, bottom_plus = tet.vertices[0], tet.vertices[2]
    x_v1 = integrate_point(W, poly.vertex("v1"))
    x_v2 = integrate_point(W, poly.vertex("v2"))
    shift = 0.5 * ((top_minus - x_v1)[2] + (bottom_plus - x_v2)[2])
    e3 = np.array([0.0, 0.0, shift])
    residual = max(np.linalg.norm(x_v1 + e3 - top_minus), np.linalg.norm(x_v2 + e3 - bottom_plus))
    if not residual <= tol:
        raise ClosureFailure(f"vertex images miss the tetrahedron by {residual:.3e}", residual)

    V0 = patch.vertices + e3
    # glue: curves in the mirror planes are snapped onto them so mirrored copies coincide
    on_x = np.concatenate([patch.boundary[k] for k in ("Y1", "Ex") if k in patch.boundary])
    on_y = np.concatenate([patch.boundary[k] for k in ("Y3", "Ey") if k in patch.boundary])
    gap = max(float(np.max(np.abs(V0[on_x, 0]))), float(np.max(np.abs(V0[on_y, 1]))))
    V0[on_x, 0] = 0.0
    V0[on_y, 1] = 0.0
    T0 = patch.triangles
    n0 = len(V0)
    copies = [(V0, T0), (V0 * RX, T0[:, ::-1]), (V0 * RY, T0[:, ::-1]), (V0 * RX * RY, T0)]
    verts = [c[0] for c in copies]
    tris = [c[1] + k * n0 for k, c in enumerate(copies)]
    groups = [np.full(len(T0), k) for k in range(4)]
    names = ["sheet", "sheet_rx", "sheet_ry", "sheet_rxry"]

    y1 = V0[patch.boundary["Y1"]]
    y3 = V0[patch.boundary["Y3"]][::-1]     # from the T-point outwards
    curves = {"Y1": y1, "Y2": y1 * RY, "Y3": y3, "Y4": y3 * RX}
    curve_idx = {"Y1": patch.boundary["Y1"], "Y2": patch.boundary["Y1"] + 2 * n0,
                 "Y3": patch.boundary["Y3"][::-1], "Y4": patch.boundary["Y3"][::-1] + n0}
    base = n0 * 4
    idx_y1 = patch.boundary["Y1"]
    idx_y3 = patch.boundary["Y3"][::-1]

    # planar disks, fanned from the midpoints of the horizontal edges
    h = p.A / 2
    mids = (np.array([0.0, 0.0, h]), np.array([0.0, 0.0, -h]))
    for name, mid, idx, refl_k in (("disk_top", mids[0], idx_y1, 2), ("disk_bottom", mids[1], idx_y3, 1)):
        verts.append(mid[None, :])
        c = base
        base += 1
        a_loop = list(idx)
        b_loop = [i + refl_k * n0 for i in idx]
        t = _fan(c, a_loop) + [(c, b, a) for a, b in zip(b_loop[:-1], b_loop[1:])]
        tris.append(np.array(t, int))
        groups.append(np.full(len(t), len(names)))
        names.append(name)

    segments = {}
    if "Ex" in patch.boundary:
        ex = V0[patch.boundary["Ex"]]
        segments["top"] = ex
    if "Ey" in patch.boundary:
        ey = V0[patch.boundary["Ey"]]
        segments["bottom"] = ey
    V = np.vstack(verts)
    T = np.vstack(tris)
    G = np.concatenate(groups)
    return FilmMesh(p, poly.region, V, T, G, tuple(names), curves, segments,
                    V0[patch.named["p2"]], tet, shift, float(residual), patch, W,
                    curve_idx, gap)


def _inward(W: WeierstrassData, edge, taus) -> np.ndarray:
    """Unit tangent of the surface at boundary points, perpendicular to the edge, pointing inside."""
    z = edge.at(taus)
    tau = edge.tangent(taus)
    phi = W.form(z)
    along = np.real(phi * tau[:, None])
    inward = np.real(phi * (1j * tau)[:, None])
    along /= np.linalg.norm(along, axis=1)[:, None]
    inward = inward - np.einsum("ij,ij->i", inward, along)[:, None] * along
    return inward / np.linalg.norm(inward, axis=1)[:, None]


def dihedral_along_edge(film: FilmMesh, segment: str = "top", n: int = 41) -> np.ndarray:
    """Dihedral angles between a sheet and its mirror along a shared tetra edge segment."""
    if segment not in film.edge_segments:
        raise NoSharedEdge(f"no {segment} edge segment in region {film.region}")
    if film.weierstrass is not None:
        label, refl = ("Ex", RX) if segment == "top" else ("Ey", RY)
        edge = film.weierstrass.poly.edge(label)
        taus = np.linspace(0.0, 1.0, n)
        taus[0], taus[-1] = 1e-9, 1 - 1e-9
        u = _inward(film.weierstrass, edge, taus)
        cos = np.einsum("ij,ij->i", u, u * refl)
        return np.arccos(np.clip(cos, -1.0, 1.0))
    return mesh_dihedral(film, segment)


def mesh_dihedral(film: FilmMesh, segment: str) -> np.ndarray:
    """Angle between the two faces adjacent to each piece of a shared polyline."""
    pts = film.edge_segments[segment]
    V, T = film.vertices, film.triangles
    out = []
    for a, b in zip(pts[:-1], pts[1:]):
        ia = np.argmin(np.linalg.norm(V - a, axis=1))
        ib = np.argmin(np.linalg.norm(V - b, axis=1))
        near_a = np.nonzero(np.linalg.norm(V - V[ia], axis=1) < COINCIDE)[0]
        near_b = np.nonzero(np.linalg.norm(V - V[ib], axis=1) < COINCIDE)[0]
        has_a = np.isin(T, near_a).any(axis=1)
        has_b = np.isin(T, near_b).any(axis=1)
        sel = np.nonzero(has_a & has_b)[0]
        _, first = np.unique(film.face_group[sel], return_index=True)
        faces = T[sel[first]]
        if len(faces) < 2:
            raise NoSharedEdge("segment is not shared by two sheets")
        e = (V[ib] - V[ia]) / np.linalg.norm(V[ib] - V[ia])
        dirs = []
        for f in faces[:2]:
            other = [k for k in f if k not in near_a and k not in near_b][0]
            d = V[other] - V[ia]
            d = d - np.dot(d, e) * e
            dirs.append(d / np.linalg.norm(d))
        out.append(_angle(*dirs))
    return np.array(out)


def tpoint_angle_inequalities(film) -> dict:
    V = film.tetra.vertices
    T = np.asarray(film.tpoint)
    top = _angle(V[0] - T, V[1] - T)
    bottom = _angle(V[2] - T, V[3] - T)
    return {"top": top, "bottom": bottom}


def build_film(p: TetraParams, resolution: int = 64, tol=None):
    """Full pipeline: cone on F, otherwise zeta, Weierstrass patch and assembly."""
    from .developing import build_zeta
    from .tetra import classify
    from .weierstrass import build_fundamental_mesh, weierstrass_data
    tol_F = getattr(tol, "tol_F", TOL_F)
    tol_conf = getattr(tol, "tol_conformal", tol if isinstance(tol, float) else 1e-6)
    tol_geom = getattr(tol, "tol_geom", TOL_CLOSURE)
    if classify(p, tol_F) is Region.F:
        return flat_cone(p, tol_F)
    W = weierstrass_data(build_zeta(p, tol_conf))
    return assemble_film(p, build_fundamental_mesh(W, resolution, tol_conf), tol_geom)
