"""Weierstrass data g = z, dh = z (dzeta)^2 / dz and the fundamental surface patch.

X(z) = Re int_{p2}^z (1/2 (1 - w^2), i/2 (1 + w^2), w) zeta'(w)^2 dw, scaled so that
the image of Est has unit length.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .developing import DevelopingMap, build_zeta
from .domain import BoundaryEdge, CurvilinearPolygon
from .errors import PathEscapesDomain
from .paths import INVERSE, MOBIUS, ray_path
from .quadrature import cumulative, integrate
from .tetra import Circle, TetraParams, circle_line_intersections

EST_SAMPLES = 256
MIN_ANGLE_DEG = 5.0


class MeshQualityWarning(UserWarning):
    pass


class WeierstrassData:
    def __init__(self, zeta: DevelopingMap, lam: float = 1.0, sign: float = 1.0):
        self.zeta = zeta
        self.poly = zeta.poly
        self.lam = lam
        self.sign = sign
        self.base = self.poly.vertices[0]

    def form(self, z):
        """Vector of holomorphic coefficients phi with dX = Re(phi dz); shape (..., 3)."""
        z = np.asarray(z, complex)
        d2 = self.zeta.derivative(z) ** 2 * (self.sign * self.lam)
        return np.stack([0.5 * (1 - z * z) * d2, 0.5j * (1 + z * z) * d2, z * d2], axis=-1)

    def dh(self, z):
        z = np.asarray(z, complex)
        return z * self.zeta.derivative(z) ** 2 * (self.sign * self.lam)

    def singularities(self):
        return self.zeta.singularities(power=2.0)

    def with_scale(self, lam: float, sign: float) -> "WeierstrassData":
        return WeierstrassData(self.zeta, lam, sign)


def _alt_path(z: complex, poly: CurvilinearPolygon):
    """Broken path p2 -> knee -> z whose first leg is a different ray."""
    w = complex(MOBIUS(z))
    ref = complex(MOBIUS(poly.vertices[1]))
    ref /= abs(ref)
    half = 0.5 * poly.interior_angles[0]
    off = half - float(np.angle(w / ref))
    for rho in (0.6, 0.8, 0.4, 0.9):
        for frac in (0.3, 0.15, -0.15, 0.05, -0.05):
            knee = rho * w * np.exp(1j * frac * off if off else 1j * frac * half)
            pieces = [ray_path(complex(INVERSE(knee))), ray_path(z, w_start=knee)]
            inside = all(np.all(poly.contains(path(np.linspace(0.02, 0.98, 49))))
                         for path, _ in pieces)
            if inside:
                return pieces
    raise PathEscapesDomain(f"no alternative path to {z} inside the domain")


def integrate_point(W: WeierstrassData, z: complex, path: str = "ray") -> np.ndarray:
    z = complex(z)
    if z == W.base:
        return np.zeros(3)
    sing = W.singularities()
    if path == "ray":
        pieces = [ray_path(z)]
    elif path == "alt":
        pieces = _alt_path(z, W.poly)
    else:
        raise ValueError(f"unknown path kind {path!r}")
    total = np.zeros(3, complex)
    for pth, dpth in pieces:
        total += integrate(W.form, pth, dpth, 0.0, 1.0, sing)
    return total.real


def edge_curve(W: WeierstrassData, label: str, ts) -> np.ndarray:
    """X along an edge at traversal fractions ts (ts[0] is the start of the integration)."""
    k = W.poly.edge_index(label)
    e = W.poly.edges[k]
    ts = np.asarray(ts, float)
    start = integrate_point(W, complex(e.at(ts[0])))
    vals = cumulative(W.form, e.at, e.dat, ts, W.singularities())
    return start + vals.real


def weierstrass_data(zeta: DevelopingMap) -> WeierstrassData:
    """Scale so |X(Est)| = 1 and orient so that Y1 rises from the T-point."""
    raw = WeierstrassData(zeta)
    ts = np.linspace(0.0, 1.0, EST_SAMPLES)
    est = edge_curve(raw, "Est", ts)
    length = float(np.sum(np.linalg.norm(np.diff(est, axis=0), axis=1)))
    v1 = zeta.poly.vertex("v1")
    sign = 1.0 if integrate_point(raw, v1)[2] > 0 else -1.0
    return raw.with_scale(1.0 / length, sign)


# -- mesh -----------------------------------------------------------------

def _on_arc(edge: BoundaryEdge, z: complex, slack: float = 1e-9) -> bool:
    if isinstance(edge.support, Circle):
        a = edge.support.angle_of(z)
        lo, hi = edge.param_range
        span = hi - lo
        rel = (a - lo) % (2 * math.pi)
        return rel <= span + slack or rel >= 2 * math.pi - slack
    o, d = edge.support.origin, edge.support.direction
    w = ((z - o) * d.conjugate()).real
    lo, hi = edge.param_range
    return lo - slack <= w <= hi + slack


def _ray_exit(chain, theta: float) -> tuple:
    """First crossing of the ray from 0 at angle theta with the chain edges."""
    d = complex(math.cos(theta), math.sin(theta))
    best = (math.inf, None)
    for k, e in chain:
        if isinstance(e.support, Circle):
            try:
                roots = circle_line_intersections(e.support, 0j, d)
            except Exception:
                continue
        else:
            o, u = e.support.origin, e.support.direction
            den = (d * u.conjugate()).imag
            if abs(den) < 1e-300:
                continue
            roots = (((o * u.conjugate()).imag) / den,)
        for r in roots:
            if r > 1e-14 and r < best[0] and _on_arc(e, r * d):
                best = (r, k)
    if best[1] is None:
        raise PathEscapesDomain(f"ray at angle {theta} never leaves the domain")
    return best


def _graded(a: float, b: float, n: int) -> np.ndarray:
    """n + 1 points on [a, b], half uniform and half cosine-clustered toward both ends."""
    u = np.arange(n + 1) / n
    s = 0.25 * (1 - np.cos(np.pi * u)) + 0.5 * u
    return a + (b - a) * s


@dataclass
class SurfacePatch:
    params: TetraParams
    vertices: np.ndarray          # (n, 3)
    z: np.ndarray                 # source parameter of every vertex
    triangles: np.ndarray         # (m, 3)
    boundary: dict                # label -> ordered vertex indices
    named: dict                   # vertex name -> vertex index
    grid_shape: tuple
    lam: float
    sign: float
    stats: dict = field(default_factory=dict)

    @property
    def tpoint(self) -> np.ndarray:
        return self.vertices[self.named["p2"]]

    def boundary_polyline(self, label: str) -> np.ndarray:
        return self.vertices[self.boundary[label]]


def _min_angles(V, T):
    a, b, c = V[T[:, 0]], V[T[:, 1]], V[T[:, 2]]

    def ang(p, q, r):
        u, v = q - p, r - p
        nu = np.linalg.norm(u, axis=1) * np.linalg.norm(v, axis=1)
        cos = np.einsum("ij,ij->i", u, v) / np.where(nu > 0, nu, 1)
        return np.degrees(np.arccos(np.clip(cos, -1, 1)))
    return np.minimum(np.minimum(ang(a, b, c), ang(b, c, a)), ang(c, a, b))


def build_fundamental_mesh(p: TetraParams | DevelopingMap | WeierstrassData,
                           resolution: int = 64, tol: float = 1e-6) -> SurfacePatch:
    if isinstance(p, WeierstrassData):
        W = p
    else:
        zeta = p if isinstance(p, DevelopingMap) else build_zeta(p, tol)
        W = weierstrass_data(zeta)
    if resolution < 8:
        raise ValueError("resolution must be at least 8")
    poly = W.poly
    img = [MOBIUS.image_edge(e) for e in poly.edges]
    chain = [(k, img[k]) for k, e in enumerate(poly.edges) if e.label not in ("Y1", "Y3")]
    # corner c of the chain is polygon vertex c + 1; chain edge k spans corners k-1..k
    th_y1 = float(np.angle(MOBIUS(poly.edge("Y1").at(0.5))))
    rel = [float(np.angle(MOBIUS(v) * np.exp(-1j * th_y1))) for v in poly.vertices[2:-1]]
    breaks = np.array([th_y1] + [th_y1 + r for r in rel] + [th_y1 + poly.interior_angles[0]])
    spans = np.diff(breaks)
    counts = np.maximum(2, np.round(resolution * spans / spans.sum()).astype(int))
    thetas = np.concatenate([_graded(breaks[i], breaks[i + 1], counts[i])[:-1]
                             for i in range(len(spans))] + [breaks[-1:]])
    corner_at = {int(np.sum(counts[:c])): c for c in range(len(breaks))}
    n_r = resolution
    rho = _graded(0.0, 1.0, n_r)
    sing = W.singularities()
    n_th = len(thetas)
    X = np.zeros((n_th, n_r + 1, 3))
    Z = np.zeros((n_th, n_r + 1), complex)
    exit_edge = np.zeros(n_th, int)
    for i, th in enumerate(thetas):
        if i in corner_at:
            # rays through polygon corners end exactly on the corner
            c = corner_at[i]
            z_end, k_end = poly.vertices[c + 1], c
        else:
            r_end, k_end = _ray_exit(chain, th)
            z_end = complex(INVERSE(r_end * np.exp(1j * th)))
        exit_edge[i] = k_end
        path, dpath = ray_path(z_end)
        Z[i] = path(rho)
        Z[i, 0] = W.base
        Z[i, -1] = z_end
        X[i] = cumulative(W.form, path, dpath, rho, sing).real
    verts = np.concatenate([[X[0, 0]], X[:, 1:].reshape(-1, 3)])
    zs = np.concatenate([[W.base], Z[:, 1:].ravel()])

    def idx(i, j):
        return 0 if j == 0 else 1 + i * n_r + (j - 1)

    tris = []
    for i in range(n_th - 1):
        tris.append((0, idx(i, 1), idx(i + 1, 1)))
        for j in range(1, n_r):
            a, b, c, d = idx(i, j), idx(i, j + 1), idx(i + 1, j + 1), idx(i + 1, j)
            tris.append((a, b, c))
            tris.append((a, c, d))
    tris = np.array(tris, int)
    boundary = {"Y1": np.array([idx(0, j) for j in range(n_r + 1)])}
    # chain edges in traversal order; a corner ray belongs to both neighbours
    starts = sorted(corner_at)
    for k in range(1, len(poly.edges) - 1):
        sel = range(starts[k - 1], starts[k] + 1)
        boundary[poly.edges[k].label] = np.array([idx(i, n_r) for i in sel])
    boundary["Y3"] = np.array([idx(n_th - 1, j) for j in range(n_r, -1, -1)])
    named = {"p2": 0}
    for name, v in zip(poly.vertex_names[1:], poly.vertices[1:]):
        k = int(np.argmin(np.abs(zs - v)))
        named[name] = k
    angles = _min_angles(verts, tris)
    stats = {"min_angle_deg": float(angles.min()), "n_vertices": len(verts),
             "n_triangles": len(tris), "n_theta": n_th, "n_r": n_r + 1}
    if stats["min_angle_deg"] < MIN_ANGLE_DEG:
        warnings.warn(f"minimum triangle angle {stats['min_angle_deg']:.2f} deg below "
                      f"{MIN_ANGLE_DEG} deg", MeshQualityWarning, stacklevel=2)
    patch = SurfacePatch(W.zeta.params, verts, zs, tris, boundary, named,
                         (n_th, n_r + 1), W.lam, W.sign, stats)
    patch.weierstrass = W
    return patch


def surface_vertex_angle(W, vertex: str, levels: int = 8) -> float:
    """Interior angle of the image boundary at a polygon vertex, extrapolated to the vertex."""
    W = getattr(W, "weierstrass", W)
    poly = W.poly
    k = poly.vertex_names.index(vertex)
    e_out = poly.edges[k]
    e_in = poly.edges[k - 1]
    x0 = integrate_point(W, poly.vertices[k])
    eps = 0.02 * 0.5 ** np.arange(levels)
    angs = []
    for ep in eps:
        a = integrate_point(W, complex(e_out.at(ep))) - x0
        b = integrate_point(W, complex(e_in.at(1 - ep))) - x0
        c = np.dot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b))
        angs.append(math.acos(max(-1.0, min(1.0, c))))
    return aitken(np.array(angs))


def aitken(seq: np.ndarray) -> float:
    """Aitken delta-squared limit of the last three terms (plain last term if unstable)."""
    if len(seq) < 3:
        return float(seq[-1])
    a, b, c = seq[-3:]
    den = c - 2 * b + a
    if abs(den) < 1e-15 or abs(c - b) > abs(b - a):
        return float(c)
    return float(c - (c - b) ** 2 / den)
