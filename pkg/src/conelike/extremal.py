"""Extremal length of the curve family joining two boundary sides.

The potential u = Re F is 0 on side A, 1 on side B and has zero normal
derivative on the two remaining boundary runs.  The Dirichlet energy equals
the jump of the conjugate Im F between those two runs, and the extremal
length is its reciprocal.  F is fitted in a lightning basis; the answer is
accepted once two successive resolutions agree to ``tol``.
"""
from __future__ import annotations

import math

import numpy as np

from . import lightning
from .domain import CurvilinearPolygon, Mobius
from .errors import DegenerateSides, SolverDiverged

RESOLUTIONS = ((24, 24), (32, 32), (44, 44), (60, 56), (80, 80), (100, 100))
CROWDED = 1e-2


def _as_polygon(domain) -> CurvilinearPolygon:
    if hasattr(domain, "as_polygon"):
        return domain.as_polygon()
    return domain


def uncrowd(poly: CurvilinearPolygon) -> CurvilinearPolygon:
    """Moebius image that enlarges a very short edge (extremal length is invariant)."""
    lens = [e.length for e in poly.edges]
    k = int(np.argmin(lens))
    diam = poly.diameter()
    if lens[k] >= CROWDED * diam:
        return poly
    e = poly.edges[k]
    outward = -1j * complex(e.tangent(0.5))
    c = complex(e.at(0.5)) + outward * math.sqrt(lens[k] * diam)
    return Mobius(0j, 1 + 0j, 1 + 0j, -c).image_polygon(poly)


def _indices(poly: CurvilinearPolygon, side) -> list:
    items = [side] if isinstance(side, (str, int, np.integer)) else list(side)
    return [poly.edge_index(s) if isinstance(s, str) else int(s) for s in items]


def _runs(n: int, marked: set) -> list:
    """Maximal cyclic runs of unmarked edges."""
    runs, cur = [], []
    start = next(k for k in range(n) if k in marked)
    for j in range(1, n + 1):
        k = (start + j) % n
        if k in marked:
            if cur:
                runs.append(cur)
            cur = []
        else:
            cur.append(k)
    return runs


class _Solve:
    def __init__(self, poly, a, b, degree, n_poles, sigma=3.0):
        basis = lightning.LightningBasis(poly, degree, n_poles, sigma)
        z, eid = basis.samples, basis.sample_edge
        verts = np.array(poly.vertices)
        dist = np.min(np.abs(z[:, None] - verts[None, :]), axis=1)
        dir_rows = np.isin(eid, a + b)
        neu = ~dir_rows
        normals = np.empty(len(z), complex)
        for k, e in enumerate(poly.edges):
            sel = eid == k
            normals[sel] = -1j * e.tangent(basis.sample_tau[sel])
        V = basis.values(z[dir_rows])
        D = basis.derivatives(z[neu]) * normals[neu][:, None]
        M = np.vstack([lightning.real_columns(V, "re"), lightning.real_columns(D, "re")])
        rhs = np.concatenate([np.isin(eid[dir_rows], b).astype(float), np.zeros(neu.sum())])
        w = np.concatenate([np.ones(dir_rows.sum()), dist[neu] / poly.diameter()])
        x = lightning.lstsq(M, rhs, w)
        self.coef = lightning.complex_coefficients(x)
        self.basis = basis
        self.residual = float(np.max(np.abs((M @ x - rhs) * w)))


def ext_length(domain, side_a, side_b, tol: float = 1e-6, *, return_info: bool = False):
    poly = uncrowd(_as_polygon(domain))
    n = len(poly.edges)
    a, b = _indices(poly, side_a), _indices(poly, side_b)
    if set(a) & set(b):
        raise DegenerateSides("the two sides share an edge")
    for k in a + b:
        if poly.edges[k].length <= 0:
            raise DegenerateSides(f"edge {k} has zero length")
    runs = _runs(n, set(a + b))
    if len(runs) != 2:
        raise DegenerateSides("sides must split the boundary into four arcs")
    # interior points of the free runs, away from the corners
    tau = np.linspace(0.2, 0.8, 7)
    probes = [np.concatenate([poly.edges[k].at(tau) for k in run]) for run in runs]
    prev = None
    info = {}
    for deg, npl in RESOLUTIONS:
        s = _Solve(poly, a, b, deg, npl)
        v = [s.basis.evaluate(s.coef, p).imag for p in probes]
        energy = abs(np.mean(v[0]) - np.mean(v[1]))
        spread = max(np.ptp(v[0]), np.ptp(v[1])) / max(energy, 1e-300)
        val = 1.0 / energy
        info = {"value": val, "spread": spread, "fit_residual": s.residual,
                "degree": deg, "poles": npl}
        if prev is not None and abs(val - prev) <= tol * max(val, 1.0) and spread <= tol:
            info["change"] = abs(val - prev)
            return (val, info) if return_info else val
        prev = val
    raise SolverDiverged(f"extremal length did not settle: last value {prev}, spread {info['spread']:.2e}")
