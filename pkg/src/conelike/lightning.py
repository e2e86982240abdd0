"""Rational least-squares bases for analytic functions on curvilinear polygons.

The basis is a polynomial part, orthogonalised by Arnoldi on the boundary
samples, plus simple poles clustered exponentially toward every vertex along
the exterior bisector.  Coefficients are complex; the fit is done in real
arithmetic so that any real-linear boundary functional (Re, Im, normal
derivative) can be imposed.
"""
from __future__ import annotations

import math

import numpy as np

from .domain import CurvilinearPolygon

CHUNK = 4096


def exterior_bisectors(poly: CurvilinearPolygon) -> np.ndarray:
    out = []
    for k, e in enumerate(poly.edges):
        t_out = complex(e.tangent(0.0))
        alpha = poly.interior_angles[k]
        out.append(-t_out * np.exp(0.5j * alpha))
    return np.array(out)


def local_scales(poly: CurvilinearPolygon) -> np.ndarray:
    n = len(poly.edges)
    lens = np.array([e.length for e in poly.edges])
    diam = poly.diameter()
    return np.full(n, diam)


class LightningBasis:
    def __init__(self, poly: CurvilinearPolygon, degree: int = 24, n_poles: int = 24,
                 sigma: float = 4.0, pole_vertices=None):
        self.poly = poly
        self.degree = degree
        self.n_poles = n_poles
        self.sigma = sigma
        verts = np.array(poly.vertices)
        self.vertices = verts
        self.bisectors = exterior_bisectors(poly)
        self.scales = local_scales(poly)
        which = range(len(verts)) if pole_vertices is None else pole_vertices
        j = np.arange(1, n_poles + 1)
        rel = np.exp(-sigma * (math.sqrt(n_poles) - np.sqrt(j)))
        poles, widths, owner = [], [], []
        for k in which:
            d = self.scales[k] * rel
            poles.append(verts[k] + self.bisectors[k] * d)
            widths.append(d)
            owner.append(np.full(n_poles, k))
        self.poles = np.concatenate(poles) if poles else np.zeros(0, complex)
        self.widths = np.concatenate(widths) if widths else np.zeros(0)
        self.pole_owner = np.concatenate(owner) if owner else np.zeros(0, int)
        self.min_pole_distance = np.full(len(verts), np.inf)
        for k in which:
            self.min_pole_distance[k] = self.scales[k] * rel[0]
        self.samples, self.sample_edge, self.sample_tau = self._sample()
        self._arnoldi(self.samples)

    @property
    def size(self) -> int:
        return self.degree + 1 + len(self.poles)

    def _sample(self):
        zs, eid, taus = [], [], []
        n_uniform = max(3 * self.degree, 60)
        for k, e in enumerate(self.poly.edges):
            length = e.length
            tau = list(np.linspace(0, 1, n_uniform + 2)[1:-1])
            for end, vk in ((0, k), (1, (k + 1) % len(self.poly.edges))):
                d = self.widths[self.pole_owner == vk]
                d = np.concatenate([d * f for f in (0.25, 0.5, 1.0, 2.0)])
                d = d[d < 0.5 * length] / length
                tau.extend(d if end == 0 else 1 - d)
            tau = np.unique(np.clip(tau, 1e-15, 1 - 1e-15))
            zs.append(e.at(tau))
            eid.append(np.full(len(tau), k))
            taus.append(tau)
        return np.concatenate(zs), np.concatenate(eid), np.concatenate(taus)

    def _arnoldi(self, z):
        self.center = np.mean(self.poly.polyline(64))
        self.radius = np.max(np.abs(self.poly.polyline(64) - self.center))
        x = (z - self.center) / self.radius
        m = len(x)
        n = self.degree
        Q = np.zeros((m, n + 1), complex)
        H = np.zeros((n + 1, n), complex)
        Q[:, 0] = 1.0
        for k in range(n):
            q = x * Q[:, k]
            for j in range(k + 1):
                H[j, k] = np.vdot(Q[:, j], q) / m
                q = q - H[j, k] * Q[:, j]
            H[k + 1, k] = np.linalg.norm(q) / math.sqrt(m)
            Q[:, k + 1] = q / H[k + 1, k]
        self.hessenberg = H

    def _poly(self, z, deriv=False):
        x = (np.asarray(z) - self.center) / self.radius
        n = self.degree
        H = self.hessenberg
        W = np.zeros((len(x), n + 1), complex)
        W[:, 0] = 1.0
        D = np.zeros_like(W) if deriv else None
        for k in range(n):
            w = x * W[:, k] - W[:, : k + 1] @ H[: k + 1, k]
            if deriv:
                d = W[:, k] + x * D[:, k] - D[:, : k + 1] @ H[: k + 1, k]
                D[:, k + 1] = d / H[k + 1, k]
            W[:, k + 1] = w / H[k + 1, k]
        if deriv:
            return D / self.radius
        return W

    def values(self, z) -> np.ndarray:
        z = np.atleast_1d(np.asarray(z, complex))
        P = self._poly(z)
        R = self.widths[None, :] / (z[:, None] - self.poles[None, :])
        return np.hstack([P, R])

    def derivatives(self, z) -> np.ndarray:
        z = np.atleast_1d(np.asarray(z, complex))
        P = self._poly(z, deriv=True)
        R = -self.widths[None, :] / (z[:, None] - self.poles[None, :]) ** 2
        return np.hstack([P, R])

    def evaluate(self, coef: np.ndarray, z) -> np.ndarray:
        z = np.asarray(z, complex)
        flat = z.ravel()
        out = np.empty(flat.shape, complex)
        for i in range(0, len(flat), CHUNK):
            out[i:i + CHUNK] = self.values(flat[i:i + CHUNK]) @ coef
        return out.reshape(z.shape)

    def evaluate_derivative(self, coef: np.ndarray, z) -> np.ndarray:
        z = np.asarray(z, complex)
        flat = z.ravel()
        out = np.empty(flat.shape, complex)
        for i in range(0, len(flat), CHUNK):
            out[i:i + CHUNK] = self.derivatives(flat[i:i + CHUNK]) @ coef
        return out.reshape(z.shape)


def real_columns(V: np.ndarray, part: str) -> np.ndarray:
    """Real design matrix for Re or Im of sum(c_j V_j), c_j = a_j + i b_j."""
    if part == "re":
        return np.hstack([V.real, -V.imag])
    return np.hstack([V.imag, V.real])


def complex_coefficients(x: np.ndarray) -> np.ndarray:
    n = len(x) // 2
    return x[:n] + 1j * x[n:]


def lstsq(M: np.ndarray, rhs: np.ndarray, weights=None):
    if weights is not None:
        M = M * weights[:, None]
        rhs = rhs * weights
    norms = np.linalg.norm(M, axis=0)
    norms[norms == 0] = 1.0
    x, *_ = np.linalg.lstsq(M / norms, rhs, rcond=1e-14)
    return x / norms
